#pragma once

#include "failbench/harness.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace failbench {

/// Parses an experiment configuration from YAML text. Every key is
/// optional; unknown keys are rejected with ConfigError. Layout:
///
///   plant:      mass, inertia [3], wing_area, ..., dt_dynamics, trim_tas, trim_ias
///   pid:        k_theta, k_phi, k_ff [3], k_p [3], k_i [3], integrator_limit
///   position:   alt_kp, alt_ki, alt_kd, alt_int_limit, speed_kp, speed_ki,
///               speed_int_limit, pitch_limit, bank_limit, lookahead,
///               airspeed_scaling_min
///   rcac:       alpha, <channel>: {p0, ru, re, sigma}
///   failure:    p_loop, p_ground, mode (hold_last | zero), switch_schedule [[on, off], ...]
///   mission:    orders [..], quadrant_size, origin [n, e], altitude, speed, acceptance_radius
///   harness:    max_sim_time, dtw_band, rates {dynamics, attitude, position, failure, log,
///               evaluation}, dispersion {position_sigma, heading_sigma, airspeed_sigma}
///   experiment: configs [{name, controller, alpha}], regimes [clean, adverse]
///
/// `failure.switch_schedule` is the adverse-regime schedule.
ExperimentConfig parse_experiment_config(std::string_view yaml_text);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// Defaults: PID, RCAC alpha = 0.5 and RCAC alpha = 1, clean and adverse.
ExperimentConfig default_experiment_config();

/// FNV-1a 64 over the bytes.
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace failbench
