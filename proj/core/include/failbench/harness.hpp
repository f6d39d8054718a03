#pragma once

#include "failbench/evaluate.hpp"
#include "failbench/failure.hpp"
#include "failbench/mission.hpp"
#include "failbench/pid_controller.hpp"
#include "failbench/plant.hpp"
#include "failbench/rcac.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace failbench {

enum class ControllerKind { Pid, Rcac };

std::string_view to_string(ControllerKind kind);
ControllerKind controller_kind_from_string(std::string_view s);

/// Failure switch is on for t_on <= t < t_off.
struct SwitchWindow {
  double t_on{0.0};
  double t_off{0.0};
};

bool switch_on_at(const std::vector<SwitchWindow>& schedule, double t);

struct FailureConfig {
  double p_loop{0.3};
  double p_ground{0.4};
  InjectionMode mode{InjectionMode::HoldLast};
  std::vector<SwitchWindow> switch_schedule;
};

/// Loop rates in Hz; each must divide the dynamics rate.
struct LoopRates {
  int dynamics{250};
  int attitude{250};
  int position{50};
  int failure{1};
  int log{10};
  int evaluation{1};  // flown-path sampling for DTW

  void validate() const;
};

/// Seeded initial-condition scatter around the first plan leg.
struct InitialDispersion {
  double position_sigma{5.0};    // m, horizontal
  double heading_sigma{0.05};    // rad
  double airspeed_sigma{0.5};    // m/s
};

struct TrialConfig {
  std::string name{"pid"};
  std::string regime{"clean"};
  ControllerKind controller{ControllerKind::Pid};
  std::uint64_t seed{0};

  PlanParams plan;
  PlantConfig plant;
  AttitudeGains gains;
  PositionControllerConfig position;  // trim fields are filled from the plant trim
  double lookahead{30.0};
  double airspeed_scaling_min{10.0};  // floor on V in the rate-law airspeed ratios
  RcacConfig rcac;
  FailureConfig failure;
  LoopRates rates;
  InitialDispersion dispersion;
  double max_sim_time{2000.0};
  std::optional<std::size_t> dtw_band;

  void validate() const;
};

struct LogRow {
  double t{0.0};
  double north{0.0}, east{0.0}, alt{0.0};
  double phi{0.0}, theta{0.0}, psi{0.0};
  double p{0.0}, q{0.0}, r{0.0};
  ActuatorVector act;
  std::size_t failure_state_id{0};
};

struct FailureEvent {
  double t{0.0};
  std::size_t state_id{0};
  bool operator==(const FailureEvent&) const = default;
};

enum class TrialStatus { Completed, Timeout, Crashed, NumericalBreakdown };

std::string_view to_string(TrialStatus status);
TrialStatus trial_status_from_string(std::string_view s);

struct TrialRecord {
  std::string config;
  std::string regime;
  std::uint64_t seed{0};
  TrialStatus status{TrialStatus::Completed};
  std::string message;
  double sim_time{0.0};
  std::vector<LogRow> log;
  Trajectory flown;
  std::vector<FailureEvent> failure_log;
  std::optional<double> dtw_to_plan;
  std::optional<double> dtw_normalized;

  bool crashed() const {
    return status == TrialStatus::Crashed || status == TrialStatus::NumericalBreakdown;
  }
};

/// Per-tick view of the co-simulation.
struct TickInfo {
  long long tick{0};
  double t{0.0};
  AircraftState state;  // state at t, before the dynamics step
  ActuatorVector commanded;
  ActuatorVector applied;
  FailureState failure;
  bool switch_on{false};
};

/// Fixed-step co-simulation of one trial. Each step(): chain tick (every
/// 1/failure Hz, from t = 1 s) -> position loop -> attitude cascade
/// (+ RCAC) -> mixer -> failure injection -> plant step.
class Simulation {
 public:
  explicit Simulation(const TrialConfig& cfg);
  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  /// Advances one dynamics tick. Propagates CrashDetected / NonFinite /
  /// NumericalBreakdown.
  TickInfo step();

  bool done() const;
  bool mission_complete() const { return tracker_.finished(); }
  double time() const;
  long long tick() const { return tick_; }
  const AircraftState& state() const { return state_; }
  const FlightPlan& plan() const { return plan_; }
  const Trim& trim() const { return trim_; }
  const TransitionModel& model() const { return model_; }
  const std::vector<FailureEvent>& failure_log() const { return failure_log_; }
  const Setpoints& setpoints() const { return setpoints_; }

 private:
  void attitude_update(double dt);

  TrialConfig cfg_;
  FlightPlan plan_;
  Trim trim_;
  AircraftState state_;
  PlanTracker tracker_;
  PositionController position_;
  RateController rate_;
  std::array<RcacChannel, kRcacChannels> rcac_;
  TransitionModel model_;
  Rng chain_rng_;
  InjectorState injector_;
  OuterSetpoints outer_;
  Setpoints setpoints_;
  ActuatorVector commands_;
  std::vector<FailureEvent> failure_log_;
  long long tick_{0};
  int position_div_, attitude_div_, failure_div_;
};

/// Runs to plan completion, max_sim_time or crash; evaluates DTW of the
/// flown path against the plan resampled to the same length.
TrialRecord run_trial(const TrialConfig& cfg);

/// A named controller configuration in an ensemble.
struct EnsembleMember {
  std::string name;
  ControllerKind controller{ControllerKind::Pid};
  double alpha{1.0};
};

struct ExperimentConfig {
  TrialConfig base;
  std::vector<EnsembleMember> members;
  std::vector<std::string> regimes{"clean", "adverse"};
  std::vector<SwitchWindow> adverse_schedule{{0.0, 1e9}};
  std::uint64_t config_hash{0};
};

/// Trial config for a member / regime ("clean": switch never on,
/// "adverse": adverse_schedule) / seed.
TrialConfig make_trial_config(const ExperimentConfig& exp, const EnsembleMember& member,
                              const std::string& regime, std::uint64_t seed);

/// Runs the configs on up to `threads` worker threads; output is ordered
/// by (config, regime, seed) regardless of scheduling.
std::vector<TrialRecord> run_trials(const std::vector<TrialConfig>& configs, unsigned threads = 0);

struct EnsembleSummary {
  std::string config;
  std::string regime;
  std::size_t trials{0};
  std::size_t crashed{0};
  std::size_t incomplete{0};  // timed out before finishing the plan
  double mean{0.0};
  double stddev{0.0};  // n-1 denominator; 0 when fewer than 2 values
  bool degenerate{false};
  double min{0.0}, q1{0.0}, median{0.0}, q3{0.0}, max{0.0};
  std::vector<double> values;  // dtw_to_plan of non-crashed trials, by seed
  std::optional<double> self_similarity_mean;
  std::optional<double> self_similarity_std;
};

/// Quantile with linear interpolation between order statistics
/// (h = (n - 1) p). Input must be sorted and non-empty.
double quantile_sorted(const std::vector<double>& sorted, double p);

/// One summary per (config, regime), in first-appearance order. Clean
/// regimes get the mean pairwise DTW among their flown trajectories.
std::vector<EnsembleSummary> summarize(const std::vector<TrialRecord>& records,
                                       std::optional<std::size_t> band = std::nullopt);

struct EnsembleResult {
  std::vector<TrialRecord> records;
  std::vector<EnsembleSummary> summaries;
  std::vector<std::uint64_t> seeds;
};

/// Trial i of every member and regime uses seed seed_base + i.
EnsembleResult run_ensemble(const ExperimentConfig& exp, std::size_t n_trials,
                            std::uint64_t seed_base, unsigned threads = 0);

}  // namespace failbench
