#pragma once

#include "failbench/types.hpp"

namespace failbench {

/// The eleven tunable attitude gains plus the rate-integrator clamp.
struct AttitudeGains {
  double k_theta{4.0};
  double k_phi{4.0};
  Vec3 k_ff{22.0, 7.0, 3.0};
  Vec3 k_p{20.0, 20.0, 8.0};
  Vec3 k_i{4.0, 4.0, 2.0};
  double integrator_limit{0.4};  // rad/s^2, per axis
};

struct Setpoints {
  double thrust{0.0};
  double theta{0.0};
  double phi{0.0};
  double theta_dot{0.0};
  double phi_dot{0.0};
  double psi_dot{0.0};
  Vec3 omega{Vec3::Zero()};
  Vec3 alpha{Vec3::Zero()};
};

struct RateSetpoints {
  double theta_dot{0.0};
  double phi_dot{0.0};
};

RateSetpoints rate_setpoints(double theta_s, double phi_s, double theta_m, double phi_m,
                             const AttitudeGains& gains);

inline constexpr double kDefaultMinAirspeed = 3.0;

/// psi_dot = g tan(phi) cos(theta) / V. Throws AirspeedTooLow below v_min.
double coordinated_turn_yaw_rate(double phi_s, double theta_s, double v_tas, double g,
                                 double v_min = kDefaultMinAirspeed);

/// Maps (phi_dot, theta_dot, psi_dot) to body rates with
///   [1    0          sin(theta)         ]
///   [0    cos(phi)   sin(phi) cos(theta)]
///   [0   -sin(phi)   cos(phi) cos(theta)]
Vec3 euler_rates_to_body(double phi, double theta, const Vec3& euler_rates);

/// Feedforward + PI body-rate law producing angular-acceleration setpoints.
/// Owns the per-axis integrator; one instance per trial.
class RateController {
 public:
  RateController() = default;
  explicit RateController(const AttitudeGains& gains) : gains_(gains) {}

  /// alpha = (Vt_trim / Vt) k_ff omega_s + (Vi_trim / Vi)^2 (k_p e + I),
  /// e = omega_s - omega_m, I = clamp(I + k_i e dt).
  Vec3 angular_accel_setpoint(const Vec3& omega_s, const Vec3& omega_m, double v_tas,
                              double v_ias, double trim_tas, double trim_ias, double dt);

  const Vec3& integrator() const { return integrator_; }
  const AttitudeGains& gains() const { return gains_; }
  void reset() { integrator_.setZero(); }

 private:
  AttitudeGains gains_;
  Vec3 integrator_{Vec3::Zero()};
};

/// Outer-loop stand-in: PI altitude hold to pitch, PI airspeed hold to
/// throttle, pure-pursuit lateral guidance to roll.
struct PositionControllerConfig {
  double trim_theta{0.0};
  double trim_throttle{0.5};
  double alt_kp{0.03};        // rad/m
  double alt_ki{0.003};       // rad/(m s)
  double alt_kd{0.06};        // rad/(m/s), climb-rate damping
  double alt_int_limit{0.15};  // rad
  double speed_kp{0.08};       // 1/(m/s)
  double speed_ki{0.02};
  double speed_int_limit{0.3};
  double pitch_limit{0.35};    // rad
  double bank_limit{0.8726646259971648};  // 50 deg
  double gravity{9.80665};
};

struct GuidanceTarget {
  Vec2 lookahead{Vec2::Zero()};  // (north, east)
  double altitude{0.0};
  double airspeed{0.0};
};

struct OuterSetpoints {
  double thrust{0.0};
  double theta{0.0};
  double phi{0.0};
};

class PositionController {
 public:
  PositionController() = default;
  explicit PositionController(const PositionControllerConfig& cfg) : cfg_(cfg) {}

  OuterSetpoints update(const GuidanceTarget& target, const AircraftState& state, double dt);

  /// Bank angle from pure pursuit toward `lookahead`; positive is a right turn.
  double lateral_bank(const Vec2& lookahead, const AircraftState& state) const;

  const PositionControllerConfig& config() const { return cfg_; }

 private:
  PositionControllerConfig cfg_;
  double alt_integral_{0.0};
  double speed_integral_{0.0};
};

}  // namespace failbench
