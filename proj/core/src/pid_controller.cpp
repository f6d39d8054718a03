#include "failbench/pid_controller.hpp"

#include "failbench/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace failbench {

RateSetpoints rate_setpoints(double theta_s, double phi_s, double theta_m, double phi_m,
                             const AttitudeGains& gains) {
  return {gains.k_theta * (theta_s - theta_m), gains.k_phi * (phi_s - phi_m)};
}

double coordinated_turn_yaw_rate(double phi_s, double theta_s, double v_tas, double g,
                                 double v_min) {
  if (!(v_tas >= v_min)) throw AirspeedTooLow("coordinated turn: airspeed below minimum");
  return g * std::tan(phi_s) * std::cos(theta_s) / v_tas;
}

Vec3 euler_rates_to_body(double phi, double theta, const Vec3& euler_rates) {
  const double sphi = std::sin(phi), cphi = std::cos(phi);
  const double sth = std::sin(theta), cth = std::cos(theta);
  Eigen::Matrix3d m;
  m << 1.0, 0.0, sth,
       0.0, cphi, sphi * cth,
       0.0, -sphi, cphi * cth;
  return m * euler_rates;
}

Vec3 RateController::angular_accel_setpoint(const Vec3& omega_s, const Vec3& omega_m,
                                            double v_tas, double v_ias, double trim_tas,
                                            double trim_ias, double dt) {
  const Vec3 err = omega_s - omega_m;
  const double lim = gains_.integrator_limit;
  integrator_ = (integrator_ + dt * gains_.k_i.cwiseProduct(err)).cwiseMax(-lim).cwiseMin(lim);

  const double tas_scale = trim_tas / v_tas;
  const double ias_ratio = trim_ias / v_ias;
  return tas_scale * gains_.k_ff.cwiseProduct(omega_s) +
         ias_ratio * ias_ratio * (gains_.k_p.cwiseProduct(err) + integrator_);
}

OuterSetpoints PositionController::update(const GuidanceTarget& target,
                                          const AircraftState& state, double dt) {
  const Vec3 v_ned = state.ned_velocity();

  const double alt_err = target.altitude - state.altitude();
  alt_integral_ = std::clamp(alt_integral_ + cfg_.alt_ki * alt_err * dt, -cfg_.alt_int_limit,
                             cfg_.alt_int_limit);
  const double climb_rate = -v_ned.z();
  const double theta = cfg_.trim_theta + cfg_.alt_kp * alt_err + alt_integral_ -
                       cfg_.alt_kd * climb_rate;

  const double speed_err = target.airspeed - state.v_tas;
  speed_integral_ = std::clamp(speed_integral_ + cfg_.speed_ki * speed_err * dt,
                               -cfg_.speed_int_limit, cfg_.speed_int_limit);
  const double thrust = cfg_.trim_throttle + cfg_.speed_kp * speed_err + speed_integral_;

  OuterSetpoints out;
  out.theta = std::clamp(theta, -cfg_.pitch_limit, cfg_.pitch_limit);
  out.thrust = std::clamp(thrust, 0.0, 1.0);
  out.phi = lateral_bank(target.lookahead, state);
  return out;
}

double PositionController::lateral_bank(const Vec2& lookahead, const AircraftState& state) const {
  const Vec3 v_ned = state.ned_velocity();
  const double ground_speed = std::hypot(v_ned.x(), v_ned.y());
  const Vec2 to_target = lookahead - Vec2(state.pos.x(), state.pos.y());
  const double dist = to_target.norm();
  if (ground_speed < 1e-6 || dist < 1e-6) return 0.0;

  const double course = std::atan2(v_ned.y(), v_ned.x());
  const double bearing = std::atan2(to_target.y(), to_target.x());
  const double eta =
      std::clamp(wrap_pi(bearing - course), -std::numbers::pi / 2.0, std::numbers::pi / 2.0);
  const double a_lat = 2.0 * ground_speed * ground_speed * std::sin(eta) / dist;
  return std::clamp(std::atan(a_lat / cfg_.gravity), -cfg_.bank_limit, cfg_.bank_limit);
}

}  // namespace failbench
