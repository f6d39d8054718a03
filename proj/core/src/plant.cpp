#include "failbench/plant.hpp"

#include "failbench/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace failbench {

namespace {

constexpr double kMinAeroSpeed = 1e-3;

struct Vector12 {
  Vec3 pos, vel, att, rates;
};

StateDerivative derivative_raw(const AircraftState& s, const ActuatorVector& act,
                               const PlantConfig& cfg) {
  const BodyLoads loads = body_loads(s, act, cfg);
  const double phi = s.att.x(), theta = s.att.y();
  const double cphi = std::cos(phi), sphi = std::sin(phi);
  const double cth = std::cos(theta), sth = std::sin(theta);

  const Vec3 gravity_body = cfg.gravity * Vec3(-sth, sphi * cth, cphi * cth);
  const Vec3& w = s.rates;

  StateDerivative d;
  d.pos_dot = body_to_ned(s.att) * s.vel;
  d.vel_dot = loads.force / cfg.mass + gravity_body - w.cross(s.vel);

  const double p = w.x(), q = w.y(), r = w.z();
  d.att_dot = Vec3(p + (q * sphi + r * cphi) * sth / cth,
                   q * cphi - r * sphi,
                   (q * sphi + r * cphi) / cth);

  const Vec3& in = cfg.inertia;
  d.rates_dot = Vec3((loads.moment.x() - (in.z() - in.y()) * q * r) / in.x(),
                     (loads.moment.y() - (in.x() - in.z()) * r * p) / in.y(),
                     (loads.moment.z() - (in.y() - in.x()) * p * q) / in.z());
  return d;
}

bool finite(const StateDerivative& d) {
  return d.pos_dot.allFinite() && d.vel_dot.allFinite() && d.att_dot.allFinite() &&
         d.rates_dot.allFinite();
}

AircraftState offset(const AircraftState& s, const StateDerivative& d, double h) {
  AircraftState out = s;
  out.pos += h * d.pos_dot;
  out.vel += h * d.vel_dot;
  out.att += h * d.att_dot;
  out.rates += h * d.rates_dot;
  return out;
}

}  // namespace

void PlantConfig::validate() const {
  if (!(mass > 0.0)) throw InvalidArgument("plant: mass must be positive");
  if (!(inertia.array() > 0.0).all())
    throw InvalidArgument("plant: inertia entries must be positive");
  if (!(dt_dynamics > 0.0)) throw InvalidArgument("plant: dt_dynamics must be positive");
  if (!(trim_tas > 0.0) || !(trim_ias > 0.0))
    throw InvalidArgument("plant: trim airspeeds must be positive");
}

double PlantConfig::stall_speed() const {
  return std::sqrt(2.0 * mass * gravity / (air_density * wing_area * c_lift_max));
}

BodyLoads body_loads(const AircraftState& s, const ActuatorVector& act,
                     const PlantConfig& cfg) {
  BodyLoads loads;
  loads.force.x() = act.thr * cfg.max_thrust;

  const double speed = s.vel.norm();
  if (speed < kMinAeroSpeed) return loads;

  const double u = s.vel.x(), v = s.vel.y(), w = s.vel.z();
  const double alpha = std::atan2(w, u);
  const double beta = std::asin(std::clamp(v / speed, -1.0, 1.0));
  const double qbar_s = 0.5 * cfg.air_density * speed * speed * cfg.wing_area;

  const double p_hat = s.rates.x() * cfg.span / (2.0 * speed);
  const double q_hat = s.rates.y() * cfg.chord / (2.0 * speed);
  const double r_hat = s.rates.z() * cfg.span / (2.0 * speed);

  const double c_lift = cfg.c_lift_0 + cfg.c_lift_alpha * alpha + cfg.c_lift_q * q_hat;
  const double c_drag = cfg.c_drag_0 + cfg.c_drag_k * c_lift * c_lift;
  const double c_side = cfg.c_side_beta * beta + cfg.c_side_rud * act.rud;

  // Drag opposes the air-relative velocity; lift is normal to it in the
  // body x-z plane.
  const Vec3 v_hat = s.vel / speed;
  const double uw = std::hypot(u, w);
  const Vec3 lift_dir = uw > 0.0 ? Vec3(w / uw, 0.0, -u / uw) : Vec3::Zero();
  loads.force += qbar_s * (c_lift * lift_dir - c_drag * v_hat);
  loads.force.y() += qbar_s * c_side;

  const double c_roll = cfg.c_roll_beta * beta + cfg.c_roll_p * p_hat + cfg.c_roll_r * r_hat +
                        cfg.roll_per_ail_l * act.ail_l + cfg.roll_per_ail_r * act.ail_r +
                        cfg.roll_per_rud * act.rud;
  const double c_pitch = cfg.c_pitch_0 + cfg.c_pitch_alpha * alpha + cfg.c_pitch_q * q_hat +
                         cfg.pitch_per_ele * act.ele;
  const double c_yaw = cfg.c_yaw_beta * beta + cfg.c_yaw_p * p_hat + cfg.c_yaw_r * r_hat +
                       cfg.yaw_per_ail_l * act.ail_l + cfg.yaw_per_ail_r * act.ail_r +
                       cfg.yaw_per_rud * act.rud;
  loads.moment = qbar_s * Vec3(cfg.span * c_roll, cfg.chord * c_pitch, cfg.span * c_yaw);
  return loads;
}

StateDerivative state_derivative(const AircraftState& state, const ActuatorVector& act,
                                 const PlantConfig& cfg) {
  return derivative_raw(state, act.clamped(), cfg);
}

AircraftState step_dynamics(const AircraftState& state, const ActuatorVector& act,
                            const PlantConfig& cfg, double dt) {
  if (!(dt >= 0.0)) throw InvalidArgument("step_dynamics: dt must be non-negative");
  if (dt == 0.0) return state;

  const ActuatorVector a = act.clamped();
  const StateDerivative k1 = derivative_raw(state, a, cfg);
  const StateDerivative k2 = derivative_raw(offset(state, k1, 0.5 * dt), a, cfg);
  const StateDerivative k3 = derivative_raw(offset(state, k2, 0.5 * dt), a, cfg);
  const StateDerivative k4 = derivative_raw(offset(state, k3, dt), a, cfg);
  if (!finite(k1) || !finite(k2) || !finite(k3) || !finite(k4))
    throw NonFinite("step_dynamics: non-finite state derivative");

  const double h6 = dt / 6.0;
  AircraftState out = state;
  out.pos += h6 * (k1.pos_dot + 2.0 * k2.pos_dot + 2.0 * k3.pos_dot + k4.pos_dot);
  out.vel += h6 * (k1.vel_dot + 2.0 * k2.vel_dot + 2.0 * k3.vel_dot + k4.vel_dot);
  out.att += h6 * (k1.att_dot + 2.0 * k2.att_dot + 2.0 * k3.att_dot + k4.att_dot);
  out.rates += h6 * (k1.rates_dot + 2.0 * k2.rates_dot + 2.0 * k3.rates_dot + k4.rates_dot);
  out.att.x() = wrap_pi(out.att.x());
  out.att.z() = wrap_pi(out.att.z());
  out.t = state.t + dt;
  out.v_tas = out.vel.norm();
  out.v_ias = out.v_tas;

  if (!out.pos.allFinite() || !out.vel.allFinite() || !out.att.allFinite() ||
      !out.rates.allFinite())
    throw NonFinite("step_dynamics: non-finite state");
  if (std::abs(out.att.y()) >= std::numbers::pi / 2.0)
    throw CrashDetected("pitch attitude reached +/-90 deg");
  if (out.altitude() <= 0.0) throw CrashDetected("altitude reached ground level");
  return out;
}

double mechanical_energy(const AircraftState& s, const PlantConfig& cfg) {
  const double translational = 0.5 * cfg.mass * s.vel.squaredNorm();
  const double rotational = 0.5 * s.rates.dot(cfg.inertia.cwiseProduct(s.rates));
  return translational + rotational + cfg.mass * cfg.gravity * s.altitude();
}

namespace {

AircraftState level_state(double speed, double altitude, double theta) {
  AircraftState s;
  s.pos = Vec3(0.0, 0.0, -altitude);
  s.att = Vec3(0.0, theta, 0.0);
  s.vel = Vec3(speed * std::cos(theta), 0.0, speed * std::sin(theta));
  s.v_tas = speed;
  s.v_ias = speed;
  return s;
}

Eigen::Vector3d trim_residual(const PlantConfig& cfg, double speed, double altitude,
                              const Eigen::Vector3d& x) {
  const AircraftState s = level_state(speed, altitude, x(0));
  ActuatorVector act;
  act.ele = x(1);
  act.thr = x(2);
  const StateDerivative d = derivative_raw(s, act, cfg);
  return {d.vel_dot.x(), d.vel_dot.z(), d.rates_dot.y()};
}

}  // namespace

Trim compute_trim(const PlantConfig& cfg, double target_speed, double altitude) {
  cfg.validate();
  if (!(target_speed > cfg.stall_speed()))
    throw NoTrimFound("trim: target speed at or below stall speed");

  constexpr int kMaxIterations = 500;
  constexpr double kTolerance = 1e-11;
  constexpr double kFdStep = 1e-7;

  Eigen::Vector3d x(0.0, 0.0, 0.5);
  Eigen::Vector3d r = trim_residual(cfg, target_speed, altitude, x);
  int it = 0;
  for (; it < kMaxIterations && r.lpNorm<Eigen::Infinity>() > kTolerance; ++it) {
    Eigen::Matrix3d jac;
    for (int j = 0; j < 3; ++j) {
      Eigen::Vector3d xp = x, xm = x;
      xp(j) += kFdStep;
      xm(j) -= kFdStep;
      jac.col(j) = (trim_residual(cfg, target_speed, altitude, xp) -
                    trim_residual(cfg, target_speed, altitude, xm)) /
                   (2.0 * kFdStep);
    }
    const Eigen::Vector3d step = jac.fullPivLu().solve(-r);
    if (!step.allFinite()) break;

    // Damping: halve the step until the residual norm decreases.
    double lambda = 1.0;
    Eigen::Vector3d x_next = x + step;
    Eigen::Vector3d r_next = trim_residual(cfg, target_speed, altitude, x_next);
    while (r_next.norm() >= r.norm() && lambda > 1e-6) {
      lambda *= 0.5;
      x_next = x + lambda * step;
      r_next = trim_residual(cfg, target_speed, altitude, x_next);
    }
    x = x_next;
    r = r_next;
  }

  if (!r.allFinite() || r.lpNorm<Eigen::Infinity>() > 1e-6)
    throw NoTrimFound("trim: Newton iteration did not converge");
  if (x(2) < 0.0 || x(2) > 1.0 || std::abs(x(1)) > 1.0 ||
      std::abs(x(0)) >= std::numbers::pi / 2.0)
    throw NoTrimFound("trim: fixed point outside actuator or attitude range");

  Trim trim;
  trim.state = level_state(target_speed, altitude, x(0));
  trim.actuators.ele = x(1);
  trim.actuators.thr = x(2);
  trim.residual = r.lpNorm<Eigen::Infinity>();
  trim.iterations = it;
  return trim;
}

ActuatorVector mix(const Vec3& alpha_sp, double thrust_sp, const PlantConfig& cfg) {
  const double qbar_s = 0.5 * cfg.air_density * cfg.trim_tas * cfg.trim_tas * cfg.wing_area;
  const double roll_eff =
      qbar_s * cfg.span * (cfg.roll_per_ail_l - cfg.roll_per_ail_r) / cfg.inertia.x();
  const double pitch_eff = qbar_s * cfg.chord * cfg.pitch_per_ele / cfg.inertia.y();
  const double yaw_eff = qbar_s * cfg.span * cfg.yaw_per_rud / cfg.inertia.z();

  const double roll = alpha_sp.x() / roll_eff;
  ActuatorVector out;
  out.ail_l = roll;
  out.ail_r = -roll;
  out.ele = alpha_sp.y() / pitch_eff;
  out.rud = alpha_sp.z() / yaw_eff;
  out.thr = thrust_sp;
  return out.clamped();
}

}  // namespace failbench
