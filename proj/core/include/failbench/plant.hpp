#pragma once

#include "failbench/types.hpp"

namespace failbench {

/// Small fixed-wing airframe with a linear stability/control-derivative
/// aero model. Control derivatives are per unit of normalized deflection.
struct PlantConfig {
  double mass{2.5};
  Vec3 inertia{0.12, 0.15, 0.25};  // diag(Ixx, Iyy, Izz)
  double wing_area{0.4};
  double span{1.8};
  double chord{0.22};
  double air_density{1.225};
  double gravity{9.80665};

  // lift / drag / side force
  double c_lift_0{0.25};
  double c_lift_alpha{4.8};
  double c_lift_q{4.0};
  double c_lift_max{1.2};  // only sets the stall speed used by the trim precondition
  double c_drag_0{0.03};
  double c_drag_k{0.049};
  double c_side_beta{-0.5};
  double c_side_rud{-0.05};

  // roll
  double c_roll_beta{-0.08};
  double c_roll_p{-0.45};
  double c_roll_r{0.1};
  double roll_per_ail_l{0.08};
  double roll_per_ail_r{-0.08};
  double roll_per_rud{0.005};

  // pitch
  double c_pitch_0{0.0325};
  double c_pitch_alpha{-0.8};
  double c_pitch_q{-12.0};
  double pitch_per_ele{0.35};

  // yaw
  double c_yaw_beta{0.08};
  double c_yaw_p{-0.03};
  double c_yaw_r{-0.12};
  double yaw_per_ail_l{-0.006};
  double yaw_per_ail_r{0.006};
  double yaw_per_rud{0.05};

  double max_thrust{12.0};

  double dt_dynamics{0.004};
  double trim_tas{15.0};
  double trim_ias{15.0};

  /// Throws InvalidArgument when mass, inertia or dt is not positive.
  void validate() const;

  double stall_speed() const;
};

/// Body-frame force and moment acting on the airframe.
struct BodyLoads {
  Vec3 force{Vec3::Zero()};
  Vec3 moment{Vec3::Zero()};
};

struct StateDerivative {
  Vec3 pos_dot{Vec3::Zero()};
  Vec3 vel_dot{Vec3::Zero()};  // body-frame acceleration
  Vec3 att_dot{Vec3::Zero()};
  Vec3 rates_dot{Vec3::Zero()};
};

BodyLoads body_loads(const AircraftState& state, const ActuatorVector& act,
                     const PlantConfig& cfg);

StateDerivative state_derivative(const AircraftState& state,
                                 const ActuatorVector& act,
                                 const PlantConfig& cfg);

/// Advances the state by dt with one RK4 step. Actuators are clamped first.
/// Throws NonFinite on a non-finite derivative and CrashDetected when the
/// result has |pitch| >= pi/2 or altitude <= 0.
AircraftState step_dynamics(const AircraftState& state, const ActuatorVector& act,
                            const PlantConfig& cfg, double dt);

/// Translational + rotational kinetic energy plus potential energy.
double mechanical_energy(const AircraftState& state, const PlantConfig& cfg);

struct Trim {
  AircraftState state;
  ActuatorVector actuators;
  double residual{0.0};
  int iterations{0};
};

/// Straight-and-level fixed point at the given true airspeed, found by damped
/// Newton iteration on (pitch, elevator, throttle). Throws NoTrimFound.
Trim compute_trim(const PlantConfig& cfg, double target_speed, double altitude);

/// Linear control allocation from angular-acceleration demand (rad/s^2) to
/// surface deflections, using control effectiveness at the trim airspeed.
ActuatorVector mix(const Vec3& alpha_sp, double thrust_sp, const PlantConfig& cfg);

}  // namespace failbench
