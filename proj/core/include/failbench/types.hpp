#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <string_view>

namespace failbench {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

enum class Actuator : std::uint8_t { AilL = 0, AilR = 1, Ele = 2, Thr = 3, Rud = 4 };

inline constexpr std::size_t kActuatorCount = 5;

inline constexpr std::array<Actuator, kActuatorCount> kActuators{
    Actuator::AilL, Actuator::AilR, Actuator::Ele, Actuator::Thr, Actuator::Rud};

inline constexpr std::array<std::string_view, kActuatorCount> kActuatorNames{
    "AIL-L", "AIL-R", "ELE", "THR", "RUD"};

constexpr std::uint8_t actuator_bit(Actuator a) {
  return static_cast<std::uint8_t>(1u << static_cast<unsigned>(a));
}

/// Surface and throttle commands. Surfaces are normalized to [-1, 1],
/// throttle to [0, 1].
struct ActuatorVector {
  double ail_l{0.0};
  double ail_r{0.0};
  double ele{0.0};
  double thr{0.0};
  double rud{0.0};

  double& operator[](Actuator a);
  double operator[](Actuator a) const;

  ActuatorVector clamped() const;

  bool operator==(const ActuatorVector&) const = default;
};

/// Rigid-body state. Position is NED, velocity and rates are body frame,
/// attitude is (roll, pitch, yaw).
struct AircraftState {
  double t{0.0};
  Vec3 pos{Vec3::Zero()};
  Vec3 vel{Vec3::Zero()};
  Vec3 att{Vec3::Zero()};
  Vec3 rates{Vec3::Zero()};
  double v_tas{0.0};
  double v_ias{0.0};

  double altitude() const { return -pos.z(); }
  double roll() const { return att.x(); }
  double pitch() const { return att.y(); }
  double yaw() const { return att.z(); }

  /// Velocity in the NED frame.
  Vec3 ned_velocity() const;

  bool operator==(const AircraftState& o) const {
    return t == o.t && pos == o.pos && vel == o.vel && att == o.att &&
           rates == o.rates && v_tas == o.v_tas && v_ias == o.v_ias;
  }
};

/// Body-to-NED rotation for the given roll/pitch/yaw.
Eigen::Matrix3d body_to_ned(const Vec3& att);

double wrap_pi(double angle);

}  // namespace failbench
