#include "failbench/types.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace failbench {

double& ActuatorVector::operator[](Actuator a) {
  switch (a) {
    case Actuator::AilL: return ail_l;
    case Actuator::AilR: return ail_r;
    case Actuator::Ele: return ele;
    case Actuator::Thr: return thr;
    case Actuator::Rud: return rud;
  }
  return rud;
}

double ActuatorVector::operator[](Actuator a) const {
  return const_cast<ActuatorVector&>(*this)[a];
}

ActuatorVector ActuatorVector::clamped() const {
  return {std::clamp(ail_l, -1.0, 1.0), std::clamp(ail_r, -1.0, 1.0),
          std::clamp(ele, -1.0, 1.0), std::clamp(thr, 0.0, 1.0),
          std::clamp(rud, -1.0, 1.0)};
}

Eigen::Matrix3d body_to_ned(const Vec3& att) {
  const double cphi = std::cos(att.x()), sphi = std::sin(att.x());
  const double cth = std::cos(att.y()), sth = std::sin(att.y());
  const double cpsi = std::cos(att.z()), spsi = std::sin(att.z());
  Eigen::Matrix3d r;
  r << cth * cpsi, sphi * sth * cpsi - cphi * spsi, cphi * sth * cpsi + sphi * spsi,
      cth * spsi, sphi * sth * spsi + cphi * cpsi, cphi * sth * spsi - sphi * cpsi,
      -sth, sphi * cth, cphi * cth;
  return r;
}

Vec3 AircraftState::ned_velocity() const { return body_to_ned(att) * vel; }

double wrap_pi(double angle) {
  constexpr double kPi = std::numbers::pi;
  if (angle > kPi || angle <= -kPi) {
    angle = std::remainder(angle, 2.0 * kPi);
    if (angle <= -kPi) angle += 2.0 * kPi;
  }
  return angle;
}

}  // namespace failbench
