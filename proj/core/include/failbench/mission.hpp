#pragma once

#include "failbench/pid_controller.hpp"
#include "failbench/types.hpp"

#include <cstddef>
#include <iosfwd>
#include <vector>

namespace failbench {

/// Hilbert curve of the given order in [-0.5, 0.5]^2, 4^n points.
/// Order <= 0 yields the single point (0, 0).
std::vector<Vec2> hilbert(int order);

struct FlightPlan {
  std::vector<Vec3> waypoints;  // (north, east, altitude) in meters
  double cruise_speed{15.0};
  double acceptance_radius{10.0};

  /// Throws InvalidArgument unless there are >= 2 waypoints, consecutive
  /// waypoints differ and altitude is constant.
  void validate() const;
  double length() const;
};

struct PlanParams {
  std::vector<int> orders{1, 2, 3, 4};
  double quadrant_size{400.0};
  Vec2 origin{Vec2::Zero()};  // (north, east) of the 2x2 grid center
  double altitude{100.0};
  double speed{15.0};
  double acceptance_radius{10.0};
};

/// Curves laid out on a 2x2 quadrant grid, traversed SW -> SE -> NE -> NW
/// (one order per quadrant, cycling if more than four orders are given).
/// Curve x maps to east and y to north.
FlightPlan build_flight_plan(const PlanParams& params);

/// CSV with header `t_index,north,east,alt`.
void write_plan_csv(std::ostream& out, const FlightPlan& plan);
FlightPlan read_plan_csv(std::istream& in, double cruise_speed = 15.0,
                         double acceptance_radius = 10.0);

/// Sequences plan legs and produces the pure-pursuit lookahead point.
/// A leg is complete once the along-track projection passes its end or the
/// aircraft comes within the acceptance radius of its end waypoint.
class PlanTracker {
 public:
  PlanTracker(const FlightPlan& plan, double lookahead_distance);

  GuidanceTarget update(const Vec3& ned_position);

  bool finished() const { return finished_; }
  std::size_t leg() const { return leg_; }

 private:
  const FlightPlan* plan_;
  double lookahead_;
  std::size_t leg_{0};
  bool finished_{false};
};

}  // namespace failbench
