#include "failbench/mission.hpp"

#include "failbench/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "csv_format.hpp"

namespace failbench {

std::vector<Vec2> hilbert(int order) {
  if (order <= 0) return {Vec2::Zero()};
  const std::vector<Vec2> prev = hilbert(order - 1);
  const std::size_t n = prev.size();
  std::vector<Vec2> out(4 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const double xx = prev[i].x(), yy = prev[i].y();
    out[i] = 0.5 * Vec2(-0.5 + yy, -0.5 + xx);
    out[n + i] = 0.5 * Vec2(-0.5 + xx, 0.5 + yy);
    out[2 * n + i] = 0.5 * Vec2(0.5 + xx, 0.5 + yy);
    out[3 * n + i] = 0.5 * Vec2(0.5 - yy, -0.5 - xx);
  }
  return out;
}

void FlightPlan::validate() const {
  if (waypoints.size() < 2) throw InvalidArgument("flight plan needs at least 2 waypoints");
  for (std::size_t i = 1; i < waypoints.size(); ++i) {
    if (waypoints[i] == waypoints[i - 1])
      throw InvalidArgument("flight plan has repeated consecutive waypoints");
    if (waypoints[i].z() != waypoints[0].z())
      throw InvalidArgument("flight plan altitude must be constant");
  }
}

double FlightPlan::length() const {
  double len = 0.0;
  for (std::size_t i = 1; i < waypoints.size(); ++i)
    len += (waypoints[i] - waypoints[i - 1]).norm();
  return len;
}

FlightPlan build_flight_plan(const PlanParams& params) {
  if (!(params.quadrant_size > 0.0)) throw InvalidArgument("quadrant size must be positive");
  if (params.orders.empty()) throw InvalidArgument("at least one curve order is required");

  // Quadrant centers as (north, east) offsets: SW, SE, NE, NW.
  const double h = 0.5 * params.quadrant_size;
  const std::array<Vec2, 4> centers{Vec2(-h, -h), Vec2(-h, h), Vec2(h, h), Vec2(h, -h)};

  FlightPlan plan;
  plan.cruise_speed = params.speed;
  plan.acceptance_radius = params.acceptance_radius;
  for (std::size_t q = 0; q < params.orders.size(); ++q) {
    const Vec2 c = params.origin + centers[q % 4];
    for (const Vec2& p : hilbert(params.orders[q])) {
      const Vec3 wp(c.x() + params.quadrant_size * p.y(), c.y() + params.quadrant_size * p.x(),
                    params.altitude);
      if (plan.waypoints.empty() || plan.waypoints.back() != wp) plan.waypoints.push_back(wp);
    }
  }
  return plan;
}

void write_plan_csv(std::ostream& out, const FlightPlan& plan) {
  out << "t_index,north,east,alt\n";
  for (std::size_t i = 0; i < plan.waypoints.size(); ++i) {
    const Vec3& w = plan.waypoints[i];
    out << i << ',' << detail::fmt(w.x()) << ',' << detail::fmt(w.y()) << ','
        << detail::fmt(w.z()) << '\n';
  }
}

FlightPlan read_plan_csv(std::istream& in, double cruise_speed, double acceptance_radius) {
  FlightPlan plan;
  plan.cruise_speed = cruise_speed;
  plan.acceptance_radius = acceptance_radius;
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("plan csv: empty input");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<double> f = detail::parse_doubles(line);
    if (f.size() < 4) throw InvalidArgument("plan csv: expected 4 columns");
    plan.waypoints.emplace_back(f[1], f[2], f[3]);
  }
  plan.validate();
  return plan;
}

PlanTracker::PlanTracker(const FlightPlan& plan, double lookahead_distance)
    : plan_(&plan), lookahead_(lookahead_distance) {
  plan.validate();
}

GuidanceTarget PlanTracker::update(const Vec3& ned_position) {
  const auto& wps = plan_->waypoints;
  const std::size_t last_leg = wps.size() - 2;
  const Vec2 p(ned_position.x(), ned_position.y());

  auto projection = [&](std::size_t leg) {
    const Vec2 a = wps[leg].head<2>(), b = wps[leg + 1].head<2>();
    const Vec2 ab = b - a;
    return (p - a).dot(ab) / ab.squaredNorm();
  };
  auto leg_done = [&](std::size_t leg) {
    const Vec2 b = wps[leg + 1].head<2>();
    return projection(leg) >= 1.0 || (p - b).norm() < plan_->acceptance_radius;
  };

  while (!finished_ && leg_done(leg_)) {
    if (leg_ == last_leg) {
      finished_ = true;
    } else {
      ++leg_;
    }
  }

  // Walk `lookahead_` meters along the path from the projection point.
  std::size_t leg = leg_;
  const Vec2 a = wps[leg].head<2>(), b = wps[leg + 1].head<2>();
  Vec2 cursor = a + std::clamp(projection(leg), 0.0, 1.0) * (b - a);
  double remaining = lookahead_;
  while (true) {
    const Vec2 end = wps[leg + 1].head<2>();
    const double d = (end - cursor).norm();
    if (d >= remaining || leg == last_leg) {
      cursor = d > 0.0 ? Vec2(cursor + std::min(remaining, d) / d * (end - cursor)) : end;
      break;
    }
    remaining -= d;
    cursor = end;
    ++leg;
  }

  GuidanceTarget target;
  target.lookahead = cursor;
  target.altitude = wps[leg_ + 1].z();
  target.airspeed = plan_->cruise_speed;
  return target;
}

}  // namespace failbench
