#include "failbench/evaluate.hpp"

#include "failbench/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace failbench {

std::vector<Vec3> Trajectory::points() const {
  std::vector<Vec3> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.p);
  return out;
}

void Trajectory::validate() const {
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!std::isfinite(samples[i].t) || !samples[i].p.allFinite())
      throw InvalidArgument("trajectory has non-finite samples");
    if (i > 0 && !(samples[i].t > samples[i - 1].t))
      throw InvalidArgument("trajectory time must be strictly increasing");
  }
}

Trajectory plan_trajectory(const FlightPlan& plan) {
  Trajectory traj;
  traj.source = TrajectorySource::Plan;
  double s = 0.0;
  for (std::size_t i = 0; i < plan.waypoints.size(); ++i) {
    if (i > 0) s += (plan.waypoints[i] - plan.waypoints[i - 1]).norm();
    traj.samples.push_back({s / plan.cruise_speed, plan.waypoints[i]});
  }
  return traj;
}

Trajectory resample(const Trajectory& plan, std::size_t n_out) {
  const auto& in = plan.samples;
  if (in.size() < 2 || n_out < 2)
    throw InvalidArgument("resample needs >= 2 input samples and n_out >= 2");

  std::vector<double> arc(in.size(), 0.0);
  for (std::size_t i = 1; i < in.size(); ++i) arc[i] = arc[i - 1] + (in[i].p - in[i - 1].p).norm();
  const double total = arc.back();
  if (!(total > 0.0)) throw DegeneratePlan("resample: plan has zero arc length");

  Trajectory out;
  out.source = plan.source;
  out.samples.reserve(n_out);
  std::size_t seg = 0;
  for (std::size_t k = 0; k < n_out; ++k) {
    if (k == 0) {
      out.samples.push_back(in.front());
      continue;
    }
    if (k == n_out - 1) {
      out.samples.push_back(in.back());
      continue;
    }
    const double target = total * static_cast<double>(k) / static_cast<double>(n_out - 1);
    while (seg + 2 < in.size() && arc[seg + 1] < target) ++seg;
    const double len = arc[seg + 1] - arc[seg];
    const double f = len > 0.0 ? (target - arc[seg]) / len : 0.0;
    TrajectorySample s;
    s.t = in[seg].t + f * (in[seg + 1].t - in[seg].t);
    s.p = in[seg].p + f * (in[seg + 1].p - in[seg].p);
    out.samples.push_back(s);
  }
  return out;
}

DtwResult dtw(std::span<const Vec3> x, std::span<const Vec3> y, std::optional<std::size_t> band) {
  if (x.empty() || y.empty()) throw EmptyInput("dtw: empty input sequence");
  const std::size_t m = x.size(), n = y.size();
  const std::size_t width =
      band ? std::max(*band, m > n ? m - n : n - m) : std::max(m, n);
  constexpr double kInf = std::numeric_limits<double>::infinity();

  // Rolling rows over the (m+1) x (n+1) table; column 0 / row 0 are the
  // infinite boundary except cell (0, 0).
  std::vector<double> prev(n + 1, kInf), cur(n + 1, kInf);
  std::vector<std::size_t> prev_len(n + 1, 0), cur_len(n + 1, 0);
  prev[0] = 0.0;
  for (std::size_t i = 1; i <= m; ++i) {
    std::fill(cur.begin(), cur.end(), kInf);
    std::fill(cur_len.begin(), cur_len.end(), 0);
    const std::size_t j_lo = i > width ? i - width : 1;
    const std::size_t j_hi = std::min(n, i + width);
    for (std::size_t j = std::max<std::size_t>(j_lo, 1); j <= j_hi; ++j) {
      // Ties prefer the diagonal, then the shorter path.
      double best = prev[j - 1];
      std::size_t best_len = prev_len[j - 1];
      if (prev[j] < best || (prev[j] == best && prev_len[j] < best_len)) {
        best = prev[j];
        best_len = prev_len[j];
      }
      if (cur[j - 1] < best || (cur[j - 1] == best && cur_len[j - 1] < best_len)) {
        best = cur[j - 1];
        best_len = cur_len[j - 1];
      }
      if (best == kInf) continue;
      cur[j] = (x[i - 1] - y[j - 1]).norm() + best;
      cur_len[j] = best_len + 1;
    }
    std::swap(prev, cur);
    std::swap(prev_len, cur_len);
  }

  DtwResult res;
  res.distance = prev[n];
  res.path_length = prev_len[n];
  res.normalized = res.path_length > 0 ? res.distance / static_cast<double>(res.path_length) : 0.0;
  return res;
}

double dtw_distance(const Trajectory& x, const Trajectory& y, std::optional<std::size_t> band) {
  const auto px = x.points();
  const auto py = y.points();
  return dtw(px, py, band).distance;
}

}  // namespace failbench
