#pragma once

#include "failbench/mission.hpp"
#include "failbench/types.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace failbench {

enum class TrajectorySource { Plan, Flown };

struct TrajectorySample {
  double t{0.0};
  Vec3 p{Vec3::Zero()};  // (north, east, altitude)
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  TrajectorySource source{TrajectorySource::Flown};

  std::vector<Vec3> points() const;
  /// Throws InvalidArgument unless t is strictly increasing and finite.
  void validate() const;
};

/// Plan as a trajectory; t is arc length divided by the cruise speed.
Trajectory plan_trajectory(const FlightPlan& plan);

/// Arc-length-uniform linear resampling to n_out samples (t is interpolated
/// the same way). Throws DegeneratePlan on zero length, InvalidArgument on
/// fewer than 2 samples.
Trajectory resample(const Trajectory& plan, std::size_t n_out);

struct DtwResult {
  double distance{0.0};     // sum of Euclidean distances along the warping path
  double normalized{0.0};   // distance / path length
  std::size_t path_length{0};
};

/// Full dynamic-programming DTW with Euclidean point distance. With `band`,
/// cells with |i - j| > max(band, |m - n|) are excluded (Sakoe-Chiba).
/// Throws EmptyInput.
DtwResult dtw(std::span<const Vec3> x, std::span<const Vec3> y,
              std::optional<std::size_t> band = std::nullopt);

double dtw_distance(const Trajectory& x, const Trajectory& y,
                    std::optional<std::size_t> band = std::nullopt);

}  // namespace failbench
