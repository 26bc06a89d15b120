#pragma once

#include <optional>
#include <span>
#include <vector>

#include "egolex/parallel.hpp"

// One-dimensional flat-kernel mean shift.
//
// Duplicate values move identically, so the kernels operate on the sorted
// distinct values with multiplicities. The window around x is the open
// interval (x - h, x + h).
namespace egolex::meanshift {

inline constexpr double kDefaultQuantile = 0.3;
inline constexpr double kToleranceFactor = 1e-7;  // stop when |shift| < factor * h
inline constexpr int kMaxIterations = 500;

struct WeightedPoints {
  std::vector<double> values;   // strictly increasing
  std::vector<double> weights;  // multiplicities, > 0
  double total_weight = 0.0;

  static WeightedPoints from(std::span<const double> points);
};

struct Result {
  std::vector<int> labels;    // per input point, 0 = highest mode
  std::vector<double> modes;  // descending
  double bandwidth = 0.0;
  int iterations = 0;         // max over seeds
};

/// q-quantile (linear interpolation) of all pairwise |x_i - x_j|, i < j.
/// Falls back to the q-quantile of the strictly positive differences when
/// the first estimate is 0 and the points are not all equal. Returns 0 for
/// fewer than two points or all-equal points.
double estimate_bandwidth(std::span<const double> points, double quantile = kDefaultQuantile);

/// Moves every seed to its flat-kernel fixed point. Writes converged
/// positions to `out` and returns the largest iteration count.
int shift_seeds_serial(const WeightedPoints& pts, std::span<const double> seeds, double h,
                       std::span<double> out);
int shift_seeds_parallel(const WeightedPoints& pts, std::span<const double> seeds, double h,
                         std::span<double> out);

/// Clusters `points`. Without `bandwidth` it is estimated with `quantile`.
/// A zero bandwidth estimate yields a single cluster.
Result mean_shift_1d(std::span<const double> points, std::optional<double> bandwidth = std::nullopt,
                     double quantile = kDefaultQuantile, Exec exec = Exec::parallel);

}  // namespace egolex::meanshift
