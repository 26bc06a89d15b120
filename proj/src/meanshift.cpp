#include "egolex/meanshift.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "egolex/error.hpp"

namespace egolex::meanshift {
namespace {

// Half-open index range of values inside (x - h, x + h).
std::pair<std::size_t, std::size_t> window(const WeightedPoints& pts, double x, double h) {
  const auto lo = std::upper_bound(pts.values.begin(), pts.values.end(), x - h);
  const auto hi = std::lower_bound(lo, pts.values.end(), x + h);
  return {static_cast<std::size_t>(lo - pts.values.begin()),
          static_cast<std::size_t>(hi - pts.values.begin())};
}

double window_weight(const WeightedPoints& pts, double x, double h) {
  auto [lo, hi] = window(pts, x, h);
  double w = 0.0;
  for (auto i = lo; i < hi; ++i) w += pts.weights[i];
  return w;
}

int shift_one(const WeightedPoints& pts, double seed, double h, double& out) {
  const double tol = kToleranceFactor * h;
  double x = seed;
  int it = 0;
  while (it < kMaxIterations) {
    ++it;
    auto [lo, hi] = window(pts, x, h);
    if (lo == hi) break;
    double sw = 0.0;
    double swx = 0.0;
    for (auto i = lo; i < hi; ++i) {
      sw += pts.weights[i];
      swx += pts.weights[i] * pts.values[i];
    }
    const double next = swx / sw;
    const double shift = std::abs(next - x);
    x = next;
    if (shift < tol) break;
  }
  out = x;
  return it;
}

// Weighted order statistic: element at rank `k` (0-based) of the expanded list.
double weighted_rank(const std::vector<std::pair<double, double>>& sorted, double k) {
  double cum = 0.0;
  for (const auto& [value, weight] : sorted) {
    cum += weight;
    if (k < cum) return value;
  }
  return sorted.back().first;
}

double pair_quantile(const std::vector<std::pair<double, double>>& diffs, double quantile) {
  double total = 0.0;
  for (const auto& d : diffs) total += d.second;
  if (total <= 0.0) return 0.0;
  const double pos = quantile * (total - 1.0);
  const double lo_rank = std::floor(pos);
  const double frac = pos - lo_rank;
  const double a = weighted_rank(diffs, lo_rank);
  const double b = frac > 0.0 ? weighted_rank(diffs, lo_rank + 1.0) : a;
  return a + (b - a) * frac;
}

}  // namespace

WeightedPoints WeightedPoints::from(std::span<const double> points) {
  std::vector<double> sorted(points.begin(), points.end());
  std::sort(sorted.begin(), sorted.end());
  WeightedPoints wp;
  for (double v : sorted) {
    if (!wp.values.empty() && wp.values.back() == v) {
      wp.weights.back() += 1.0;
    } else {
      wp.values.push_back(v);
      wp.weights.push_back(1.0);
    }
  }
  wp.total_weight = static_cast<double>(sorted.size());
  return wp;
}

double estimate_bandwidth(std::span<const double> points, double quantile) {
  if (!(quantile >= 0.0 && quantile <= 1.0)) throw DataError("bandwidth quantile must be in [0,1]");
  const WeightedPoints wp = WeightedPoints::from(points);
  if (wp.values.size() < 2) return 0.0;
  // (difference, number of pairs) with exact integer pair counts.
  std::vector<std::pair<double, double>> diffs;
  double zero_pairs = 0.0;
  for (double m : wp.weights) zero_pairs += m * (m - 1.0) / 2.0;
  for (std::size_t i = 0; i < wp.values.size(); ++i) {
    for (std::size_t j = i + 1; j < wp.values.size(); ++j) {
      diffs.emplace_back(wp.values[j] - wp.values[i], wp.weights[i] * wp.weights[j]);
    }
  }
  std::sort(diffs.begin(), diffs.end());
  std::vector<std::pair<double, double>> with_zeros;
  with_zeros.reserve(diffs.size() + 1);
  if (zero_pairs > 0.0) with_zeros.emplace_back(0.0, zero_pairs);
  with_zeros.insert(with_zeros.end(), diffs.begin(), diffs.end());
  const double h = pair_quantile(with_zeros, quantile);
  if (h > 0.0) return h;
  return pair_quantile(diffs, quantile);
}

int shift_seeds_serial(const WeightedPoints& pts, std::span<const double> seeds, double h,
                       std::span<double> out) {
  int max_it = 0;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    max_it = std::max(max_it, shift_one(pts, seeds[i], h, out[i]));
  }
  return max_it;
}

int shift_seeds_parallel(const WeightedPoints& pts, std::span<const double> seeds, double h,
                         std::span<double> out) {
  int max_it = 0;
  const auto n = static_cast<std::ptrdiff_t>(seeds.size());
#pragma omp parallel for schedule(static) reduction(max : max_it)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    max_it = std::max(max_it, shift_one(pts, seeds[i], h, out[i]));
  }
  return max_it;
}

Result mean_shift_1d(std::span<const double> points, std::optional<double> bandwidth, double quantile,
                     Exec exec) {
  if (points.empty()) throw DataError("mean shift needs at least one point");
  if (bandwidth && !(*bandwidth > 0.0)) throw DataError("bandwidth must be positive");
  for (double p : points) {
    if (!std::isfinite(p)) throw DataError("mean shift points must be finite");
  }
  const WeightedPoints wp = WeightedPoints::from(points);
  Result res;
  res.bandwidth = bandwidth ? *bandwidth : estimate_bandwidth(points, quantile);

  if (res.bandwidth <= 0.0 || wp.values.size() == 1) {
    // All points equal, or no usable scale: one cluster at the mean.
    double mean = 0.0;
    for (std::size_t i = 0; i < wp.values.size(); ++i) mean += wp.values[i] * wp.weights[i];
    res.modes = {mean / wp.total_weight};
    res.labels.assign(points.size(), 0);
    return res;
  }

  const double h = res.bandwidth;
  std::vector<double> converged(wp.values.size());
  res.iterations = exec == Exec::serial ? shift_seeds_serial(wp, wp.values, h, converged)
                                        : shift_seeds_parallel(wp, wp.values, h, converged);

  // Rank candidate modes by window population, suppress near duplicates.
  struct Candidate {
    double pos;
    double intensity;
  };
  std::vector<Candidate> cands;
  cands.reserve(converged.size());
  for (double c : converged) cands.push_back({c, window_weight(wp, c, h)});
  std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    return a.intensity != b.intensity ? a.intensity > b.intensity : a.pos > b.pos;
  });
  std::vector<double> kept;
  for (const auto& c : cands) {
    const bool near = std::any_of(kept.begin(), kept.end(),
                                  [&](double k) { return std::abs(k - c.pos) < h; });
    if (!near) kept.push_back(c.pos);
  }
  std::sort(kept.begin(), kept.end(), std::greater<>());

  // Nearest kept mode; equidistant points go to the higher mode.
  auto nearest = [&](double v) {
    std::size_t best = 0;
    double best_d = std::abs(v - kept[0]);
    for (std::size_t k = 1; k < kept.size(); ++k) {
      const double d = std::abs(v - kept[k]);
      if (d < best_d) {
        best = k;
        best_d = d;
      }
    }
    return best;
  };
  std::vector<std::size_t> value_label(wp.values.size());
  std::vector<bool> used(kept.size(), false);
  for (std::size_t i = 0; i < wp.values.size(); ++i) {
    value_label[i] = nearest(wp.values[i]);
    used[value_label[i]] = true;
  }
  std::vector<int> remap(kept.size(), -1);
  for (std::size_t k = 0; k < kept.size(); ++k) {
    if (used[k]) {
      remap[k] = static_cast<int>(res.modes.size());
      res.modes.push_back(kept[k]);
    }
  }
  res.labels.reserve(points.size());
  for (double p : points) {
    const auto idx = static_cast<std::size_t>(
        std::lower_bound(wp.values.begin(), wp.values.end(), p) - wp.values.begin());
    res.labels.push_back(remap[value_label[idx]]);
  }
  return res;
}

}  // namespace egolex::meanshift
