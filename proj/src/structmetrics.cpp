#include "egolex/structmetrics.hpp"

#include <fmt/format.h>

#include "egolex/error.hpp"
#include "egolex/stats.hpp"

namespace egolex::structural {
namespace {

// Column-major: columns[i][e] is the value of layer i for the e-th selected ego.
template <class Extract>
std::vector<std::vector<double>> columns(std::span<const egonet::EgoNetwork> egos, std::size_t tau,
                                         std::size_t width, Extract&& extract) {
  std::vector<std::vector<double>> cols(width);
  for (const auto& ego : egos) {
    if (ego.tau() != tau) continue;
    const std::vector<double> row = extract(ego);
    for (std::size_t i = 0; i < width; ++i) cols[i].push_back(row[i]);
  }
  return cols;
}

std::vector<double> layer_sizes_of(const egonet::EgoNetwork& ego) {
  return {ego.layer_sizes().begin(), ego.layer_sizes().end()};
}

PerLayerStats summarize(std::size_t tau, const std::vector<std::vector<double>>& cols) {
  PerLayerStats s;
  s.tau = tau;
  s.n_egos = cols.empty() ? 0 : cols.front().size();
  for (const auto& c : cols) {
    s.mean.push_back(stats::mean(c));
    s.ci95.push_back(stats::ci95_halfwidth(c));
  }
  return s;
}

std::size_t count_tau(std::span<const egonet::EgoNetwork> egos, std::size_t tau) {
  std::size_t n = 0;
  for (const auto& e : egos) n += e.tau() == tau ? 1 : 0;
  return n;
}

}  // namespace

TauHistogram tau_histogram(std::span<const egonet::EgoNetwork> egos) {
  TauHistogram h;
  for (const auto& e : egos) ++h[e.tau()];
  return h;
}

std::size_t modal_tau(const TauHistogram& hist) {
  if (hist.empty()) throw MetricError("empty tau histogram");
  std::size_t best = hist.begin()->first;
  std::size_t best_n = 0;
  for (const auto& [tau, n] : hist) {
    if (n > best_n) {
      best = tau;
      best_n = n;
    }
  }
  return best;
}

PerLayerStats layer_stats(std::span<const egonet::EgoNetwork> egos, std::size_t tau) {
  if (count_tau(egos, tau) < 2) {
    throw MetricError(fmt::format("insufficient sample: fewer than 2 egos with tau={}", tau));
  }
  return summarize(tau, columns(egos, tau, tau, layer_sizes_of));
}

PerLayerStats scaling_ratio_stats(std::span<const egonet::EgoNetwork> egos, std::size_t tau) {
  if (count_tau(egos, tau) < 2) {
    throw MetricError(fmt::format("insufficient sample: fewer than 2 egos with tau={}", tau));
  }
  const std::size_t width = tau > 0 ? tau - 1 : 0;
  return summarize(tau, columns(egos, tau, width,
                                [](const egonet::EgoNetwork& e) { return egonet::scaling_ratios(e); }));
}

std::vector<double> layer_regression(std::span<const egonet::EgoNetwork> egos, std::size_t tau,
                                     bool with_intercept) {
  if (count_tau(egos, tau) < 3) {
    throw MetricError(fmt::format("insufficient sample: fewer than 3 egos with tau={}", tau));
  }
  const auto cols = columns(egos, tau, tau, layer_sizes_of);
  const auto& outer = cols.back();
  std::vector<double> coeffs;
  // For i = tau the response is the predictor itself: sxy and sxx are the
  // same sum, so the slope is exactly 1.
  for (const auto& col : cols) coeffs.push_back(stats::ols_slope(outer, col, with_intercept));
  return coeffs;
}

std::vector<egonet::EgoNetwork> select_tau(std::span<const egonet::EgoNetwork> egos, std::size_t tau) {
  std::vector<egonet::EgoNetwork> out;
  for (const auto& e : egos) {
    if (e.tau() == tau) out.push_back(e);
  }
  return out;
}

}  // namespace egolex::structural
