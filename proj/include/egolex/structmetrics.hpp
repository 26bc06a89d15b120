#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "egolex/egonet.hpp"

namespace egolex::structural {

using TauHistogram = std::map<std::size_t, std::size_t>;

TauHistogram tau_histogram(std::span<const egonet::EgoNetwork> egos);

/// Most frequent tau; ties go to the smaller tau. Throws on an empty histogram.
std::size_t modal_tau(const TauHistogram& hist);

struct PerLayerStats {
  std::size_t tau = 0;
  std::size_t n_egos = 0;
  std::vector<double> mean;
  std::vector<double> ci95;  // 1.96 * sd / sqrt(n)
};

/// Mean layer sizes |L_i| over egos with the given tau. Needs >= 2 such egos.
PerLayerStats layer_stats(std::span<const egonet::EgoNetwork> egos, std::size_t tau);

/// Mean scaling ratios rho_2..rho_tau over egos with the given tau.
PerLayerStats scaling_ratio_stats(std::span<const egonet::EgoNetwork> egos, std::size_t tau);

/// Slope of |L_i| against |L_tau| for each layer i, over egos with the given
/// tau (>= 3 needed). The last coefficient is exactly 1.
std::vector<double> layer_regression(std::span<const egonet::EgoNetwork> egos, std::size_t tau,
                                     bool with_intercept = true);

/// Egos whose tau equals `tau`.
std::vector<egonet::EgoNetwork> select_tau(std::span<const egonet::EgoNetwork> egos, std::size_t tau);

}  // namespace egolex::structural
