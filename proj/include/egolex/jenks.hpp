#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace egolex::jenks {

/// Jenks/Fisher optimal classification of weighted values sorted ascending.
/// Minimizes the total within-class sum of squared deviations over all ways
/// to cut the sequence into `k` contiguous non-empty classes. Returns the
/// k - 1 class start indices (class j covers [start_{j-1}, start_j)).
std::vector<std::size_t> natural_breaks(std::span<const double> values, std::span<const double> weights,
                                        std::size_t k);

/// Weighted within-class sum of squared deviations of values[begin, end).
double class_ssd(std::span<const double> values, std::span<const double> weights, std::size_t begin,
                 std::size_t end);

}  // namespace egolex::jenks
