#include "egolex/jenks.hpp"

#include <limits>

#include "egolex/error.hpp"

namespace egolex::jenks {

double class_ssd(std::span<const double> values, std::span<const double> weights, std::size_t begin,
                 std::size_t end) {
  double w = 0.0;
  double s = 0.0;
  for (auto i = begin; i < end; ++i) {
    w += weights[i];
    s += weights[i] * values[i];
  }
  if (w == 0.0) return 0.0;
  const double mean = s / w;
  double ssd = 0.0;
  for (auto i = begin; i < end; ++i) ssd += weights[i] * (values[i] - mean) * (values[i] - mean);
  return ssd;
}

std::vector<std::size_t> natural_breaks(std::span<const double> values, std::span<const double> weights,
                                        std::size_t k) {
  const std::size_t n = values.size();
  if (weights.size() != n) throw DataError("natural_breaks: values and weights differ in length");
  if (k < 1 || k > n) throw DataError("natural_breaks: need 1 <= k <= number of values");
  constexpr double kInf = std::numeric_limits<double>::infinity();

  // cost[j][m]: best SSD of the first m values in j + 1 classes.
  // start[j][m]: first index of the last class in that optimum.
  std::vector<std::vector<double>> cost(k, std::vector<double>(n + 1, kInf));
  std::vector<std::vector<std::size_t>> start(k, std::vector<std::size_t>(n + 1, 0));
  for (std::size_t m = 1; m <= n; ++m) {
    // Grow the last class leftwards from m - 1, updating its SSD incrementally.
    double w = 0.0;
    double s1 = 0.0;
    double s2 = 0.0;
    for (std::size_t i = m; i-- > 0;) {
      w += weights[i];
      s1 += weights[i] * values[i];
      s2 += weights[i] * values[i] * values[i];
      const double ssd = std::max(0.0, s2 - s1 * s1 / w);
      if (i == 0) {
        cost[0][m] = ssd;
        start[0][m] = 0;
      }
      for (std::size_t j = 1; j < k; ++j) {
        if (i < j || cost[j - 1][i] == kInf) continue;
        const double c = cost[j - 1][i] + ssd;
        if (c < cost[j][m]) {
          cost[j][m] = c;
          start[j][m] = i;
        }
      }
    }
  }
  std::vector<std::size_t> breaks(k - 1);
  std::size_t m = n;
  for (std::size_t j = k - 1; j > 0; --j) {
    breaks[j - 1] = start[j][m];
    m = start[j][m];
  }
  return breaks;
}

}  // namespace egolex::jenks
