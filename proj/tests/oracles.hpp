#pragma once

// Independent reference implementations shared by the unit and acceptance
// tests. Deliberately naive: no shared code with the library kernels.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <vector>

namespace oracle {

inline double ssd(const std::vector<double>& v, std::size_t b, std::size_t e) {
  double m = 0;
  for (std::size_t i = b; i < e; ++i) m += v[i];
  m /= static_cast<double>(e - b);
  double s = 0;
  for (std::size_t i = b; i < e; ++i) s += (v[i] - m) * (v[i] - m);
  return s;
}

struct Split {
  double threshold = 0;  // smallest share in the high class
  double cost = 0;
  bool unique = true;    // no other cut within 1e-12 of the optimum
};

// Tries every cut of the ascending shares that does not separate equal values.
inline Split jenks_exhaustive(std::vector<double> shares) {
  std::erase_if(shares, [](double s) { return s <= 0; });
  std::sort(shares.begin(), shares.end());
  Split best;
  best.cost = std::numeric_limits<double>::infinity();
  std::vector<double> costs;
  for (std::size_t i = 1; i < shares.size(); ++i) {
    if (shares[i - 1] == shares[i]) continue;
    const double c = ssd(shares, 0, i) + ssd(shares, i, shares.size());
    costs.push_back(c);
    if (c < best.cost) {
      best.cost = c;
      best.threshold = shares[i];
    }
  }
  int near = 0;
  for (double c : costs) near += std::abs(c - best.cost) <= 1e-12;
  best.unique = near == 1;
  return best;
}

inline double js_direct(const std::map<int, double>& p, const std::map<int, double>& q) {
  std::map<int, double> m;
  for (const auto& [c, x] : p) m[c] += x / 2;
  for (const auto& [c, x] : q) m[c] += x / 2;
  double d = 0;
  for (const auto& [c, x] : p) {
    if (x > 0) d += 0.5 * x * std::log(x / m[c]);
  }
  for (const auto& [c, x] : q) {
    if (x > 0) d += 0.5 * x * std::log(x / m[c]);
  }
  return std::sqrt(std::max(d, 0.0));
}

}  // namespace oracle
