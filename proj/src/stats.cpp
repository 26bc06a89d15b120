#include "egolex/stats.hpp"

#include <cmath>
#include <limits>

#include <boost/math/distributions/students_t.hpp>

#include "egolex/error.hpp"

namespace egolex::stats {
namespace {

double two_sided_p(double t, double dof) {
  if (!std::isfinite(t)) return 0.0;
  boost::math::students_t dist(dof);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

double sample_var(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return ss / static_cast<double>(xs.size() - 1);
}

}  // namespace

double mean(std::span<const double> xs) {
  if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double sample_sd(std::span<const double> xs) { return std::sqrt(sample_var(xs)); }

double ci95_halfwidth(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  return kZ95 * sample_sd(xs) / std::sqrt(static_cast<double>(xs.size()));
}

double ols_slope(std::span<const double> x, std::span<const double> y, bool with_intercept) {
  if (x.size() != y.size() || x.empty()) throw MetricError("regression needs paired samples");
  double sxx = 0.0;
  double sxy = 0.0;
  if (with_intercept) {
    const double mx = mean(x);
    const double my = mean(y);
    for (std::size_t i = 0; i < x.size(); ++i) {
      sxx += (x[i] - mx) * (x[i] - mx);
      sxy += (x[i] - mx) * (y[i] - my);
    }
  } else {
    for (std::size_t i = 0; i < x.size(); ++i) {
      sxx += x[i] * x[i];
      sxy += x[i] * y[i];
    }
  }
  if (sxx == 0.0) throw MetricError("regression predictor has zero variance");
  return sxy / sxx;
}

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) return std::nullopt;
  const double mx = mean(x);
  const double my = mean(y);
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

std::optional<TTest> one_sample_ttest(std::span<const double> xs) {
  if (xs.size() < 2) return std::nullopt;
  const double m = mean(xs);
  const double se = std::sqrt(sample_var(xs) / static_cast<double>(xs.size()));
  TTest t;
  t.dof = static_cast<double>(xs.size() - 1);
  if (se == 0.0) {
    t.statistic = m == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), m);
    t.p_value = m == 0.0 ? 1.0 : 0.0;
    return t;
  }
  t.statistic = m / se;
  t.p_value = two_sided_p(t.statistic, t.dof);
  return t;
}

std::optional<TTest> welch_ttest(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) return std::nullopt;
  const double va = sample_var(a) / static_cast<double>(a.size());
  const double vb = sample_var(b) / static_cast<double>(b.size());
  const double diff = mean(a) - mean(b);
  TTest t;
  if (va + vb == 0.0) {
    t.dof = static_cast<double>(a.size() + b.size() - 2);
    t.statistic = diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
    t.p_value = diff == 0.0 ? 1.0 : 0.0;
    return t;
  }
  t.statistic = diff / std::sqrt(va + vb);
  t.dof = (va + vb) * (va + vb) /
          (va * va / static_cast<double>(a.size() - 1) + vb * vb / static_cast<double>(b.size() - 1));
  t.p_value = two_sided_p(t.statistic, t.dof);
  return t;
}

}  // namespace egolex::stats
