#pragma once

#include <optional>
#include <span>

namespace egolex::stats {

inline constexpr double kZ95 = 1.96;

double mean(std::span<const double> xs);
/// Sample standard deviation (n - 1 denominator); 0 for n < 2.
double sample_sd(std::span<const double> xs);
/// Normal-approximation 95% half-width: 1.96 * sd / sqrt(n).
double ci95_halfwidth(std::span<const double> xs);

/// OLS slope of y on x. With intercept: cov(x,y)/var(x); without: sum(xy)/sum(xx).
/// Throws MetricError when x has no variance (or is all zero without intercept).
double ols_slope(std::span<const double> x, std::span<const double> y, bool with_intercept = true);

/// Pearson correlation; nullopt when either side has zero variance or n < 2.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

struct TTest {
  double statistic = 0.0;
  double dof = 0.0;
  double p_value = 1.0;  // two-sided
};

/// One-sample t-test of mean(xs) against 0. nullopt for n < 2. Zero variance
/// gives p = 1 when the mean is 0 and p = 0 otherwise.
std::optional<TTest> one_sample_ttest(std::span<const double> xs);

/// Welch two-sample t-test of mean(a) - mean(b).
std::optional<TTest> welch_ttest(std::span<const double> a, std::span<const double> b);

}  // namespace egolex::stats
