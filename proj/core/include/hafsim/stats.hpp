#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace hafsim {

// Small statistical helpers shared by the sampler checks and the CLI.

/// Regularized upper incomplete gamma Q(a, x), a > 0, x >= 0.
double gamma_q(double a, double x);

/// Chi-square survival function: P(X >= stat) for dof degrees of freedom.
double chi_square_pvalue(double stat, int dof);

/// Pearson chi-square test of observed counts against expected probabilities.
/// Bins with expected count below min_expected are pooled into one tail bin.
/// Returns {statistic, p-value}.
std::pair<double, double> chi_square_test(const std::vector<std::int64_t>& observed,
                                          const std::vector<double>& expected_probs,
                                          std::int64_t draws,
                                          double min_expected = 5.0);

/// Least-squares slope of log(y) against log(x); x, y must be positive.
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

} // namespace hafsim
