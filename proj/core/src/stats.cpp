#include "hafsim/stats.hpp"

#include <cmath>
#include <limits>

#include "hafsim/errors.hpp"

namespace hafsim {

namespace {

// Regularized lower incomplete gamma by series expansion, x < a + 1.
double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma by Lentz continued fraction, x >= a + 1.
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

} // namespace

double gamma_q(double a, double x) {
    if (a <= 0.0 || x < 0.0) {
        throw DomainError("gamma_q: need a > 0 and x >= 0");
    }
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) {
        return 1.0 - gamma_p_series(a, x);
    }
    return gamma_q_cf(a, x);
}

double chi_square_pvalue(double stat, int dof) {
    if (dof < 1) {
        throw DomainError("chi_square_pvalue: need at least one degree of freedom");
    }
    if (stat < 0.0) stat = 0.0;
    return gamma_q(0.5 * dof, 0.5 * stat);
}

std::pair<double, double> chi_square_test(const std::vector<std::int64_t>& observed,
                                          const std::vector<double>& expected_probs,
                                          std::int64_t draws,
                                          double min_expected) {
    if (observed.size() != expected_probs.size()) {
        throw DomainError("chi_square_test: observed and expected sizes differ");
    }
    if (draws <= 0) {
        throw DomainError("chi_square_test: need a positive number of draws");
    }

    // Low-expectation bins and the unlisted tail are pooled into one bin.
    double stat = 0.0;
    int used = 0;
    double pooled_expected = 0.0;
    double pooled_observed = 0.0;
    double listed_mass = 0.0;
    std::int64_t listed_count = 0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double e = expected_probs[i] * static_cast<double>(draws);
        listed_mass += expected_probs[i];
        listed_count += observed[i];
        if (e < min_expected) {
            pooled_expected += e;
            pooled_observed += static_cast<double>(observed[i]);
        } else {
            const double diff = static_cast<double>(observed[i]) - e;
            stat += diff * diff / e;
            ++used;
        }
    }
    pooled_expected += std::max(0.0, 1.0 - listed_mass) * static_cast<double>(draws);
    pooled_observed += static_cast<double>(draws - listed_count);
    if (pooled_expected > 0.0) {
        const double diff = pooled_observed - pooled_expected;
        stat += diff * diff / pooled_expected;
        ++used;
    }
    if (used < 2) {
        throw DomainError("chi_square_test: fewer than two usable bins");
    }
    return {stat, chi_square_pvalue(stat, used - 1)};
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw DomainError("log_log_slope: need two or more aligned samples");
    }
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] <= 0.0 || y[i] <= 0.0) {
            throw DomainError("log_log_slope: samples must be positive");
        }
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const auto n = static_cast<double>(x.size());
    const double denom = n * sxx - sx * sx;
    if (std::abs(denom) < std::numeric_limits<double>::min()) {
        throw DomainError("log_log_slope: degenerate abscissae");
    }
    return (n * sxy - sx * sy) / denom;
}

} // namespace hafsim
