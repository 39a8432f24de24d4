#include "hafsim/hafnian.hpp"

#include <Eigen/LU>

#include <bit>
#include <cmath>
#include <sstream>
#include <vector>

namespace hafsim {

namespace {

void require_symmetric(const Matrix& M, const char* who) {
    if (M.rows() != M.cols()) {
        throw DomainError(std::string(who) + ": matrix must be square");
    }
    if (M.size() == 0) return;
    const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
    const double resid = (M - M.transpose()).cwiseAbs().maxCoeff();
    if (resid > 1e-12 * scale) {
        throw DomainError(std::string(who) + ": matrix is not symmetric");
    }
}

Complex matching_sum(const Matrix& M, std::vector<int>& idx, std::size_t begin) {
    if (begin == idx.size()) {
        return Complex(1.0, 0.0);
    }
    const int i = idx[begin];
    Complex total(0.0, 0.0);
    for (std::size_t k = begin + 1; k < idx.size(); ++k) {
        std::swap(idx[begin + 1], idx[k]);
        total += M(i, idx[begin + 1]) * matching_sum(M, idx, begin + 2);
        std::swap(idx[begin + 1], idx[k]);
    }
    return total;
}

} // namespace

Complex hafnian_matching(const Matrix& M) {
    require_symmetric(M, "hafnian_matching");
    const auto n = static_cast<int>(M.rows());
    if (n == 0) return Complex(1.0, 0.0);
    if (n % 2 != 0) return Complex(0.0, 0.0);
    if (n > 20) {
        throw SizeError("hafnian_matching: order capped at 20 for the reference engine");
    }
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
    return matching_sum(M, idx, 0);
}

Complex hafnian_trace(const Matrix& M) {
    require_symmetric(M, "hafnian_trace");
    const auto n = static_cast<int>(M.rows());
    if (n == 0) return Complex(1.0, 0.0);
    if (n % 2 != 0) return Complex(0.0, 0.0);
    if (n > 36) {
        throw SizeError("hafnian_trace: order capped at 36 (desk-scale budget)");
    }
    const int m = n / 2;

    // Loop-free convention plus rescaling: above order 24 work on M / s and
    // restore the factor s^{n/2} through its logarithm, so subset power
    // traces stay inside double range.
    Matrix A = M;
    A.diagonal().setZero();
    double log_scale = 0.0;
    const double s = A.cwiseAbs().maxCoeff();
    if (n > 24 && s > 0.0) {
        A /= s;
        log_scale = 0.5 * n * std::log(s);
    }

    Complex total(0.0, 0.0);
    std::vector<int> rows;
    std::vector<Complex> traces(static_cast<std::size_t>(m) + 1);
    std::vector<Complex> coeff(static_cast<std::size_t>(m) + 1);

    const std::uint64_t subsets = std::uint64_t{1} << m;
    for (std::uint64_t mask = 1; mask < subsets; ++mask) {
        rows.clear();
        for (int i = 0; i < m; ++i) {
            if (mask & (std::uint64_t{1} << i)) {
                rows.push_back(2 * i);
                rows.push_back(2 * i + 1);
            }
        }
        const auto d = static_cast<Eigen::Index>(rows.size());

        // B = A_Z X with X swapping the two columns of every kept pair.
        Matrix B(d, d);
        for (Eigen::Index r = 0; r < d; ++r) {
            for (Eigen::Index c = 0; c < d; c += 2) {
                B(r, c) = A(rows[static_cast<std::size_t>(r)],
                            rows[static_cast<std::size_t>(c + 1)]);
                B(r, c + 1) = A(rows[static_cast<std::size_t>(r)],
                                rows[static_cast<std::size_t>(c)]);
            }
        }

        Matrix P = B;
        for (int k = 1; k <= m; ++k) {
            traces[static_cast<std::size_t>(k)] = P.trace();
            if (k < m) P = (P * B).eval();
        }

        // coeff[j] of x^j in exp(sum_k traces_k x^k / (2k)).
        coeff[0] = Complex(1.0, 0.0);
        for (int j = 1; j <= m; ++j) {
            Complex acc(0.0, 0.0);
            for (int k = 1; k <= j; ++k) {
                acc += 0.5 * traces[static_cast<std::size_t>(k)] *
                       coeff[static_cast<std::size_t>(j - k)];
            }
            coeff[static_cast<std::size_t>(j)] = acc / static_cast<double>(j);
        }

        const int popcount = std::popcount(mask);
        const double sign = ((m - popcount) % 2 == 0) ? 1.0 : -1.0;
        total += sign * coeff[static_cast<std::size_t>(m)];
    }
    return total * std::exp(log_scale);
}

Matrix pattern_correlation_matrix(const CovarianceMatrix& photon_cov) {
    const int mp = photon_cov.layout.m_ph;
    if (photon_cov.layout.m_at != 0) {
        throw DomainError("pattern_correlation_matrix: expected a photon-only covariance; "
                          "apply marginal_photon first");
    }
    const Matrix G = photon_cov.full();
    const Matrix one = Matrix::Identity(2 * mp, 2 * mp);
    Eigen::FullPivLU<Matrix> lu(one + G);
    if (!lu.isInvertible()) {
        throw DomainError("pattern_correlation_matrix: 1 + G is singular");
    }
    // G commutes with (1+G)^{-1}, so the one-sided solve already gives
    // W = G (1+G)^{-1}.
    const Matrix W = lu.solve(G);

    Matrix C(2 * mp, 2 * mp);
    C.topRows(mp) = W.bottomRows(mp);
    C.bottomRows(mp) = W.topRows(mp);
    const double asym = (C - C.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-8 * std::max(1.0, C.cwiseAbs().maxCoeff())) {
        throw NumericalError("pattern_correlation_matrix: result is not symmetric; "
                             "covariance is far from physical");
    }
    return 0.5 * (C + C.transpose()).eval();
}

Matrix expand_pattern(const Matrix& C, const OccupationPattern& pattern) {
    const auto mp = static_cast<int>(C.rows()) / 2;
    if (C.rows() != 2 * mp || C.rows() != C.cols()) {
        throw DomainError("expand_pattern: C must be square of even order");
    }
    if (static_cast<int>(pattern.size()) != mp) {
        throw DomainError("expand_pattern: pattern length must equal the mode count");
    }
    const int total = pattern_total(pattern);

    std::vector<int> map;
    map.reserve(static_cast<std::size_t>(2 * total));
    for (int half = 0; half < 2; ++half) {
        for (int nu = 0; nu < mp; ++nu) {
            for (int rep = 0; rep < pattern[static_cast<std::size_t>(nu)]; ++rep) {
                map.push_back(half * mp + nu);
            }
        }
    }

    Matrix out(2 * total, 2 * total);
    for (std::size_t i = 0; i < map.size(); ++i) {
        for (std::size_t j = 0; j < map.size(); ++j) {
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                C(map[i], map[j]);
        }
    }
    return out;
}

double pattern_probability(const CovarianceMatrix& photon_cov,
                           const OccupationPattern& pattern) {
    const int mp = photon_cov.layout.m_ph;
    if (static_cast<int>(pattern.size()) != mp) {
        throw DomainError("pattern_probability: pattern length must equal m_ph");
    }
    const int total = pattern_total(pattern);
    if (2 * total > 36) {
        throw SizeError("pattern_probability: total photon number exceeds the hafnian budget");
    }

    double denominator = 1.0;
    for (int n : pattern) {
        denominator *= static_cast<double>(factorial_exact(n));
    }

    const Matrix G = photon_cov.full();
    const Complex det =
        (Matrix::Identity(2 * mp, 2 * mp) + G).partialPivLu().determinant();
    if (std::abs(det.imag()) > 1e-9 * std::abs(det) || det.real() <= 0.0) {
        throw DomainError("pattern_probability: det(1 + G) is not a positive real");
    }

    const Matrix C = pattern_correlation_matrix(photon_cov);
    const Complex h = hafnian_trace(expand_pattern(C, pattern));
    const Complex q = h / (std::sqrt(det.real()) * denominator);

    if (std::abs(q.imag()) > 1e-9) {
        std::ostringstream msg;
        msg << "pattern_probability: imaginary residue " << q.imag();
        throw NumericalError(msg.str());
    }
    if (q.real() < -1e-9) {
        std::ostringstream msg;
        msg << "pattern_probability: negative probability " << q.real();
        throw NumericalError(msg.str());
    }
    return std::min(std::max(q.real(), 0.0), 1.0);
}

} // namespace hafsim
