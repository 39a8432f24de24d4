#include "hafsim/oracle.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <sstream>
#include <vector>

#include "hafsim/symplectic.hpp"

namespace hafsim {

std::int64_t FockTruncation::dimension(const ModeLayout& layout) const {
    std::int64_t d = 1;
    for (int k = 0; k < layout.total(); ++k) {
        d *= cutoff_per_mode + 1;
    }
    return d;
}

void FockTruncation::validate(const ModeLayout& layout) const {
    if (cutoff_per_mode < 1) {
        throw DomainError("FockTruncation: cutoff must be positive");
    }
    if (layout.total() > 3 || cutoff_per_mode > 16) {
        throw SizeError("FockTruncation: dense oracle is limited to M <= 3, cutoff <= 16");
    }
    if (dimension(layout) > (std::int64_t{1} << 24)) {
        throw SizeError("FockTruncation: truncated dimension exceeds 2^24");
    }
}

namespace {

// Mixed-radix basis bookkeeping: mode 0 is the most significant digit.
struct FockBasis {
    int modes;
    int cutoff;
    std::vector<std::int64_t> stride;
    std::int64_t dim;

    FockBasis(int modes_, int cutoff_) : modes(modes_), cutoff(cutoff_) {
        stride.assign(static_cast<std::size_t>(modes), 1);
        for (int k = modes - 2; k >= 0; --k) {
            stride[static_cast<std::size_t>(k)] =
                stride[static_cast<std::size_t>(k + 1)] * (cutoff + 1);
        }
        dim = stride[0] * (cutoff + 1);
    }

    int occupation(std::int64_t state, int mode) const {
        return static_cast<int>((state / stride[static_cast<std::size_t>(mode)]) % (cutoff + 1));
    }
};

// Second-quantized action of the quadratic form: each matrix entry H(i, j)
// contributes (1/2) H_ij L_i R_j with L, R ladder operators read off the
// extended index (annihilator below M, creator above). Products are realized
// in normal order (annihilators applied first, constant shifts dropped), so
// the truncation never lowers the energy of boundary states.
Matrix realize_hamiltonian(const GrandDynamicalMatrix& H, const FockBasis& basis) {
    const int M = H.layout.total();
    Matrix HF = Matrix::Zero(basis.dim, basis.dim);

    struct Op {
        bool create;
        int mode;
    };

    for (int i = 0; i < 2 * M; ++i) {
        for (int j = 0; j < 2 * M; ++j) {
            const Complex h = H.mat(i, j);
            if (h == Complex(0.0, 0.0)) continue;

            Op first{};  // applied to the state first
            Op second{}; // applied to the result
            if (i < M && j < M) {
                // b_i b†_j reordered to b†_j b_i; the dropped commutator is a
                // constant that cancels in the normalized density matrix.
                first = {false, i};
                second = {true, j};
            } else if (i < M) {
                first = {false, j - M};
                second = {false, i};
            } else if (j < M) {
                first = {true, j};
                second = {true, i - M};
            } else {
                first = {false, j - M};
                second = {true, i - M};
            }

            for (std::int64_t s = 0; s < basis.dim; ++s) {
                int n = basis.occupation(s, first.mode);
                double amp;
                std::int64_t mid;
                if (first.create) {
                    if (n == basis.cutoff) continue; // truncated away
                    amp = std::sqrt(static_cast<double>(n + 1));
                    mid = s + basis.stride[static_cast<std::size_t>(first.mode)];
                } else {
                    if (n == 0) continue;
                    amp = std::sqrt(static_cast<double>(n));
                    mid = s - basis.stride[static_cast<std::size_t>(first.mode)];
                }
                n = basis.occupation(mid, second.mode);
                std::int64_t target;
                if (second.create) {
                    if (n == basis.cutoff) continue;
                    amp *= std::sqrt(static_cast<double>(n + 1));
                    target = mid + basis.stride[static_cast<std::size_t>(second.mode)];
                } else {
                    if (n == 0) continue;
                    amp *= std::sqrt(static_cast<double>(n));
                    target = mid - basis.stride[static_cast<std::size_t>(second.mode)];
                }
                HF(target, s) += 0.5 * h * amp;
            }
        }
    }
    // Cross-mode terms can still clip asymmetrically at the cutoff; restore
    // exact Hermiticity and let the escalation loop control the remainder.
    return 0.5 * (HF + HF.adjoint()).eval();
}

} // namespace

bool FockThermalState::pattern_at_boundary(const OccupationPattern& pattern) const {
    for (int n : pattern) {
        if (n >= cutoff) return true;
    }
    return false;
}

FockThermalState fock_density_matrix(const GrandDynamicalMatrix& H,
                                     double temperature,
                                     const FockTruncation& trunc) {
    if (temperature <= 0.0) {
        throw DomainError("fock_density_matrix: temperature must be positive");
    }
    trunc.validate(H.layout);
    solve_bdg(H); // stability gate; throws InstabilityError for bad H

    const FockBasis basis(H.layout.total(), trunc.cutoff_per_mode);
    const Matrix HF = realize_hamiltonian(H, basis);

    Eigen::SelfAdjointEigenSolver<Matrix> es(HF);
    if (es.info() != Eigen::Success) {
        throw NumericalError("fock_density_matrix: eigendecomposition failed");
    }
    const RealVector lambda = es.eigenvalues();
    const double ground = lambda.minCoeff();
    RealVector boltzmann(lambda.size());
    for (Eigen::Index k = 0; k < lambda.size(); ++k) {
        boltzmann(k) = std::exp(-(lambda(k) - ground) / temperature);
    }
    const double partition = boltzmann.sum();

    FockThermalState state;
    state.layout = H.layout;
    state.cutoff = trunc.cutoff_per_mode;
    const Vector weights = (boltzmann / partition).cast<Complex>();
    state.rho = es.eigenvectors() * weights.asDiagonal() * es.eigenvectors().adjoint();

    double leak = 0.0;
    for (std::int64_t s = 0; s < basis.dim; ++s) {
        bool boundary = false;
        for (int k = 0; k < basis.modes && !boundary; ++k) {
            boundary = basis.occupation(s, k) == basis.cutoff;
        }
        if (boundary) leak += state.rho(s, s).real();
    }
    state.leakage = leak;
    return state;
}

double oracle_probability(const FockThermalState& state, const OccupationPattern& pattern) {
    const int mp = state.layout.m_ph;
    if (static_cast<int>(pattern.size()) != mp) {
        throw DomainError("oracle_probability: pattern length must equal m_ph");
    }
    for (int n : pattern) {
        if (n < 0 || n > state.cutoff) {
            throw DomainError("oracle_probability: pattern exceeds the Fock cutoff");
        }
    }
    const FockBasis basis(state.layout.total(), state.cutoff);
    double p = 0.0;
    for (std::int64_t s = 0; s < basis.dim; ++s) {
        bool match = true;
        for (int k = 0; k < mp && match; ++k) {
            match = basis.occupation(s, k) == pattern[static_cast<std::size_t>(k)];
        }
        if (match) p += state.rho(s, s).real();
    }
    return p;
}

FockThermalState fock_density_matrix_auto(const GrandDynamicalMatrix& H,
                                          double temperature,
                                          int max_total,
                                          double drift_tol) {
    if (max_total < 0 || max_total > 16) {
        throw SizeError("fock_density_matrix_auto: max_total must lie in [0, 16]");
    }
    const auto patterns = patterns_up_to_total(H.layout.m_ph, max_total);
    FockThermalState prev = fock_density_matrix(H, temperature, {8});
    for (int cutoff = 12; cutoff <= 16; cutoff += 4) {
        FockThermalState cur = fock_density_matrix(H, temperature, {cutoff});
        double drift = 0.0;
        for (const auto& pattern : patterns) {
            // Patterns outside the coarser truncation cannot be compared yet.
            bool comparable = true;
            for (int n : pattern) comparable = comparable && n <= prev.cutoff;
            if (!comparable) continue;
            drift = std::max(drift, std::abs(oracle_probability(prev, pattern) -
                                             oracle_probability(cur, pattern)));
        }
        if (drift < drift_tol && cur.leakage <= 1e-8 && cur.cutoff >= max_total) {
            return cur;
        }
        prev = std::move(cur);
    }
    std::ostringstream msg;
    msg << "fock_density_matrix_auto: cutoff ceiling reached before pattern probabilities "
           "settled below "
        << drift_tol;
    throw TruncationError(msg.str());
}

ProbabilityTable series_probabilities(const CovarianceMatrix& G,
                                      int total_cutoff,
                                      double radius) {
    if (radius <= 0.0 || radius >= 1.0) {
        throw DomainError("series_probabilities: radius must lie in (0, 1)");
    }
    if (total_cutoff < 0) {
        throw DomainError("series_probabilities: cutoff must be nonnegative");
    }
    const int m = G.modes();
    const Matrix full = G.full();
    const Matrix W =
        (Matrix::Identity(2 * m, 2 * m) + full).partialPivLu().solve(full);
    const double norm = W.jacobiSvd().singularValues().maxCoeff();
    if (norm >= 1.0) {
        throw DomainError("series_probabilities: ||G (1+G)^{-1}|| >= 1, Taylor series "
                          "does not converge");
    }

    // Kth roots of unity with K large enough that radius^K aliasing is
    // negligible next to the 1e-7 target.
    const int K = std::max(total_cutoff + 1,
                           static_cast<int>(std::ceil(-27.7 / std::log(radius))) + 1);
    double grid_size = 1.0;
    for (int k = 0; k < m; ++k) grid_size *= K;
    if (grid_size > 4e6) {
        throw SizeError("series_probabilities: roots-of-unity grid too large");
    }

    const Complex root = std::exp(Complex(0.0, 2.0 * M_PI / K));
    std::vector<Complex> root_pow(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
        root_pow[static_cast<std::size_t>(k)] = std::pow(root, k);
    }

    // Evaluate Theta once per grid node.
    const auto nodes = static_cast<std::int64_t>(grid_size);
    std::vector<Complex> theta(static_cast<std::size_t>(nodes));
    std::vector<int> digits(static_cast<std::size_t>(m), 0);
    Vector z(m);
    for (std::int64_t node = 0; node < nodes; ++node) {
        std::int64_t rest = node;
        for (int k = m - 1; k >= 0; --k) {
            digits[static_cast<std::size_t>(k)] = static_cast<int>(rest % K);
            rest /= K;
        }
        for (int k = 0; k < m; ++k) {
            z(k) = radius * root_pow[static_cast<std::size_t>(digits[static_cast<std::size_t>(k)])];
        }
        theta[static_cast<std::size_t>(node)] = characteristic_function(G, z);
    }

    ProbabilityTable table;
    table.cutoff = total_cutoff;
    double mass = 0.0;
    for (const auto& pattern : patterns_up_to_total(m, total_cutoff)) {
        Complex acc(0.0, 0.0);
        for (std::int64_t node = 0; node < nodes; ++node) {
            std::int64_t rest = node;
            int phase_index = 0; // sum of k_nu n_nu mod K
            for (int k = m - 1; k >= 0; --k) {
                const int digit = static_cast<int>(rest % K);
                rest /= K;
                phase_index = (phase_index + digit * pattern[static_cast<std::size_t>(k)]) % K;
            }
            acc += theta[static_cast<std::size_t>(node)] *
                   std::conj(root_pow[static_cast<std::size_t>(phase_index)]);
        }
        acc /= static_cast<double>(nodes);
        acc /= std::pow(radius, pattern_total(pattern));
        if (std::abs(acc.imag()) > 1e-8) {
            throw NumericalError("series_probabilities: imaginary residue in a coefficient");
        }
        if (acc.real() < -1e-8) {
            throw NumericalError("series_probabilities: negative coefficient");
        }
        const double p = std::max(acc.real(), 0.0);
        table.entries.emplace_back(pattern, p);
        mass += p;
    }
    table.deficit = 1.0 - mass;
    return table;
}

} // namespace hafsim
