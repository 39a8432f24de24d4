#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <vector>

#include "hafsim/errors.hpp"

namespace hafsim {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// One detected boson count per sampled mode.
using OccupationPattern = std::vector<int>;

// Mode bookkeeping for the hybrid system. All 2M-dimensional objects use the
// ordering (a_1..a_mph, A_1..A_mat, a†_1..a†_mph, A†_1..A†_mat): photon modes
// first, then atomic modes, annihilator half before creator half.
struct ModeLayout {
    int m_ph = 0; ///< quantum photon modes
    int m_at = 0; ///< excited atomic modes

    ModeLayout() = default;
    ModeLayout(int photons, int atoms) : m_ph(photons), m_at(atoms) {
        if (m_ph < 1 || m_at < 0) {
            throw DomainError("ModeLayout: need m_ph >= 1 and m_at >= 0");
        }
    }

    int total() const { return m_ph + m_at; }

    bool operator==(const ModeLayout&) const = default;
};

inline std::uint64_t factorial_exact(int n) {
    // 20! is the largest factorial representable in 64 bits.
    if (n < 0 || n > 20) {
        throw SizeError("factorial_exact: argument must be in [0, 20]");
    }
    std::uint64_t r = 1;
    for (int k = 2; k <= n; ++k) {
        r *= static_cast<std::uint64_t>(k);
    }
    return r;
}

inline int pattern_total(const OccupationPattern& pattern) {
    int total = 0;
    for (int n : pattern) {
        if (n < 0) {
            throw DomainError("OccupationPattern: counts must be nonnegative");
        }
        total += n;
    }
    return total;
}

} // namespace hafsim
