#pragma once

#include "hafsim/gaussian.hpp"
#include "hafsim/model.hpp"
#include "hafsim/sampler.hpp"
#include "hafsim/types.hpp"

namespace hafsim {

// ---------------------------------------------------------------------------
// Independent ground-truth engines used to validate the hafnian pipeline on
// small systems: a truncated-Fock-space density matrix of exp(-H/T) and a
// series oracle extracting probabilities from the characteristic function.
// Both are desk-scale by design.
// ---------------------------------------------------------------------------

struct FockTruncation {
    int cutoff_per_mode = 8;

    /// Truncated-space dimension (cutoff+1)^M.
    std::int64_t dimension(const ModeLayout& layout) const;

    /// Enforces the desk-scale budget: M <= 3, cutoff <= 16, dimension <= 2^24.
    void validate(const ModeLayout& layout) const;
};

/// Thermal density matrix on the truncated Fock space.
struct FockThermalState {
    ModeLayout layout;
    int cutoff = 0;
    Matrix rho;     ///< dense density matrix, Hermitian, trace 1
    double leakage; ///< probability mass on states touching the cutoff

    std::int64_t dimension() const { return rho.rows(); }
    bool pattern_at_boundary(const OccupationPattern& pattern) const;
};

/// Realizes the quadratic Hamiltonian in second quantization on number states
/// and exponentiates it by dense eigendecomposition. Throws InstabilityError
/// for unstable H and SizeError when the truncation budget is exceeded.
FockThermalState fock_density_matrix(const GrandDynamicalMatrix& H,
                                     double temperature,
                                     const FockTruncation& trunc);

/// Same, with cutoff auto-escalation: starts at cutoff 8 and grows in steps
/// of 4 until the photon-pattern probabilities (total <= max_total) drift by
/// less than drift_tol between consecutive cutoffs and the leakage is below
/// 1e-8. Throws TruncationError when the ceiling is reached first.
FockThermalState fock_density_matrix_auto(const GrandDynamicalMatrix& H,
                                          double temperature,
                                          int max_total,
                                          double drift_tol = 1e-8);

/// Probability of a photon occupation pattern with the atomic modes traced
/// out: sum of diagonal density-matrix entries over matching basis states.
double oracle_probability(const FockThermalState& state,
                          const OccupationPattern& pattern);

/// Probabilities as Taylor coefficients of the characteristic function,
/// recovered by discrete Fourier inversion of Theta over roots-of-unity grids
/// on the polydisc |z_j| = radius. Requires the spectral norm of
/// G (1 + G)^{-1} to be below one (Taylor convergence).
ProbabilityTable series_probabilities(const CovarianceMatrix& G,
                                      int total_cutoff,
                                      double radius = 0.5);

} // namespace hafsim
