#pragma once

#include "hafsim/gaussian.hpp"
#include "hafsim/types.hpp"

namespace hafsim {

// ---------------------------------------------------------------------------
// Exact hafnian engines and the hafnian-based joint photon-number
// probabilities. Both engines use the loop-free convention: diagonal entries
// never enter a perfect matching and are ignored.
// ---------------------------------------------------------------------------

/// Reference engine: direct sum over perfect matchings of {1..n} of the
/// products of matched entries. haf of the empty matrix is 1, odd order gives
/// 0. Cost O((n-1)!!), capped at n = 20.
Complex hafnian_matching(const Matrix& M);

/// Performance engine: inclusion-exclusion over index-pair subsets with
/// power-trace accumulation, cost O(n^3 2^{n/2}), capped at n = 36. Matrices
/// above order 24 are rescaled and reassembled through log-magnitude to keep
/// intermediates inside double range.
Complex hafnian_trace(const Matrix& M);

/// Correlation matrix C = [[0,1],[1,0]] G_ph (1 + G_ph)^{-1} entering the
/// probability formula; symmetric for a physical covariance.
Matrix pattern_correlation_matrix(const CovarianceMatrix& photon_cov);

/// Repeated-index block expansion: entry (nu, mu) of each of the four
/// m_ph x m_ph blocks of C is replicated into an n_nu x n_mu block, giving a
/// symmetric matrix of order 2 * sum(n). Repetitions are block-contiguous;
/// any consistent order yields the same hafnian.
Matrix expand_pattern(const Matrix& C, const OccupationPattern& pattern);

/// Joint probability of the occupation pattern:
/// p = haf(C~) / (sqrt(det(1 + G_ph)) * prod n_nu!).
/// Throws NumericalError when the value has an imaginary residue above 1e-9
/// or is negative below -1e-9; otherwise the result is clipped to [0, 1].
double pattern_probability(const CovarianceMatrix& photon_cov,
                           const OccupationPattern& pattern);

} // namespace hafsim
