#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "hafsim/gaussian.hpp"
#include "hafsim/types.hpp"

namespace hafsim {

// ---------------------------------------------------------------------------
// Exact desk-scale sampling: exhaustive enumeration of the pattern
// distribution followed by inverse-CDF draws.
// ---------------------------------------------------------------------------

/// Enumerated pattern -> probability map up to a total-photon cutoff.
struct ProbabilityTable {
    std::vector<std::pair<OccupationPattern, double>> entries; ///< lexicographic
    int cutoff = 0;
    double deficit = 0.0; ///< 1 - sum of probabilities

    double total_mass() const { return 1.0 - deficit; }

    /// Probability of a pattern, 0 when absent from the table.
    double probability(const OccupationPattern& pattern) const;
};

/// All occupation patterns over `modes` modes with total <= total, in
/// lexicographic order.
std::vector<OccupationPattern> patterns_up_to_total(int modes, int total);

/// Suggests a total-photon cutoff from the geometric tail estimate based on
/// the spectral norm q of G (1+G)^{-1}: the mass beyond the cutoff is bounded
/// by a q-geometric tail. Returns a cutoff aiming at tail <= tail_bound,
/// clamped to [min_cutoff, 16].
int suggest_total_cutoff(const CovarianceMatrix& photon_cov,
                         double tail_bound = 1e-7,
                         int min_cutoff = 8);

/// All patterns with total <= total_cutoff, probabilities from the hafnian
/// formula, sorted lexicographically. Guards: m_ph <= 4, total_cutoff <= 16.
ProbabilityTable enumerate_distribution(const CovarianceMatrix& photon_cov,
                                        int total_cutoff);

/// Inverse-CDF sampling over the renormalized table. Deterministic for fixed
/// (seed, count). Requires deficit < 0.01.
std::vector<OccupationPattern> draw_samples(const ProbabilityTable& table,
                                            std::uint64_t seed,
                                            int count);

/// Serialization of a table as JSON and samples as CSV lines "n_1,...,n_mph".
void save_table(const ProbabilityTable& table, int m_ph, std::ostream& out);
ProbabilityTable load_table(std::istream& in, int* m_ph_out = nullptr);
void write_samples_csv(const std::vector<OccupationPattern>& samples,
                       std::ostream& out);

} // namespace hafsim
