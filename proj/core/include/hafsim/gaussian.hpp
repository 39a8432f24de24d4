#pragma once

#include <iosfwd>
#include <string>

#include "hafsim/symplectic.hpp"
#include "hafsim/types.hpp"

namespace hafsim {

// ---------------------------------------------------------------------------
// Thermal covariance matrices of the Gaussian state and derived single-mode
// statistics. The covariance is stored as the pair of M x M correlator blocks
//   N_jk = <b†_j b_k>   (normal),
//   A_jk = <b_j b_k>    (anomalous),
// from which the full 2M x 2M matrix [[N, A*], [A, N*]] is assembled on
// demand.
// ---------------------------------------------------------------------------

struct CovarianceMatrix {
    ModeLayout layout;
    Matrix normal;    ///< N, Hermitian with nonnegative spectrum
    Matrix anomalous; ///< A, symmetric

    int modes() const { return layout.total(); }

    /// Full 2M x 2M matrix [[N, A*], [A, N*]].
    Matrix full() const;

    /// Largest violation of the physicality invariants: Hermiticity of N,
    /// symmetry of A, nonnegativity of the N spectrum and the per-mode bound
    /// |A_jj|^2 <= N_jj (N_jj + 1).
    double physicality_residual() const;

    /// Throws DomainError when physicality_residual() exceeds tol.
    void require_physical(double tol = 1e-7) const;
};

/// Per-mode photon statistics derived from the covariance diagonal.
struct SingleModeStats {
    double eta = 0.0;       ///< mean occupation <a†a>
    Complex alpha{0.0, 0.0};///< anomalous correlator <aa>
    double alpha_c = 0.0;   ///< sqrt(eta^2 + eta/2), squeezing-visibility level
    double alpha_max = 0.0; ///< sqrt(eta^2 + eta), pure squeezed-vacuum bound
    double r_eff = 0.0;     ///< effective single-mode squeezing parameter
    double q_eff = 0.0;     ///< effective quasiparticle number before squeezing
};

/// Covariance of the state with quasiparticle occupations n_j = 1/(e^{E_j/T}-1):
/// G = R diag(n, n) R† + (R R† - 1)/2. T = 0 yields the pure quantum-depletion
/// term.
CovarianceMatrix covariance_from_quasiparticles(const BogoliubovTransform& R,
                                                const ModeLayout& layout,
                                                double temperature);

/// Covariance directly from the Hamiltonian, G = coth(J H / 2T) J / 2 - 1/2,
/// evaluated through an independent eigendecomposition of J H. Requires T > 0.
CovarianceMatrix covariance_via_coth(const GrandDynamicalMatrix& H,
                                     double temperature);

/// Restriction to the photon-photon correlator blocks as a standalone
/// m_ph-mode covariance.
CovarianceMatrix marginal_photon(const CovarianceMatrix& G);

/// Characteristic function of the joint occupation statistics,
/// Theta(z) = det(1 + (1 - Z) G)^{-1/2} with Z = diag(z, z). The square-root
/// branch is tracked continuously along the straight path from z = (1,...,1),
/// where Theta = 1.
Complex characteristic_function(const CovarianceMatrix& G, const Vector& z);

/// Stats of one photon mode: eta = N_mm, alpha = A_mm and the derived
/// characteristic values. Throws DomainError when |alpha| exceeds the
/// physical bound.
SingleModeStats single_mode_stats(const CovarianceMatrix& G, int mode);

/// JSON serialization: {"m_ph":…, "m_at":…, "N":[[re,im],…], "A":[[re,im],…]}
/// with row-major M^2 entry lists.
void save_covariance(const CovarianceMatrix& G, std::ostream& out);
CovarianceMatrix load_covariance(std::istream& in);
void save_covariance_file(const CovarianceMatrix& G, const std::string& path);
CovarianceMatrix load_covariance_file(const std::string& path);

} // namespace hafsim
