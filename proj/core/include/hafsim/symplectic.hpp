#pragma once

#include "hafsim/model.hpp"
#include "hafsim/types.hpp"

namespace hafsim {

// ---------------------------------------------------------------------------
// Bogoliubov diagonalization of the grand-dynamical matrix and the
// Bloch-Messiah reduction of the resulting symplectic transform.
// ---------------------------------------------------------------------------

/// Complex symplectic transform R = [[U, V*], [V, U*]] mapping quasiparticle
/// ladder operators to the physical modes, together with the positive
/// quasiparticle energies. Satisfies R† J R = J with J = diag(+1, -1) blocks.
struct BogoliubovTransform {
    Matrix U;           ///< M x M
    Matrix V;           ///< M x M
    RealVector energies;///< length M, positive, ascending

    int modes() const { return static_cast<int>(energies.size()); }

    /// Assembles the full 2M x 2M matrix [[U, V*], [V, U*]].
    Matrix full() const;
};

/// Factors of R = diag(U1, U1*) · [[cosh r, sinh r], [sinh r, cosh r]]
/// · diag(U2, U2*): two passive unitaries around a layer of single-mode
/// squeezers.
struct BlochMessiahFactors {
    Matrix passive_left;  ///< U1, M x M unitary
    Matrix passive_right; ///< U2, M x M unitary
    RealVector squeezing; ///< r_j >= 0, descending

    Matrix reconstruct() const;
};

/// The signature matrix J = diag(+1_M, -1_M).
Matrix symplectic_signature(int modes);

/// Solves the bosonic eigenproblem J H R = R diag(+E, -E) for a Hermitian,
/// positive-definite H via Cholesky reduction to a Hermitian eigenproblem.
/// Column phases are canonicalized (largest entry real positive) and energies
/// are returned ascending.
///
/// Throws DomainError when H is not Hermitian and InstabilityError when the
/// spectrum is complex, touches zero, or H is not positive definite.
BogoliubovTransform solve_bdg(const GrandDynamicalMatrix& H);

/// Max-norm residual of R† J R - J, combined with the residual of the
/// inversion identity R · (J R† J) = 1. Diagnostic only, never throws.
double check_pseudo_unitarity(const BogoliubovTransform& R);

/// Bloch-Messiah reduction. Squeezing parameters are arcsinh of the singular
/// values of V, sorted descending. Throws DomainError when R fails the
/// pseudo-unitarity check.
BlochMessiahFactors bloch_messiah(const BogoliubovTransform& R,
                                  double unitarity_tol = 1e-8);

} // namespace hafsim
