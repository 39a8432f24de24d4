#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "hafsim/types.hpp"

namespace hafsim {

// ---------------------------------------------------------------------------
// Quadratic-Hamiltonian construction for the hybrid atom-photon system.
//
// The central object is the 2M x 2M Hermitian coefficient matrix of the
// quadratic form (the grand-dynamical matrix). Energies are expressed in a
// single user-declared unit with hbar = 1, i.e. all "frequencies" (detuning,
// Rabi profiles, photon energies) are supplied as energies.
// ---------------------------------------------------------------------------

/// Coefficient matrix of the quadratic Hamiltonian over the extended
/// (annihilators, creators) mode vector.
struct GrandDynamicalMatrix {
    ModeLayout layout;
    Matrix mat; ///< 2M x 2M, Hermitian after assembly
    /// Max-norm Hermiticity defect measured before the final symmetrization.
    double hermiticity_residual = 0.0;

    int dim() const { return 2 * layout.total(); }
};

/// Parameters of the minimal two-mode (one photon, one atom) model.
struct ToyParams {
    double hbar_omega = 2.0; ///< photon bare energy
    double epsilon = 1.0;    ///< atomic bare energy
    double gamma = 0.0;      ///< intermode interaction strength
    double N0 = 1.0;         ///< condensate occupation
    double Q0 = 7.0;         ///< coherent-mode photon number

    void validate() const;
};

/// The independent blocks of the grand-dynamical matrix. The counter-rotating
/// photon-photon block is identically zero and therefore absent by
/// construction.
struct HamiltonianBlocks {
    RealVector photon_energies;  ///< diagonal of the bare photon block, length m_ph
    Matrix photon_photon;        ///< co-rotating photon-photon, m_ph x m_ph Hermitian
    Matrix co_atom_photon;       ///< co-rotating atom-photon, m_ph x m_at
    Matrix counter_atom_photon;  ///< counter-rotating atom-photon, m_ph x m_at
    Matrix atom_atom;            ///< bare + co-rotating atomic block, m_at x m_at Hermitian
    Matrix counter_atom_atom;    ///< counter-rotating atomic block, m_at x m_at symmetric
};

/// Scalar physical inputs for building blocks from spatial overlap integrals.
struct PhysicalInputs {
    double detuning_a = 1.0; ///< atom-pump detuning (energy units, nonzero)
    double N0 = 1.0;         ///< condensate occupation
    double Q0 = 1.0;         ///< coherent-mode photon number
    double g_a = 0.0;        ///< s-wave coupling constant
    double mu = 0.0;         ///< chemical potential
    double mass = 1.0;       ///< atomic mass (kinetic coefficient 1/(2 mass))
    RealVector trap_potential;        ///< V_tr samples on the grid
    RealVector noncondensate_density; ///< mean noncondensate density samples
    RealVector photon_energies;       ///< rotating-frame photon energies, length m_ph
};

/// Discretized spatial profiles with quadrature weights. All arrays share the
/// grid length; wavefunction arrays must satisfy the normalization and
/// orthogonality conditions checked by validate().
struct OverlapGrid {
    std::vector<std::array<double, 3>> points;
    RealVector weights;
    Vector condensate;                    ///< condensate wavefunction samples
    std::vector<Vector> excited;          ///< excited atomic wavefunctions f_j
    std::vector<Vector> excited_laplacian;///< precomputed Laplacian samples of f_j
    Vector pump_rabi;                     ///< classical Rabi-frequency profile
    std::vector<Vector> mode_rabi;        ///< quantum-mode Rabi profiles, one per photon mode

    std::size_t size() const { return static_cast<std::size_t>(weights.size()); }

    /// Checks array lengths and the wavefunction quadrature identities
    /// (unit condensate norm, orthonormal excited modes, condensate
    /// orthogonality) within tolerance. Throws IngestionError on failure.
    void validate(double tol = 1e-6) const;
};

/// Builds the exact 4x4 two-mode matrix: bare energies shifted by
/// 2*gamma*sqrt(N0/Q0) (photon) and 2*gamma*sqrt(Q0/N0) (atom), all atom-photon
/// couplings equal to gamma, photon-photon counter-rotating entries zero.
GrandDynamicalMatrix build_toy_hamiltonian(const ToyParams& params);

/// Toy-model blocks used by build_toy_hamiltonian; exposed so the two
/// construction paths can be compared directly.
HamiltonianBlocks toy_blocks(const ToyParams& params);

/// Evaluates every Hamiltonian block as a quadrature sum over the grid.
HamiltonianBlocks blocks_from_overlaps(const PhysicalInputs& inputs,
                                       const OverlapGrid& grid,
                                       const ModeLayout& layout);

/// Places blocks into the 2M x 2M matrix, with co-rotating blocks on the
/// diagonal super-blocks and counter-rotating blocks on the anti-diagonal
/// ones, then symmetrizes. The defect removed by symmetrization is recorded
/// in hermiticity_residual.
GrandDynamicalMatrix assemble_grand_matrix(const HamiltonianBlocks& blocks,
                                           const ModeLayout& layout);

/// Reads an OverlapGrid from its JSON representation.
OverlapGrid load_overlap_grid(std::istream& in);
OverlapGrid load_overlap_grid_file(const std::string& path);

} // namespace hafsim
