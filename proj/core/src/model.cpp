#include "hafsim/model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace hafsim {

namespace {

using nlohmann::json;

void check_finite(double x, const char* name) {
    if (!std::isfinite(x)) {
        throw DomainError(std::string(name) + " must be finite");
    }
}

Matrix conj_of(const Matrix& m) { return m.conjugate(); }

} // namespace

void ToyParams::validate() const {
    check_finite(hbar_omega, "hbar_omega");
    check_finite(epsilon, "epsilon");
    check_finite(gamma, "gamma");
    if (epsilon <= 0.0 || hbar_omega <= 0.0) {
        throw DomainError("ToyParams: bare energies must be positive");
    }
    if (N0 <= 0.0 || Q0 <= 0.0) {
        throw DomainError("ToyParams: N0 and Q0 must be positive");
    }
}

HamiltonianBlocks toy_blocks(const ToyParams& p) {
    p.validate();
    HamiltonianBlocks b;
    b.photon_energies = RealVector::Constant(1, p.hbar_omega);
    b.photon_photon = Matrix::Constant(1, 1, 2.0 * p.gamma * std::sqrt(p.N0 / p.Q0));
    b.co_atom_photon = Matrix::Constant(1, 1, p.gamma);
    b.counter_atom_photon = Matrix::Constant(1, 1, p.gamma);
    b.atom_atom = Matrix::Constant(1, 1, p.epsilon + 2.0 * p.gamma * std::sqrt(p.Q0 / p.N0));
    b.counter_atom_atom = Matrix::Zero(1, 1);
    return b;
}

GrandDynamicalMatrix build_toy_hamiltonian(const ToyParams& p) {
    return assemble_grand_matrix(toy_blocks(p), ModeLayout(1, 1));
}

GrandDynamicalMatrix assemble_grand_matrix(const HamiltonianBlocks& b,
                                           const ModeLayout& layout) {
    const int mp = layout.m_ph;
    const int ma = layout.m_at;
    const int M = layout.total();

    auto bad = [&](const char* what) {
        throw AssemblyError(std::string("assemble_grand_matrix: ") + what +
                            " has dimensions inconsistent with the layout");
    };
    if (b.photon_energies.size() != mp) bad("photon_energies");
    if (b.photon_photon.rows() != mp || b.photon_photon.cols() != mp) bad("photon_photon");
    if (b.co_atom_photon.rows() != mp || b.co_atom_photon.cols() != ma) bad("co_atom_photon");
    if (b.counter_atom_photon.rows() != mp || b.counter_atom_photon.cols() != ma) {
        bad("counter_atom_photon");
    }
    if (b.atom_atom.rows() != ma || b.atom_atom.cols() != ma) bad("atom_atom");
    if (b.counter_atom_atom.rows() != ma || b.counter_atom_atom.cols() != ma) {
        bad("counter_atom_atom");
    }

    // Co-rotating M x M super-block: photon energies plus photon-photon
    // exchange, atom-photon coupling, and the atomic block.
    Matrix co = Matrix::Zero(M, M);
    co.topLeftCorner(mp, mp) = b.photon_photon;
    co.topLeftCorner(mp, mp).diagonal() += b.photon_energies.cast<Complex>();
    if (ma > 0) {
        co.topRightCorner(mp, ma) = b.co_atom_photon;
        co.bottomLeftCorner(ma, mp) = b.co_atom_photon.adjoint();
        co.bottomRightCorner(ma, ma) = b.atom_atom;
    }

    // Counter-rotating super-block. The photon-photon corner stays zero for
    // every input.
    Matrix counter = Matrix::Zero(M, M);
    if (ma > 0) {
        counter.topRightCorner(mp, ma) = b.counter_atom_photon;
        counter.bottomLeftCorner(ma, mp) = b.counter_atom_photon.transpose();
        counter.bottomRightCorner(ma, ma) = b.counter_atom_atom;
    }

    GrandDynamicalMatrix H;
    H.layout = layout;
    H.mat.resize(2 * M, 2 * M);
    H.mat.topLeftCorner(M, M) = conj_of(co);
    H.mat.topRightCorner(M, M) = counter;
    H.mat.bottomLeftCorner(M, M) = conj_of(counter);
    H.mat.bottomRightCorner(M, M) = co;

    // Quadrature noise can break Hermiticity; record the defect, then remove
    // it exactly.
    Matrix defect = H.mat - H.mat.adjoint();
    H.hermiticity_residual = defect.cwiseAbs().maxCoeff();
    H.mat = 0.5 * (H.mat + H.mat.adjoint()).eval();
    return H;
}

void OverlapGrid::validate(double tol) const {
    const auto n = size();
    if (n == 0) {
        throw IngestionError("OverlapGrid: empty grid");
    }
    auto check_len = [&](std::size_t len, const char* what) {
        if (len != n) {
            throw IngestionError(std::string("OverlapGrid: ") + what +
                                 " length does not match the grid");
        }
    };
    if (!points.empty()) check_len(points.size(), "points");
    check_len(static_cast<std::size_t>(condensate.size()), "condensate");
    check_len(static_cast<std::size_t>(pump_rabi.size()), "pump_rabi");
    for (const auto& f : excited) check_len(static_cast<std::size_t>(f.size()), "excited");
    for (const auto& l : excited_laplacian) {
        check_len(static_cast<std::size_t>(l.size()), "excited_laplacian");
    }
    for (const auto& g : mode_rabi) check_len(static_cast<std::size_t>(g.size()), "mode_rabi");
    if (!excited_laplacian.empty() && excited_laplacian.size() != excited.size()) {
        throw IngestionError("OverlapGrid: one Laplacian array per excited mode required");
    }

    auto weighted = [&](const Vector& a, const Vector& b) {
        Complex s = 0.0;
        for (Eigen::Index g = 0; g < weights.size(); ++g) {
            s += weights[g] * std::conj(a[g]) * b[g];
        }
        return s;
    };

    const double norm0 = std::abs(weighted(condensate, condensate) - 1.0);
    if (norm0 > tol) {
        throw IngestionError("OverlapGrid: condensate wavefunction is not unit-normalized");
    }
    for (std::size_t j = 0; j < excited.size(); ++j) {
        for (std::size_t k = j; k < excited.size(); ++k) {
            const Complex o = weighted(excited[j], excited[k]);
            const double want = (j == k) ? 1.0 : 0.0;
            if (std::abs(o - want) > tol) {
                throw IngestionError("OverlapGrid: excited modes are not orthonormal");
            }
        }
        if (std::abs(weighted(excited[j], condensate)) > tol) {
            throw IngestionError("OverlapGrid: excited mode overlaps the condensate");
        }
    }
}

HamiltonianBlocks blocks_from_overlaps(const PhysicalInputs& inputs,
                                       const OverlapGrid& grid,
                                       const ModeLayout& layout) {
    if (inputs.detuning_a == 0.0) {
        throw DomainError("blocks_from_overlaps: detuning must be nonzero");
    }
    if (inputs.N0 < 1.0 || inputs.Q0 < 1.0) {
        throw DomainError("blocks_from_overlaps: N0 and Q0 must be at least 1");
    }
    grid.validate();
    const int mp = layout.m_ph;
    const int ma = layout.m_at;
    const auto n = static_cast<Eigen::Index>(grid.size());
    if (static_cast<int>(grid.mode_rabi.size()) != mp) {
        throw IngestionError("blocks_from_overlaps: one Rabi profile per photon mode required");
    }
    if (static_cast<int>(grid.excited.size()) != ma) {
        throw IngestionError("blocks_from_overlaps: one wavefunction per atomic mode required");
    }
    if (ma > 0 && static_cast<int>(grid.excited_laplacian.size()) != ma) {
        throw IngestionError("blocks_from_overlaps: Laplacian samples required for atomic modes");
    }
    if (inputs.trap_potential.size() != n || inputs.noncondensate_density.size() != n) {
        throw IngestionError("blocks_from_overlaps: potential and density samples must match the grid");
    }
    if (inputs.photon_energies.size() != mp) {
        throw IngestionError("blocks_from_overlaps: one photon energy per photon mode required");
    }

    const double inv_det = 1.0 / inputs.detuning_a;
    const double sqrtN0 = std::sqrt(inputs.N0);
    const auto& w = grid.weights;
    const auto& phi0 = grid.condensate;
    const auto& omega = grid.pump_rabi;

    HamiltonianBlocks b;
    b.photon_energies = inputs.photon_energies;

    b.photon_photon = Matrix::Zero(mp, mp);
    for (int nu = 0; nu < mp; ++nu) {
        for (int mu = 0; mu < mp; ++mu) {
            Complex s = 0.0;
            for (Eigen::Index g = 0; g < n; ++g) {
                s += w[g] * std::norm(phi0[g]) * std::conj(grid.mode_rabi[nu][g]) *
                     grid.mode_rabi[mu][g];
            }
            b.photon_photon(nu, mu) = inv_det * inputs.N0 * s;
        }
    }

    b.co_atom_photon = Matrix::Zero(mp, ma);
    b.counter_atom_photon = Matrix::Zero(mp, ma);
    for (int nu = 0; nu < mp; ++nu) {
        for (int j = 0; j < ma; ++j) {
            Complex co = 0.0;
            Complex counter = 0.0;
            for (Eigen::Index g = 0; g < n; ++g) {
                const Complex base = w[g] * std::conj(phi0[g]) * grid.excited[j][g];
                co += base * omega[g] * std::conj(grid.mode_rabi[nu][g]);
                counter += base * std::conj(omega[g]) * grid.mode_rabi[nu][g];
            }
            b.co_atom_photon(nu, j) = inv_det * sqrtN0 * co;
            b.counter_atom_photon(nu, j) = inv_det * sqrtN0 * counter;
        }
    }

    b.atom_atom = Matrix::Zero(ma, ma);
    b.counter_atom_atom = Matrix::Zero(ma, ma);
    const double kinetic = 1.0 / (2.0 * inputs.mass);
    for (int j = 0; j < ma; ++j) {
        for (int k = 0; k < ma; ++k) {
            Complex bare = 0.0;
            Complex light = 0.0;
            Complex pair = 0.0;
            for (Eigen::Index g = 0; g < n; ++g) {
                const Complex fj_conj = std::conj(grid.excited[j][g]);
                const double potential = inputs.trap_potential[g] - inputs.mu +
                                         2.0 * inputs.g_a *
                                             (inputs.N0 * std::norm(phi0[g]) +
                                              inputs.noncondensate_density[g]);
                bare += w[g] * fj_conj *
                        (-kinetic * grid.excited_laplacian[k][g] +
                         potential * grid.excited[k][g]);
                light += w[g] * fj_conj * std::norm(omega[g]) * grid.excited[k][g];
                pair += w[g] * grid.excited[j][g] * std::conj(phi0[g]) *
                        std::conj(phi0[g]) * grid.excited[k][g];
            }
            b.atom_atom(j, k) = bare + inv_det * light;
            b.counter_atom_atom(j, k) = 0.5 * inputs.g_a * inputs.N0 * pair;
        }
    }
    return b;
}

// ----------------------------- JSON ingestion ------------------------------

namespace {

Complex parse_complex(const json& v, const char* what) {
    if (v.is_number()) {
        return Complex(v.get<double>(), 0.0);
    }
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
        return Complex(v[0].get<double>(), v[1].get<double>());
    }
    throw IngestionError(std::string("OverlapGrid JSON: ") + what +
                         " entries must be numbers or [re, im] pairs");
}

Vector parse_complex_array(const json& arr, const char* what) {
    if (!arr.is_array()) {
        throw IngestionError(std::string("OverlapGrid JSON: ") + what + " must be an array");
    }
    Vector out(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) {
        out[static_cast<Eigen::Index>(i)] = parse_complex(arr[i], what);
    }
    return out;
}

std::vector<Vector> parse_complex_arrays(const json& arr, const char* what) {
    if (!arr.is_array()) {
        throw IngestionError(std::string("OverlapGrid JSON: ") + what +
                             " must be an array of arrays");
    }
    std::vector<Vector> out;
    out.reserve(arr.size());
    for (const auto& inner : arr) {
        out.push_back(parse_complex_array(inner, what));
    }
    return out;
}

} // namespace

OverlapGrid load_overlap_grid(std::istream& in) {
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw IngestionError(std::string("OverlapGrid JSON: parse failure: ") + e.what());
    }

    OverlapGrid grid;
    try {
        if (doc.contains("points")) {
            for (const auto& p : doc.at("points")) {
                if (!p.is_array() || p.size() != 3) {
                    throw IngestionError("OverlapGrid JSON: points must be [x, y, z] triples");
                }
                grid.points.push_back({p[0].get<double>(), p[1].get<double>(),
                                       p[2].get<double>()});
            }
        }
        const auto& wj = doc.at("weights");
        grid.weights.resize(static_cast<Eigen::Index>(wj.size()));
        for (std::size_t i = 0; i < wj.size(); ++i) {
            grid.weights[static_cast<Eigen::Index>(i)] = wj[i].get<double>();
        }
        grid.condensate = parse_complex_array(doc.at("phi0"), "phi0");
        grid.excited = parse_complex_arrays(doc.value("f", json::array()), "f");
        grid.excited_laplacian =
            parse_complex_arrays(doc.value("lap_f", json::array()), "lap_f");
        grid.pump_rabi = parse_complex_array(doc.at("omega"), "omega");
        grid.mode_rabi = parse_complex_arrays(doc.at("g"), "g");
    } catch (const json::exception& e) {
        throw IngestionError(std::string("OverlapGrid JSON: missing or malformed field: ") +
                             e.what());
    }
    grid.validate();
    return grid;
}

OverlapGrid load_overlap_grid_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IngestionError("cannot open overlap grid file: " + path);
    }
    return load_overlap_grid(in);
}

} // namespace hafsim
