#include "hafsim/gaussian.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace hafsim {

Matrix CovarianceMatrix::full() const {
    const int M = modes();
    Matrix G(2 * M, 2 * M);
    G.topLeftCorner(M, M) = normal;
    G.topRightCorner(M, M) = anomalous.conjugate();
    G.bottomLeftCorner(M, M) = anomalous;
    G.bottomRightCorner(M, M) = normal.conjugate();
    return G;
}

double CovarianceMatrix::physicality_residual() const {
    double resid = (normal - normal.adjoint()).cwiseAbs().maxCoeff();
    resid = std::max(resid, (anomalous - anomalous.transpose()).cwiseAbs().maxCoeff());

    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (normal + normal.adjoint()), Eigen::EigenvaluesOnly);
    resid = std::max(resid, std::max(0.0, -es.eigenvalues().minCoeff()));

    for (int m = 0; m < modes(); ++m) {
        const double eta = normal(m, m).real();
        const double excess = std::norm(anomalous(m, m)) - eta * (eta + 1.0);
        resid = std::max(resid, std::max(0.0, excess));
    }
    return resid;
}

void CovarianceMatrix::require_physical(double tol) const {
    const double resid = physicality_residual();
    if (resid > tol) {
        std::ostringstream msg;
        msg << "covariance violates physicality invariants (residual " << resid
            << ", tolerance " << tol << ")";
        throw DomainError(msg.str());
    }
}

CovarianceMatrix covariance_from_quasiparticles(const BogoliubovTransform& R,
                                                const ModeLayout& layout,
                                                double temperature) {
    const int M = R.modes();
    if (layout.total() != M) {
        throw DomainError("covariance_from_quasiparticles: layout does not match the transform");
    }
    if (temperature < 0.0) {
        throw DomainError("covariance_from_quasiparticles: temperature must be nonnegative");
    }

    RealVector occ = RealVector::Zero(M);
    if (temperature > 0.0) {
        for (int j = 0; j < M; ++j) {
            if (R.energies(j) <= 0.0) {
                throw DomainError("covariance_from_quasiparticles: nonpositive quasiparticle "
                                  "energy gives a divergent occupation");
            }
            occ(j) = 1.0 / std::expm1(R.energies(j) / temperature);
        }
    }

    const Matrix full = R.full();
    Vector occ2(2 * M);
    occ2 << occ.cast<Complex>(), occ.cast<Complex>();
    Matrix G = full * occ2.asDiagonal() * full.adjoint() +
               0.5 * (full * full.adjoint() - Matrix::Identity(2 * M, 2 * M));

    CovarianceMatrix out;
    out.layout = layout;
    out.normal = 0.5 * (G.topLeftCorner(M, M) + G.topLeftCorner(M, M).adjoint());
    out.anomalous = 0.5 * (G.bottomLeftCorner(M, M) + G.bottomLeftCorner(M, M).transpose());
    return out;
}

CovarianceMatrix covariance_via_coth(const GrandDynamicalMatrix& H, double temperature) {
    if (temperature <= 0.0) {
        throw DomainError("covariance_via_coth: temperature must be positive");
    }
    const int M = H.layout.total();
    const double scale = H.mat.cwiseAbs().maxCoeff();
    const Matrix J = symplectic_signature(M);

    // Independent route: general eigendecomposition of the non-Hermitian J H,
    // scalar coth on the (real) spectrum, then reassembly. A direct matrix
    // Pade evaluation of coth on J H is numerically fragile.
    Eigen::ComplexEigenSolver<Matrix> es(J * H.mat);
    if (es.info() != Eigen::Success) {
        throw NumericalError("covariance_via_coth: eigendecomposition failed");
    }
    Vector coth_vals(2 * M);
    for (Eigen::Index k = 0; k < 2 * M; ++k) {
        const Complex lambda = es.eigenvalues()(k);
        if (std::abs(lambda.imag()) > 1e-9 * scale || std::abs(lambda) <= 1e-10 * scale) {
            throw DomainError("covariance_via_coth: J H spectrum is complex or touches zero");
        }
        const double x = lambda.real() / temperature; // coth(x/2) = 1 + 2/(e^x - 1)
        coth_vals(k) = 1.0 + 2.0 / std::expm1(x);
    }

    const Matrix S = es.eigenvectors();
    Eigen::PartialPivLU<Matrix> lu(S);
    const Matrix f = S * coth_vals.asDiagonal() * lu.inverse();
    const Matrix G = 0.5 * f * J - 0.5 * Matrix::Identity(2 * M, 2 * M);

    CovarianceMatrix out;
    out.layout = H.layout;
    out.normal = 0.5 * (G.topLeftCorner(M, M) + G.topLeftCorner(M, M).adjoint());
    out.anomalous = 0.5 * (G.bottomLeftCorner(M, M) + G.bottomLeftCorner(M, M).transpose());
    return out;
}

CovarianceMatrix marginal_photon(const CovarianceMatrix& G) {
    const int mp = G.layout.m_ph;
    CovarianceMatrix out;
    out.layout = ModeLayout(mp, 0);
    out.normal = G.normal.topLeftCorner(mp, mp);
    out.anomalous = G.anomalous.topLeftCorner(mp, mp);
    return out;
}

Complex characteristic_function(const CovarianceMatrix& G, const Vector& z) {
    const int M = G.modes();
    if (z.size() != M) {
        throw DomainError("characteristic_function: need one z per mode");
    }
    const Matrix full = G.full();
    {
        Eigen::FullPivLU<Matrix> lu(Matrix::Identity(2 * M, 2 * M) + full);
        if (!lu.isInvertible()) {
            throw DomainError("characteristic_function: 1 + G is singular");
        }
    }

    // Theta(z)^-2 = det(1 + (1 - Z) G); track the phase of the determinant
    // continuously along the straight path from z = 1, where it equals one.
    const Vector dz = z - Vector::Ones(M);
    auto det_at = [&](double t) -> Complex {
        Vector d(2 * M);
        d.head(M) = -t * dz;
        d.tail(M) = -t * dz;
        const Matrix A = Matrix::Identity(2 * M, 2 * M) + d.asDiagonal() * full;
        return A.partialPivLu().determinant();
    };

    int steps = 16;
    const int max_steps = 1 << 20;
    while (true) {
        bool ok = true;
        double phase = 0.0;
        Complex prev(1.0, 0.0); // det at t = 0
        for (int k = 1; k <= steps && ok; ++k) {
            const Complex cur = det_at(static_cast<double>(k) / steps);
            if (cur == Complex(0.0, 0.0)) {
                throw DomainError("characteristic_function: determinant vanishes on the "
                                  "continuation path");
            }
            const double jump = std::arg(cur * std::conj(prev));
            if (std::abs(jump) > 1.5707963267948966) {
                ok = false;
                break;
            }
            phase += jump;
            prev = cur;
        }
        if (ok) {
            return std::exp(Complex(-0.5 * std::log(std::abs(prev)), -0.5 * phase));
        }
        if (steps >= max_steps) {
            throw DomainError("characteristic_function: branch tracking failed to converge");
        }
        steps *= 2;
    }
}

SingleModeStats single_mode_stats(const CovarianceMatrix& G, int mode) {
    if (mode < 0 || mode >= G.layout.m_ph) {
        throw DomainError("single_mode_stats: mode index out of range");
    }
    SingleModeStats s;
    s.eta = G.normal(mode, mode).real();
    s.alpha = G.anomalous(mode, mode);
    if (s.eta < -1e-9) {
        throw DomainError("single_mode_stats: negative mode occupation");
    }
    s.eta = std::max(s.eta, 0.0);
    s.alpha_c = std::sqrt(s.eta * s.eta + 0.5 * s.eta);
    s.alpha_max = std::sqrt(s.eta * s.eta + s.eta);
    const double a = std::abs(s.alpha);
    if (a * a > s.eta * (s.eta + 1.0) + 1e-9) {
        throw DomainError("single_mode_stats: anomalous correlator exceeds the physical bound");
    }
    const double a_clipped = std::min(a, s.alpha_max);
    s.r_eff = 0.5 * std::atanh(a_clipped / (s.eta + 0.5));
    const double q2 = (s.eta + 0.5) * (s.eta + 0.5) - a_clipped * a_clipped;
    s.q_eff = std::max(std::sqrt(std::max(q2, 0.0)) - 0.5, 0.0);
    return s;
}

// --------------------------------- JSON ------------------------------------

namespace {

using nlohmann::json;

json complex_matrix_to_json(const Matrix& m) {
    json out = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            out.push_back({m(i, j).real(), m(i, j).imag()});
        }
    }
    return out;
}

Matrix complex_matrix_from_json(const json& arr, int rows, int cols, const char* what) {
    if (!arr.is_array() || arr.size() != static_cast<std::size_t>(rows) * cols) {
        throw IngestionError(std::string("covariance JSON: ") + what +
                             " must hold rows*cols [re, im] pairs");
    }
    Matrix m(rows, cols);
    std::size_t idx = 0;
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j, ++idx) {
            const auto& e = arr[idx];
            if (!e.is_array() || e.size() != 2) {
                throw IngestionError(std::string("covariance JSON: ") + what +
                                     " entries must be [re, im] pairs");
            }
            m(i, j) = Complex(e[0].get<double>(), e[1].get<double>());
        }
    }
    return m;
}

} // namespace

void save_covariance(const CovarianceMatrix& G, std::ostream& out) {
    json doc;
    doc["m_ph"] = G.layout.m_ph;
    doc["m_at"] = G.layout.m_at;
    doc["N"] = complex_matrix_to_json(G.normal);
    doc["A"] = complex_matrix_to_json(G.anomalous);
    out << doc.dump(2) << "\n";
}

CovarianceMatrix load_covariance(std::istream& in) {
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw IngestionError(std::string("covariance JSON: parse failure: ") + e.what());
    }
    CovarianceMatrix G;
    try {
        G.layout = ModeLayout(doc.at("m_ph").get<int>(), doc.at("m_at").get<int>());
        const int M = G.layout.total();
        G.normal = complex_matrix_from_json(doc.at("N"), M, M, "N");
        G.anomalous = complex_matrix_from_json(doc.at("A"), M, M, "A");
    } catch (const json::exception& e) {
        throw IngestionError(std::string("covariance JSON: missing field: ") + e.what());
    }
    return G;
}

void save_covariance_file(const CovarianceMatrix& G, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw IngestionError("cannot open covariance file for writing: " + path);
    }
    save_covariance(G, out);
}

CovarianceMatrix load_covariance_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IngestionError("cannot open covariance file: " + path);
    }
    return load_covariance(in);
}

} // namespace hafsim
