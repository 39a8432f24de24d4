#include "hafsim/symplectic.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hafsim {

Matrix symplectic_signature(int modes) {
    Matrix J = Matrix::Zero(2 * modes, 2 * modes);
    for (int i = 0; i < modes; ++i) {
        J(i, i) = 1.0;
        J(modes + i, modes + i) = -1.0;
    }
    return J;
}

Matrix BogoliubovTransform::full() const {
    const int M = modes();
    Matrix R(2 * M, 2 * M);
    R.topLeftCorner(M, M) = U;
    R.topRightCorner(M, M) = V.conjugate();
    R.bottomLeftCorner(M, M) = V;
    R.bottomRightCorner(M, M) = U.conjugate();
    return R;
}

namespace {

// Rotate each quasiparticle column so its largest-magnitude entry is real
// positive; ties broken by the lowest row index. Downstream covariances are
// phase-invariant, the canonical choice just makes outputs reproducible.
void canonicalize_phases(Matrix& U, Matrix& V) {
    const Eigen::Index M = U.rows();
    for (Eigen::Index j = 0; j < U.cols(); ++j) {
        Complex pivot = 0.0;
        double best = -1.0;
        for (Eigen::Index i = 0; i < 2 * M; ++i) {
            const Complex v = (i < M) ? U(i, j) : V(i - M, j);
            if (std::abs(v) > best * (1.0 + 1e-12)) {
                best = std::abs(v);
                pivot = v;
            }
        }
        if (best <= 0.0) continue;
        const Complex phase = std::conj(pivot) / std::abs(pivot);
        U.col(j) *= phase;
        V.col(j) *= phase;
    }
}

[[noreturn]] void throw_instability(const Matrix& Hs, const Matrix& J, double scale) {
    // The Cholesky route has already failed; classify the spectrum of J H to
    // report what kind of instability was hit.
    Eigen::ComplexEigenSolver<Matrix> es(J * Hs, false);
    double max_imag = 0.0;
    double min_abs = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        max_imag = std::max(max_imag, std::abs(es.eigenvalues()[i].imag()));
        min_abs = std::min(min_abs, std::abs(es.eigenvalues()[i]));
    }
    std::ostringstream msg;
    msg << "solve_bdg: state is not thermalizable; ";
    if (max_imag > 1e-10 * scale) {
        msg << "J H has complex eigenvalues (max imaginary part " << max_imag << ")";
    } else if (min_abs <= 1e-10 * scale) {
        msg << "J H has an eigenvalue at zero (min magnitude " << min_abs << ")";
    } else {
        msg << "H is not positive definite (negative-norm mode)";
    }
    throw InstabilityError(msg.str());
}

} // namespace

BogoliubovTransform solve_bdg(const GrandDynamicalMatrix& H) {
    const int M = H.layout.total();
    if (H.mat.rows() != 2 * M || H.mat.cols() != 2 * M) {
        throw DomainError("solve_bdg: matrix size does not match the layout");
    }
    const double scale = H.mat.cwiseAbs().maxCoeff();
    if (scale == 0.0) {
        throw InstabilityError("solve_bdg: zero Hamiltonian");
    }
    const double herm = (H.mat - H.mat.adjoint()).cwiseAbs().maxCoeff();
    if (herm > 1e-10 * scale) {
        throw DomainError("solve_bdg: H is not Hermitian");
    }
    const Matrix Hs = 0.5 * (H.mat + H.mat.adjoint());
    const Matrix J = symplectic_signature(M);

    // Cholesky reduction: with H = K† K the spectrum of J H equals that of
    // the Hermitian K J K†, so one Hermitian eigensolve yields J-orthonormal
    // quasiparticle columns even across degeneracies.
    Eigen::LLT<Matrix> llt(Hs);
    if (llt.info() != Eigen::Success) {
        throw_instability(Hs, J, scale);
    }
    const Matrix L = llt.matrixL();
    Matrix W = L.adjoint() * J * L;
    W = 0.5 * (W + W.adjoint()).eval();

    Eigen::SelfAdjointEigenSolver<Matrix> es(W);
    if (es.info() != Eigen::Success) {
        throw NumericalError("solve_bdg: eigendecomposition failed");
    }
    const RealVector evals = es.eigenvalues(); // ascending
    const double floor = 1e-10 * scale;
    if (evals(M - 1) > -floor || evals(M) < floor) {
        throw_instability(Hs, J, scale);
    }

    const RealVector energies = evals.tail(M);
    const Matrix scaled = es.eigenvectors().rightCols(M) *
                          energies.cwiseSqrt().asDiagonal();
    const Matrix X = L.adjoint().triangularView<Eigen::Upper>().solve(scaled);

    BogoliubovTransform R;
    R.U = X.topRows(M);
    R.V = X.bottomRows(M);
    R.energies = energies;
    canonicalize_phases(R.U, R.V);
    return R;
}

double check_pseudo_unitarity(const BogoliubovTransform& R) {
    const int M = R.modes();
    const Matrix full = R.full();
    const Matrix J = symplectic_signature(M);
    const double r1 = (full.adjoint() * J * full - J).cwiseAbs().maxCoeff();
    const Matrix inv = J * full.adjoint() * J; // candidate inverse
    const double r2 =
        (full * inv - Matrix::Identity(2 * M, 2 * M)).cwiseAbs().maxCoeff();
    return std::max(r1, r2);
}

// ------------------------------ Takagi ------------------------------------

namespace {

// Takagi factorization A = F diag(sigma) F^T of a complex symmetric matrix
// through the real symmetric embedding [[Re A, Im A], [Im A, -Re A]], whose
// +sigma eigenvectors (p, q) give Takagi vectors x = p + i q. Columns are
// returned with sigma descending; the kernel is completed unitarily.
std::pair<Matrix, RealVector> takagi_symmetric(const Matrix& A) {
    const Eigen::Index n = A.rows();
    Eigen::MatrixXd B(2 * n, 2 * n);
    B.topLeftCorner(n, n) = A.real();
    B.topRightCorner(n, n) = A.imag();
    B.bottomLeftCorner(n, n) = A.imag();
    B.bottomRightCorner(n, n) = -A.real();
    B = 0.5 * (B + B.transpose()).eval();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
    if (es.info() != Eigen::Success) {
        throw NumericalError("takagi: eigendecomposition failed");
    }
    const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    const double zero_tol = 1e-13 * scale * static_cast<double>(n);

    // Positive eigenvalues, descending.
    std::vector<Eigen::Index> pos;
    for (Eigen::Index i = 2 * n - 1; i >= 0; --i) {
        if (es.eigenvalues()(i) > zero_tol) pos.push_back(i);
    }
    const auto k = static_cast<Eigen::Index>(pos.size());

    Matrix F(n, n);
    RealVector sigma = RealVector::Zero(n);
    for (Eigen::Index c = 0; c < k; ++c) {
        const auto vec = es.eigenvectors().col(pos[static_cast<std::size_t>(c)]);
        Vector x = vec.head(n).cast<Complex>() + Complex(0.0, 1.0) * vec.tail(n).cast<Complex>();
        F.col(c) = x / x.norm();
        sigma(c) = es.eigenvalues()(pos[static_cast<std::size_t>(c)]);
    }
    if (k == 0) {
        F = Matrix::Identity(n, n);
    } else if (k < n) {
        // Orthonormal completion of the column space; the zero-sigma block is
        // free up to any unitary.
        Eigen::HouseholderQR<Matrix> qr(F.leftCols(k));
        const Matrix Q = qr.householderQ();
        F.rightCols(n - k) = Q.rightCols(n - k);
    }
    return {F, sigma};
}

} // namespace

Matrix BlochMessiahFactors::reconstruct() const {
    const auto M = static_cast<Eigen::Index>(squeezing.size());
    const Vector ch = squeezing.array().cosh().cast<Complex>();
    const Vector sh = squeezing.array().sinh().cast<Complex>();
    Matrix R(2 * M, 2 * M);
    const Matrix U = passive_left * ch.asDiagonal() * passive_right;
    const Matrix V = passive_left.conjugate() * sh.asDiagonal() * passive_right;
    R.topLeftCorner(M, M) = U;
    R.topRightCorner(M, M) = V.conjugate();
    R.bottomLeftCorner(M, M) = V;
    R.bottomRightCorner(M, M) = U.conjugate();
    return R;
}

BlochMessiahFactors bloch_messiah(const BogoliubovTransform& R, double unitarity_tol) {
    const double residual = check_pseudo_unitarity(R);
    if (residual > unitarity_tol) {
        std::ostringstream msg;
        msg << "bloch_messiah: transform fails pseudo-unitarity (residual " << residual
            << ", tolerance " << unitarity_tol << ")";
        throw DomainError(msg.str());
    }
    const Eigen::Index M = R.U.rows();

    // Squeezing parameters from the singular values of V (descending).
    Eigen::JacobiSVD<Matrix> svd(R.V);
    RealVector r(M);
    for (Eigen::Index j = 0; j < M; ++j) {
        r(j) = std::asinh(svd.singularValues()(j));
    }

    // U V† = U1 cosh(r) sinh(r) U1^T fixes the left unitary through a Takagi
    // factorization; its degenerate-block freedom (real orthogonal) is exactly
    // the freedom the factorization admits.
    Matrix B = R.U * R.V.adjoint();
    B = 0.5 * (B + B.transpose()).eval();
    auto [U1, sigma] = takagi_symmetric(B);
    (void)sigma;

    BlochMessiahFactors f;
    f.squeezing = r;
    f.passive_left = U1;
    f.passive_right = U1.adjoint() * R.U;
    for (Eigen::Index j = 0; j < M; ++j) {
        f.passive_right.row(j) /= std::cosh(r(j));
    }
    return f;
}

} // namespace hafsim
