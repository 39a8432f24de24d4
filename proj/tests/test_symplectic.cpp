#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hafsim/symplectic.hpp"
#include "support/test_helpers.hpp"

using namespace hafsim;

namespace {

GrandDynamicalMatrix single_mode(double omega, double delta) {
    GrandDynamicalMatrix H;
    H.layout = ModeLayout(1, 0);
    H.mat.resize(2, 2);
    H.mat << omega, delta, delta, omega;
    return H;
}

double diagonalization_residual(const GrandDynamicalMatrix& H, const BogoliubovTransform& R) {
    const int M = R.modes();
    Matrix D = Matrix::Zero(2 * M, 2 * M);
    D.diagonal().head(M) = R.energies.cast<Complex>();
    D.diagonal().tail(M) = R.energies.cast<Complex>();
    const Matrix full = R.full();
    return (full.adjoint() * H.mat * full - D).cwiseAbs().maxCoeff();
}

} // namespace

TEST_CASE("decoupled toy model diagonalizes trivially") {
    SUBCASE("photon below atom keeps the identity transform") {
        ToyParams p = testing::figure_point(0.0);
        p.hbar_omega = 1.0;
        p.epsilon = 2.0;
        const auto R = solve_bdg(build_toy_hamiltonian(p));
        CHECK(R.energies(0) == doctest::Approx(1.0));
        CHECK(R.energies(1) == doctest::Approx(2.0));
        CHECK((R.U - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK(R.V.cwiseAbs().maxCoeff() <= 1e-14);
    }
    SUBCASE("published energies sort ascending across the mode order") {
        // hbar_omega = 2, epsilon = 1: the atomic branch comes first, so U is
        // the corresponding permutation.
        const auto R = solve_bdg(build_toy_hamiltonian(testing::figure_point(0.0)));
        CHECK(R.energies(0) == doctest::Approx(1.0));
        CHECK(R.energies(1) == doctest::Approx(2.0));
        Matrix perm(2, 2);
        perm << 0, 1, 1, 0;
        CHECK((R.U - perm).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK(R.V.cwiseAbs().maxCoeff() <= 1e-14);
    }
}

TEST_CASE("single squeezed mode against the closed form") {
    // omega = 1, delta = 0.6: E = 0.8 and |V/U| = tanh(artanh(0.6)/2) = 1/3.
    const auto H = single_mode(1.0, 0.6);
    const auto R = solve_bdg(H);
    CHECK(R.energies(0) == doctest::Approx(0.8).epsilon(1e-12));
    const double ratio = std::abs(R.V(0, 0)) / std::abs(R.U(0, 0));
    CHECK(ratio == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(diagonalization_residual(H, R) <= 1e-12);
}

TEST_CASE("published toy point satisfies the transform contracts") {
    const auto H = build_toy_hamiltonian(testing::figure_point(0.5));
    const auto R = solve_bdg(H);
    CHECK(check_pseudo_unitarity(R) <= 1e-10);
    CHECK(diagonalization_residual(H, R) <= 1e-9);
    CHECK(R.energies.minCoeff() > 0.0);
    CHECK(R.energies(0) <= R.energies(1));
}

TEST_CASE("random stable Hamiltonians keep every invariant") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 30; ++trial) {
        const int m_ph = 1 + static_cast<int>(rng() % 3);
        const int m_at = static_cast<int>(rng() % 3);
        const ModeLayout layout(m_ph, m_at);
        const auto H = testing::random_stable_hamiltonian(layout, rng);
        const auto R = solve_bdg(H);
        CHECK(check_pseudo_unitarity(R) <= 1e-10);
        CHECK(diagonalization_residual(H, R) <= 1e-9 * H.mat.cwiseAbs().maxCoeff());
        CHECK(R.energies.minCoeff() > 0.0);

        // U†U - V†V = 1 and U^T V symmetric restate pseudo-unitarity on the
        // block level.
        const int M = layout.total();
        CHECK((R.U.adjoint() * R.U - R.V.adjoint() * R.V - Matrix::Identity(M, M))
                  .cwiseAbs()
                  .maxCoeff() <= 1e-10);
        const Matrix utv = R.U.transpose() * R.V;
        CHECK((utv - utv.transpose()).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("eigenvalues of J H pair up and match the returned energies") {
    std::mt19937_64 rng(77);
    const ModeLayout layout(2, 1);
    const auto H = testing::random_stable_hamiltonian(layout, rng);
    const auto R = solve_bdg(H);
    const int M = layout.total();

    Eigen::ComplexEigenSolver<Matrix> es(symplectic_signature(M) * H.mat);
    std::vector<double> spectrum;
    for (int k = 0; k < 2 * M; ++k) {
        CHECK(std::abs(es.eigenvalues()(k).imag()) <= 1e-9);
        spectrum.push_back(es.eigenvalues()(k).real());
    }
    std::sort(spectrum.begin(), spectrum.end());
    for (int j = 0; j < M; ++j) {
        CHECK(spectrum[static_cast<std::size_t>(M + j)] ==
              doctest::Approx(R.energies(j)).epsilon(1e-9));
        CHECK(spectrum[static_cast<std::size_t>(M - 1 - j)] ==
              doctest::Approx(-R.energies(j)).epsilon(1e-9));
    }
}

TEST_CASE("pseudo-unitarity diagnostic") {
    BogoliubovTransform id;
    id.U = Matrix::Identity(3, 3);
    id.V = Matrix::Zero(3, 3);
    id.energies = RealVector::Ones(3);
    CHECK(check_pseudo_unitarity(id) == 0.0);

    std::mt19937_64 rng(5);
    auto R = testing::random_symplectic(3, rng);
    CHECK(check_pseudo_unitarity(R) <= 1e-10);
    R.V *= 2.0; // deliberate corruption
    CHECK(check_pseudo_unitarity(R) > 0.1);
}

TEST_CASE("instability and domain errors") {
    SUBCASE("dynamically unstable single mode") {
        CHECK_THROWS_AS(solve_bdg(single_mode(1.0, 1.4)), InstabilityError);
    }
    SUBCASE("critical single mode") {
        CHECK_THROWS_AS(solve_bdg(single_mode(1.0, 1.0)), InstabilityError);
    }
    SUBCASE("negative-energy mode") {
        GrandDynamicalMatrix H;
        H.layout = ModeLayout(1, 0);
        H.mat = -Matrix::Identity(2, 2);
        CHECK_THROWS_AS(solve_bdg(H), InstabilityError);
    }
    SUBCASE("non-Hermitian input") {
        GrandDynamicalMatrix H;
        H.layout = ModeLayout(1, 0);
        H.mat.resize(2, 2);
        H.mat << 1.0, Complex(0.0, 0.5), Complex(0.0, 0.5), 1.0;
        CHECK_THROWS_AS(solve_bdg(H), DomainError);
    }
}

TEST_CASE("Bloch-Messiah on canonical transforms") {
    SUBCASE("identity transform") {
        BogoliubovTransform R;
        R.U = Matrix::Identity(2, 2);
        R.V = Matrix::Zero(2, 2);
        R.energies = RealVector::Ones(2);
        const auto f = bloch_messiah(R);
        CHECK(f.squeezing.cwiseAbs().maxCoeff() <= 1e-12);
        CHECK((f.passive_left * f.passive_right - Matrix::Identity(2, 2))
                  .cwiseAbs()
                  .maxCoeff() <= 1e-12);
    }
    SUBCASE("single-mode squeezer") {
        const double s = 0.9;
        BogoliubovTransform R;
        R.U = Matrix::Constant(1, 1, std::cosh(s));
        R.V = Matrix::Constant(1, 1, std::sinh(s));
        R.energies = RealVector::Ones(1);
        const auto f = bloch_messiah(R);
        CHECK(f.squeezing(0) == doctest::Approx(s).epsilon(1e-12));
        CHECK(std::abs(f.passive_left(0, 0)) == doctest::Approx(1.0));
        CHECK(std::abs(f.passive_right(0, 0)) == doctest::Approx(1.0));
        CHECK((f.reconstruct() - R.full()).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("Bloch-Messiah reconstructs random symplectic transforms") {
    std::mt19937_64 rng(31415);
    for (int trial = 0; trial < 20; ++trial) {
        const int modes = 1 + static_cast<int>(rng() % 4);
        const auto R = testing::random_symplectic(modes, rng);
        const auto f = bloch_messiah(R);
        const double scale = std::max(1.0, R.full().cwiseAbs().maxCoeff());
        CHECK((f.reconstruct() - R.full()).cwiseAbs().maxCoeff() <= 1e-9 * scale);
        CHECK((f.passive_left * f.passive_left.adjoint() - Matrix::Identity(modes, modes))
                  .cwiseAbs()
                  .maxCoeff() <= 1e-10);
        CHECK((f.passive_right * f.passive_right.adjoint() - Matrix::Identity(modes, modes))
                  .cwiseAbs()
                  .maxCoeff() <= 1e-10);
        CHECK(f.squeezing.minCoeff() >= 0.0);
        for (int j = 0; j + 1 < modes; ++j) {
            CHECK(f.squeezing(j) >= f.squeezing(j + 1) - 1e-12);
        }
    }
}

TEST_CASE("degenerate squeezing values reconstruct as well") {
    // Identity-proportional squeezing block gives equal singular values of V,
    // exercising the degenerate Takagi group handling.
    const int modes = 3;
    Matrix X = Matrix::Zero(2 * modes, 2 * modes);
    X.topRightCorner(modes, modes) = 0.7 * Matrix::Identity(modes, modes);
    X.bottomLeftCorner(modes, modes) = 0.7 * Matrix::Identity(modes, modes);

    const Matrix Rm = X.exp();
    BogoliubovTransform R;
    R.U = Rm.topLeftCorner(modes, modes);
    R.V = Rm.bottomLeftCorner(modes, modes);
    R.energies = RealVector::Ones(modes);

    const auto f = bloch_messiah(R);
    for (int j = 0; j < modes; ++j) {
        CHECK(f.squeezing(j) == doctest::Approx(0.7).epsilon(1e-10));
    }
    CHECK((f.reconstruct() - R.full()).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("singular values of R pair up as exp(+r), exp(-r)") {
    std::mt19937_64 rng(271828);
    const auto R = testing::random_symplectic(3, rng);
    const auto f = bloch_messiah(R);
    Eigen::JacobiSVD<Matrix> svd(R.full());
    const auto& sv = svd.singularValues();
    for (int j = 0; j < 3; ++j) {
        CHECK(sv(j) == doctest::Approx(std::exp(f.squeezing(j))).epsilon(1e-9));
        CHECK(sv(5 - j) == doctest::Approx(std::exp(-f.squeezing(j))).epsilon(1e-9));
    }
}

TEST_CASE("Bloch-Messiah is idempotent on the squeezing spectrum") {
    std::mt19937_64 rng(616);
    const auto R = testing::random_symplectic(4, rng);
    const auto f = bloch_messiah(R);

    BogoliubovTransform rebuilt;
    const Matrix Rm = f.reconstruct();
    rebuilt.U = Rm.topLeftCorner(4, 4);
    rebuilt.V = Rm.bottomLeftCorner(4, 4);
    rebuilt.energies = RealVector::Ones(4);
    const auto f2 = bloch_messiah(rebuilt);
    for (int j = 0; j < 4; ++j) {
        CHECK(f2.squeezing(j) == doctest::Approx(f.squeezing(j)).epsilon(1e-9));
    }
}

TEST_CASE("Bloch-Messiah rejects corrupted transforms") {
    std::mt19937_64 rng(8);
    auto R = testing::random_symplectic(2, rng);
    R.V *= 1.5;
    CHECK_THROWS_AS(bloch_messiah(R), DomainError);
}

TEST_CASE("solve_bdg feeds Bloch-Messiah end to end") {
    std::mt19937_64 rng(1001);
    const auto H = testing::random_stable_hamiltonian(ModeLayout(2, 2), rng);
    const auto R = solve_bdg(H);
    const auto f = bloch_messiah(R);
    const double scale = std::max(1.0, R.full().cwiseAbs().maxCoeff());
    CHECK((f.reconstruct() - R.full()).cwiseAbs().maxCoeff() <= 1e-9 * scale);
}
