#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "hafsim/gaussian.hpp"
#include "hafsim/hafnian.hpp"
#include "support/test_helpers.hpp"

using namespace hafsim;

namespace {

double bose_einstein(double energy, double temperature) {
    return 1.0 / std::expm1(energy / temperature);
}

CovarianceMatrix toy_covariance(double gamma, double temperature) {
    const auto H = build_toy_hamiltonian(testing::figure_point(gamma));
    return covariance_from_quasiparticles(solve_bdg(H), H.layout, temperature);
}

} // namespace

TEST_CASE("decoupled toy model is a pair of thermal modes") {
    const double T = 0.8;
    const auto G = toy_covariance(0.0, T);
    CHECK(G.anomalous.cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(std::abs(G.normal(0, 1)) <= 1e-12);
    CHECK(G.normal(0, 0).real() == doctest::Approx(bose_einstein(2.0, T)).epsilon(1e-12));
    CHECK(G.normal(1, 1).real() == doctest::Approx(bose_einstein(1.0, T)).epsilon(1e-12));
}

TEST_CASE("zero temperature leaves the quantum-depletion term") {
    const auto H = build_toy_hamiltonian(testing::figure_point(0.8));
    const auto R = solve_bdg(H);
    const auto G = covariance_from_quasiparticles(R, H.layout, 0.0);
    const int M = 2;
    const Matrix expected =
        0.5 * (R.full() * R.full().adjoint() - Matrix::Identity(2 * M, 2 * M));
    CHECK((G.full() - expected).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(G.physicality_residual() <= 1e-10);
}

TEST_CASE("small-coupling scaling of the photon correlators") {
    // At T = 0 both photon correlators grow quadratically in gamma while the
    // squeezed-vacuum bound alpha_max grows linearly.
    std::vector<double> gammas{0.01, 0.02, 0.04};
    std::vector<double> etas, alphas, alpha_maxes;
    for (double g : gammas) {
        const auto stats = single_mode_stats(marginal_photon(toy_covariance(g, 0.0)), 0);
        etas.push_back(stats.eta);
        alphas.push_back(std::abs(stats.alpha));
        alpha_maxes.push_back(stats.alpha_max);
    }
    // Slopes computed by two-point log ratios across a decade-free range.
    const double slope_alpha = std::log(alphas[2] / alphas[0]) / std::log(4.0);
    const double slope_eta = std::log(etas[2] / etas[0]) / std::log(4.0);
    const double slope_bound = std::log(alpha_maxes[2] / alpha_maxes[0]) / std::log(4.0);
    CHECK(slope_alpha == doctest::Approx(2.0).epsilon(0.05));
    CHECK(slope_eta == doctest::Approx(2.0).epsilon(0.05));
    CHECK(slope_bound == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("coth route on a single thermal mode") {
    GrandDynamicalMatrix H;
    H.layout = ModeLayout(1, 0);
    H.mat = 1.3 * Matrix::Identity(2, 2);
    const auto G = covariance_via_coth(H, 0.9);
    CHECK(G.normal(0, 0).real() == doctest::Approx(bose_einstein(1.3, 0.9)).epsilon(1e-12));
    CHECK(std::abs(G.anomalous(0, 0)) <= 1e-14);
}

TEST_CASE("coth route equals the quasiparticle route") {
    for (double gamma : {0.1, 0.5, 1.0, 1.8}) {
        for (double T : {0.05, 0.4, 1.2}) {
            const auto H = build_toy_hamiltonian(testing::figure_point(gamma));
            const auto a = covariance_from_quasiparticles(solve_bdg(H), H.layout, T);
            const auto b = covariance_via_coth(H, T);
            CHECK((a.full() - b.full()).cwiseAbs().maxCoeff() <= 1e-9);
        }
    }
}

TEST_CASE("classical limit of the coth route") {
    // For T far above the spectrum, N = T/omega - 1/2 + omega/(12 T) + O(T^-3)
    // by the Laurent expansion of 1/(e^x - 1).
    const double omega = 1.3;
    GrandDynamicalMatrix H;
    H.layout = ModeLayout(1, 0);
    H.mat = omega * Matrix::Identity(2, 2);
    const double T = 100.0 * omega;
    const auto G = covariance_via_coth(H, T);
    const double expansion = T / omega - 0.5 + omega / (12.0 * T);
    CHECK(G.normal(0, 0).real() == doctest::Approx(expansion).epsilon(1e-9));
}

TEST_CASE("coth route input validation") {
    const auto H = build_toy_hamiltonian(testing::figure_point(0.3));
    CHECK_THROWS_AS(covariance_via_coth(H, 0.0), DomainError);
    CHECK_THROWS_AS(covariance_via_coth(H, -1.0), DomainError);

    GrandDynamicalMatrix unstable;
    unstable.layout = ModeLayout(1, 0);
    unstable.mat.resize(2, 2);
    unstable.mat << 1.0, 1.4, 1.4, 1.0;
    CHECK_THROWS_AS(covariance_via_coth(unstable, 0.5), DomainError);
}

TEST_CASE("negative temperature is rejected by the quasiparticle route") {
    const auto H = build_toy_hamiltonian(testing::figure_point(0.3));
    const auto R = solve_bdg(H);
    CHECK_THROWS_AS(covariance_from_quasiparticles(R, H.layout, -0.1), DomainError);
}

TEST_CASE("vanishing quasiparticle energy diverges at positive temperature") {
    BogoliubovTransform R;
    R.U = Matrix::Identity(1, 1);
    R.V = Matrix::Zero(1, 1);
    R.energies = RealVector::Zero(1);
    CHECK_THROWS_AS(covariance_from_quasiparticles(R, ModeLayout(1, 0), 0.5), DomainError);
    // At T = 0 the occupations are zero regardless, so the same transform is fine.
    CHECK_NOTHROW(covariance_from_quasiparticles(R, ModeLayout(1, 0), 0.0));
}

TEST_CASE("photon marginal") {
    SUBCASE("no atomic modes: identity operation") {
        CovarianceMatrix G;
        G.layout = ModeLayout(2, 0);
        std::mt19937_64 rng(4);
        G.normal = testing::random_hermitian_matrix(2, rng);
        G.anomalous = testing::random_symmetric_matrix(2, rng);
        const auto M = marginal_photon(G);
        CHECK((M.normal - G.normal).cwiseAbs().maxCoeff() == 0.0);
        CHECK((M.anomalous - G.anomalous).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("block-diagonal state marginalizes exactly") {
        const double T = 0.7;
        const auto G = toy_covariance(0.0, T);
        const auto M = marginal_photon(G);
        CHECK(M.layout.m_ph == 1);
        CHECK(M.layout.m_at == 0);
        CHECK(M.normal(0, 0) == G.normal(0, 0));
        CHECK(M.anomalous(0, 0) == G.anomalous(0, 0));
    }
}

TEST_CASE("counter-rotating-only coupling keeps the photon marginal thermal") {
    // Two-mode squeezing alone cannot create same-mode anomalous correlators.
    HamiltonianBlocks b;
    b.photon_energies = RealVector::Constant(1, 2.0);
    b.photon_photon = Matrix::Zero(1, 1);
    b.co_atom_photon = Matrix::Zero(1, 1);
    b.counter_atom_photon = Matrix::Constant(1, 1, 0.6);
    b.atom_atom = Matrix::Constant(1, 1, 1.5);
    b.counter_atom_atom = Matrix::Zero(1, 1);
    const auto H = assemble_grand_matrix(b, ModeLayout(1, 1));

    for (double T : {0.0, 0.3, 1.0}) {
        const auto G = covariance_from_quasiparticles(solve_bdg(H), H.layout, T);
        const auto M = marginal_photon(G);
        CHECK(std::abs(M.anomalous(0, 0)) <= 1e-12);
        // Inter-species anomalous correlations are still there.
        CHECK(std::abs(G.anomalous(0, 1)) > 1e-3);
    }
}

TEST_CASE("characteristic function basics") {
    const auto G = marginal_photon(toy_covariance(0.7, 0.4));

    SUBCASE("normalization at z = 1") {
        Vector z = Vector::Ones(1);
        CHECK(std::abs(characteristic_function(G, z) - Complex(1.0, 0.0)) <= 1e-10);
    }
    SUBCASE("bounded on the unit polydisc") {
        std::mt19937_64 rng(12);
        std::uniform_real_distribution<double> radius(0.0, 1.0);
        std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
        for (int k = 0; k < 50; ++k) {
            Vector z(1);
            z(0) = radius(rng) * std::exp(Complex(0.0, angle(rng)));
            CHECK(std::abs(characteristic_function(G, z)) <= 1.0 + 1e-12);
        }
    }
    SUBCASE("vacuum value matches the all-zeros pattern probability") {
        Vector z = Vector::Zero(1);
        const double theta0 = characteristic_function(G, z).real();
        CHECK(theta0 == doctest::Approx(pattern_probability(G, {0})).epsilon(1e-10));
    }
}

TEST_CASE("characteristic function of a thermal mode is the geometric series") {
    const double eta = 0.9;
    CovarianceMatrix G;
    G.layout = ModeLayout(1, 0);
    G.normal = Matrix::Constant(1, 1, eta);
    G.anomalous = Matrix::Zero(1, 1);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> dist(-0.7, 0.7);
    for (int k = 0; k < 20; ++k) {
        Vector z(1);
        z(0) = Complex(dist(rng), dist(rng));
        const Complex expected = 1.0 / (1.0 + eta * (1.0 - z(0)));
        CHECK(std::abs(characteristic_function(G, z) - expected) <= 1e-12);
    }
}

TEST_CASE("marginalization is consistent with fixing z = 1 on traced modes") {
    const auto G = toy_covariance(0.9, 0.5);
    const auto Gph = marginal_photon(G);
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> dist(-0.6, 0.6);
    for (int k = 0; k < 10; ++k) {
        const Complex zph(dist(rng), dist(rng));
        Vector zfull(2);
        zfull << zph, Complex(1.0, 0.0);
        Vector zm(1);
        zm << zph;
        CHECK(std::abs(characteristic_function(G, zfull) -
                       characteristic_function(Gph, zm)) <= 1e-10);
    }
}

TEST_CASE("characteristic function rejects singular 1 + G") {
    CovarianceMatrix bad;
    bad.layout = ModeLayout(1, 0);
    bad.normal = Matrix::Constant(1, 1, -1.0);
    bad.anomalous = Matrix::Zero(1, 1);
    Vector z = Vector::Zero(1);
    CHECK_THROWS_AS(characteristic_function(bad, z), DomainError);
}

TEST_CASE("quasiparticle phases do not change the covariance") {
    std::mt19937_64 rng(55);
    const auto H = testing::random_stable_hamiltonian(ModeLayout(2, 1), rng);
    const auto R = solve_bdg(H);
    const auto G = covariance_from_quasiparticles(R, H.layout, 0.6);

    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
    BogoliubovTransform rotated = R;
    for (int j = 0; j < R.modes(); ++j) {
        const Complex phase = std::exp(Complex(0.0, angle(rng)));
        rotated.U.col(j) *= phase;
        rotated.V.col(j) *= phase;
    }
    const auto G2 = covariance_from_quasiparticles(rotated, H.layout, 0.6);
    CHECK((G.full() - G2.full()).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("occupations are nondecreasing in temperature") {
    const auto H = build_toy_hamiltonian(testing::figure_point(0.8));
    const auto R = solve_bdg(H);
    double prev0 = -1.0;
    double prev1 = -1.0;
    for (double T : {0.0, 0.2, 0.5, 1.0, 2.0}) {
        const auto G = covariance_from_quasiparticles(R, H.layout, T);
        CHECK(G.normal(0, 0).real() >= prev0 - 1e-12);
        CHECK(G.normal(1, 1).real() >= prev1 - 1e-12);
        prev0 = G.normal(0, 0).real();
        prev1 = G.normal(1, 1).real();
    }
}

TEST_CASE("toy anomalous correlator stays strictly below the bound") {
    for (double gamma : {0.05, 0.3, 0.8, 1.5, 2.5}) {
        for (double T : {0.0, 0.3, 1.0}) {
            const auto s = single_mode_stats(marginal_photon(toy_covariance(gamma, T)), 0);
            CHECK(std::abs(s.alpha) < s.alpha_max);
        }
    }
}

TEST_CASE("single-mode statistics closed forms") {
    SUBCASE("vacuum") {
        CovarianceMatrix G;
        G.layout = ModeLayout(1, 0);
        G.normal = Matrix::Zero(1, 1);
        G.anomalous = Matrix::Zero(1, 1);
        const auto s = single_mode_stats(G, 0);
        CHECK(s.eta == 0.0);
        CHECK(s.r_eff == 0.0);
        CHECK(s.q_eff == 0.0);
    }
    SUBCASE("unit occupation") {
        CovarianceMatrix G;
        G.layout = ModeLayout(1, 0);
        G.normal = Matrix::Constant(1, 1, 1.0);
        G.anomalous = Matrix::Zero(1, 1);
        const auto s = single_mode_stats(G, 0);
        CHECK(s.alpha_c == doctest::Approx(std::sqrt(1.5)).epsilon(1e-15));
        CHECK(s.alpha_max == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
        CHECK(s.q_eff == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(s.r_eff == 0.0);
    }
    SUBCASE("pure squeezed vacuum saturates the bound with q = 0") {
        const double r = 0.5;
        CovarianceMatrix G;
        G.layout = ModeLayout(1, 0);
        G.normal = Matrix::Constant(1, 1, std::sinh(r) * std::sinh(r));
        G.anomalous = Matrix::Constant(1, 1, std::sinh(r) * std::cosh(r));
        const auto s = single_mode_stats(G, 0);
        CHECK(std::abs(s.alpha) == doctest::Approx(s.alpha_max).epsilon(1e-12));
        CHECK(s.q_eff <= 1e-9);
        CHECK(s.r_eff == doctest::Approx(r).epsilon(1e-9));
    }
    SUBCASE("unphysical magnitude is rejected") {
        CovarianceMatrix G;
        G.layout = ModeLayout(1, 0);
        G.normal = Matrix::Constant(1, 1, 0.5);
        G.anomalous = Matrix::Constant(1, 1, 2.0);
        CHECK_THROWS_AS(single_mode_stats(G, 0), DomainError);
    }
}

TEST_CASE("physicality diagnostics flag a corrupted covariance") {
    CovarianceMatrix G;
    G.layout = ModeLayout(1, 0);
    G.normal = Matrix::Constant(1, 1, 0.5);
    G.anomalous = Matrix::Constant(1, 1, 2.0); // |A| above the bound
    CHECK(G.physicality_residual() > 0.1);
    CHECK_THROWS_AS(G.require_physical(), DomainError);

    const auto good = toy_covariance(0.5, 0.3);
    CHECK(good.physicality_residual() <= 1e-10);
    CHECK_NOTHROW(good.require_physical());
}

TEST_CASE("covariance JSON round-trip") {
    const auto G = toy_covariance(0.6, 0.4);
    std::stringstream buffer;
    save_covariance(G, buffer);
    const auto back = load_covariance(buffer);
    CHECK(back.layout == G.layout);
    CHECK((back.normal - G.normal).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK((back.anomalous - G.anomalous).cwiseAbs().maxCoeff() <= 1e-15);

    std::istringstream bad("{\"m_ph\": 1}");
    CHECK_THROWS_AS(load_covariance(bad), IngestionError);
}
