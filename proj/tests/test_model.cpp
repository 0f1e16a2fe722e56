#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "dimer/errors.hpp"
#include "dimer/model.hpp"

using namespace dimer;

namespace {
DimerParams reference_params(int n) {
    DimerParams p;
    p.n_particles = n;
    p.alpha = 1.30;
    p.drive_amplitude = 0.41;
    p.drive_frequency = 1.40;
    return p;
}
} // namespace

TEST_CASE("single particle: no interaction, bare tunneling") {
    auto p = reference_params(1);
    auto h = build_static_hamiltonian(p);
    CHECK(h.dimension == 2);
    CHECK(h.diagonal[0] == 0.0);
    CHECK(h.diagonal[1] == 0.0);
    CHECK(h.off_diagonal[0] == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(h.drive_diagonal[0] == -1.0);
    CHECK(h.drive_diagonal[1] == 1.0);
}

TEST_CASE("two particles: interaction diagonal and hopping elements") {
    auto p = reference_params(2);
    auto h = build_static_hamiltonian(p);
    CHECK(h.diagonal[0] == doctest::Approx(1.30).epsilon(1e-15));
    CHECK(h.diagonal[1] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(h.diagonal[2] == doctest::Approx(1.30).epsilon(1e-15));
    CHECK(h.off_diagonal[0] == doctest::Approx(-std::sqrt(2.0) / 2).epsilon(1e-15));
    CHECK(h.off_diagonal[1] == doctest::Approx(-std::sqrt(2.0) / 2).epsilon(1e-15));
}

TEST_CASE("three particles: drive diagonal is the population imbalance") {
    auto h = build_static_hamiltonian(reference_params(3));
    CHECK(h.drive_diagonal[0] == -3.0);
    CHECK(h.drive_diagonal[1] == -1.0);
    CHECK(h.drive_diagonal[2] == 1.0);
    CHECK(h.drive_diagonal[3] == 3.0);
}

TEST_CASE("fock basis enumerates occupation pairs") {
    FockBasis b(5);
    CHECK(b.dim() == 6);
    auto s = b.states();
    REQUIRE(s.size() == 6);
    for (int m = 0; m <= 5; ++m) {
        CHECK(s[m].first == m);
        CHECK(s[m].first + s[m].second == 5);
    }
}

TEST_CASE("instantaneous matrix: drive vanishes at tau = 0 and T/2, full period repeats") {
    auto p = reference_params(7);
    auto h = build_static_hamiltonian(p);
    const double T = p.period();

    auto m0 = evaluate_hamiltonian(h, p, 0.0);
    CHECK((m0.diag - h.diagonal).cwiseAbs().maxCoeff() == 0.0);

    auto mhalf = evaluate_hamiltonian(h, p, T / 2);
    CHECK((mhalf.diag - h.diagonal).cwiseAbs().maxCoeff() < 1e-14);

    const double tau = 0.7321;
    auto ma = evaluate_hamiltonian(h, p, tau);
    auto mb = evaluate_hamiltonian(h, p, tau + T);
    CHECK((ma.diag - mb.diag).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("derived interaction per particle") {
    auto p = reference_params(13);
    CHECK(p.kappa_over_omega0() == doctest::Approx(1.30 / 13).epsilon(1e-15));
}

TEST_CASE("parameter validation") {
    DimerParams p = reference_params(10);
    p.n_particles = 0;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p = reference_params(10);
    p.drive_frequency = 0.0;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p = reference_params(10);
    p.drive_amplitude = -0.1;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p = reference_params(10);
    p.alpha = std::nan("");
    CHECK_THROWS_AS(p.validate(), ValidationError);
}

TEST_CASE("non-interacting undriven spectrum is the equidistant tunneling ladder") {
    DimerParams p;
    p.n_particles = 20;
    p.alpha = 0.0;
    p.drive_amplitude = 0.0;
    p.drive_frequency = 1.0;
    auto h = build_static_hamiltonian(p);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense_hamiltonian(h, p, 0.0));
    for (int k = 0; k <= 20; ++k)
        CHECK(es.eigenvalues()[k] == doctest::Approx(-10.0 + k).epsilon(1e-12));
}

TEST_CASE("site-exchange symmetry: m <-> N-m with drive sign flip") {
    auto p = reference_params(11);
    auto h = build_static_hamiltonian(p);
    const int n = p.n_particles;
    for (int m = 0; m <= n; ++m) {
        CHECK(h.diagonal[m] == doctest::Approx(h.diagonal[n - m]).epsilon(1e-15));
        CHECK(h.drive_diagonal[m] == -h.drive_diagonal[n - m]);
    }
    for (int m = 0; m < n; ++m)
        CHECK(h.off_diagonal[m] == doctest::Approx(h.off_diagonal[n - 1 - m]).epsilon(1e-15));

    // spectral statement: flipping the drive sign leaves the spectrum invariant
    const double tau = 1.234;
    Eigen::MatrixXd a = dense_hamiltonian(h, p, tau);
    Eigen::MatrixXd b = a;
    for (int i = 0; i <= n; ++i)
        b(i, i) = h.diagonal[i] - drive_factor(p, tau) * h.drive_diagonal[i];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ea(a), eb(b);
    CHECK((ea.eigenvalues() - eb.eigenvalues()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("tridiagonal application matches the dense matrix") {
    auto p = reference_params(17);
    auto h = build_static_hamiltonian(p);
    const double tau = 2.1;
    auto tri = evaluate_hamiltonian(h, p, tau);
    Eigen::MatrixXd dense = dense_hamiltonian(h, p, tau);

    std::mt19937 rng(42);
    std::normal_distribution<double> g;
    Eigen::VectorXcd x(p.dim());
    for (int i = 0; i < x.size(); ++i) x[i] = std::complex<double>(g(rng), g(rng));

    Eigen::VectorXcd y1, y2;
    apply_tridiagonal(tri, x, y1);
    apply_hamiltonian(h, drive_factor(p, tau), x, y2);
    Eigen::VectorXcd yd = dense.cast<std::complex<double>>() * x;
    CHECK((y1 - yd).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((y2 - yd).cwiseAbs().maxCoeff() < 1e-13);
}
