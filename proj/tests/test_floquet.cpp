#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <complex>
#include <random>

#include "dimer/errors.hpp"
#include "dimer/floquet.hpp"
#include "dimer/propagator.hpp"
#include "oracles.hpp"

using namespace dimer;
using cd = std::complex<double>;

namespace {

DimerParams reference_params(int n) {
    DimerParams p;
    p.n_particles = n;
    p.alpha = 1.30;
    p.drive_amplitude = 0.41;
    p.drive_frequency = 1.40;
    return p;
}

Eigen::MatrixXcd random_unitary(int d, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Eigen::MatrixXcd a(d, d);
    for (int j = 0; j < d; ++j)
        for (int i = 0; i < d; ++i) a(i, j) = cd(g(rng), g(rng));
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
    Eigen::MatrixXcd q = qr.householderQ();
    // fix column phases so the factor is reproducible
    const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < d; ++j) {
        const cd piv = r(j, j);
        if (std::abs(piv) > 0) q.col(j) *= piv / std::abs(piv);
    }
    return q;
}

/** Wraps a bare matrix as a one-cycle operator with the given parameters. */
OneCycleOperator wrap_operator(Eigen::MatrixXcd m, double drive_frequency) {
    OneCycleOperator op;
    op.params.n_particles = static_cast<int>(m.rows()) - 1;
    op.params.alpha = 0.0;
    op.params.drive_amplitude = 0.0;
    op.params.drive_frequency = drive_frequency;
    op.matrix = std::move(m);
    return op;
}

} // namespace

TEST_CASE("identity operator: all eigenphases zero, orthonormal basis") {
    const int d = 7;
    const auto sp = diagonalize(wrap_operator(Eigen::MatrixXcd::Identity(d, d), 1.40));
    REQUIRE(sp.eigenphases.size() == d);
    CHECK(sp.eigenphases.cwiseAbs().maxCoeff() <= 1e-14);
    CHECK(sp.quasienergies.cwiseAbs().maxCoeff() <= 1e-14);
    CHECK(sp.max_residual <= 1e-13);
    const Eigen::MatrixXcd gram = sp.eigenvectors.adjoint() * sp.eigenvectors;
    CHECK((gram - Eigen::MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("one particle: eigenphases match a dense eigensolver cross-check") {
    const auto p = reference_params(1);
    const auto u = one_cycle_operator(p, {});
    const auto sp = diagonalize(u);
    const auto ora = oracles::eigenphases(u.matrix);
    REQUIRE(sp.eigenphases.size() == 2);
    CHECK(oracles::circular_distance(sp.eigenphases[0], ora[0]) <= 1e-12);
    CHECK(oracles::circular_distance(sp.eigenphases[1], ora[1]) <= 1e-12);
    // traceless Hamiltonian: det U = 1, so the two phases sum to a full turn
    CHECK(std::abs(sp.eigenphases.sum() - oracles::TWO_PI) <= 1e-10);
}

TEST_CASE("non-interacting spectrum factorizes into single-particle phases") {
    const int n = 10;
    DimerParams p = reference_params(n);
    p.alpha = 0.0;
    const auto sp = diagonalize(one_cycle_operator(p, {}));

    DimerParams p1 = p;
    p1.n_particles = 1;
    const auto sp1 = diagonalize(one_cycle_operator(p1, {}));
    const double gm = sp1.eigenphases[0], gp = sp1.eigenphases[1];

    std::vector<double> expected(n + 1);
    for (int k = 0; k <= n; ++k) expected[k] = std::fmod((n - k) * gp + k * gm, oracles::TWO_PI);
    std::vector<double> actual(sp.eigenphases.data(), sp.eigenphases.data() + n + 1);
    CHECK(oracles::match_phase_multisets(actual, expected) <= 1e-9);
}

TEST_CASE("production-scale smoke run satisfies the spectral invariants") {
    const auto p = reference_params(60);
    const auto u = one_cycle_operator(p, {});
    const auto sp = diagonalize(u);
    const int d = p.dim();
    REQUIRE(sp.eigenphases.size() == d);
    for (int i = 0; i + 1 < d; ++i) CHECK(sp.eigenphases[i] <= sp.eigenphases[i + 1]);
    for (int i = 0; i < d; ++i) {
        CHECK(sp.eigenphases[i] >= 0.0);
        CHECK(sp.eigenphases[i] < oracles::TWO_PI);
        CHECK(sp.quasienergies[i] >= -p.drive_frequency / 2);
        CHECK(sp.quasienergies[i] < p.drive_frequency / 2);
    }
    CHECK(sp.max_residual <= 1e-8 * std::sqrt(double(d)));
    const Eigen::MatrixXcd gram = sp.eigenvectors.adjoint() * sp.eigenvectors;
    CHECK((gram - Eigen::MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("diagonalization is deterministic") {
    const auto p = reference_params(24);
    const auto u = one_cycle_operator(p, {});
    const auto a = diagonalize(u);
    const auto b = diagonalize(u);
    CHECK((a.eigenphases - b.eigenphases).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.eigenvectors - b.eigenvectors).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("near-degenerate pair is resolved back to the generating basis") {
    const int d = 6;
    const Eigen::MatrixXcd v = random_unitary(d, 99u);
    Eigen::VectorXd gamma(d);
    gamma << 1.0, 1.0 + 1e-13, 2.0, 3.0, 4.0, 5.0;
    Eigen::VectorXcd evals(d);
    for (int i = 0; i < d; ++i) evals[i] = std::exp(cd(0.0, -gamma[i]));
    const Eigen::MatrixXcd u = v * evals.asDiagonal() * v.adjoint();

    const auto sp = diagonalize(wrap_operator(u, 1.40));
    CHECK(sp.max_residual <= 1e-12);
    // the repaired pair must recover the generating directions, not an
    // arbitrary mixture inside the two-dimensional near-eigenspace
    for (int i = 0; i < 2; ++i) {
        const double o0 = std::abs(v.col(0).dot(sp.eigenvectors.col(i)));
        const double o1 = std::abs(v.col(1).dot(sp.eigenvectors.col(i)));
        CHECK(std::max(o0, o1) >= 0.99);
    }
    for (int i = 0; i < d; ++i)
        CHECK(oracles::circular_distance(sp.eigenphases[i], gamma[i]) <= 1e-10);
}

TEST_CASE("cluster straddling the phase wrap keeps the full multiset") {
    const int d = 5;
    const Eigen::MatrixXcd v = random_unitary(d, 7u);
    Eigen::VectorXd gamma(d);
    const double eps = 1e-14;
    gamma << eps, oracles::TWO_PI - eps, 1.5, 3.0, 4.5;
    Eigen::VectorXcd evals(d);
    for (int i = 0; i < d; ++i) evals[i] = std::exp(cd(0.0, -gamma[i]));
    const auto sp = diagonalize(wrap_operator(v * evals.asDiagonal() * v.adjoint(), 1.40));
    CHECK(sp.max_residual <= 1e-12);
    std::vector<double> actual(sp.eigenphases.data(), sp.eigenphases.data() + d);
    std::vector<double> expected(gamma.data(), gamma.data() + d);
    CHECK(oracles::match_phase_multisets(actual, expected) <= 1e-12);
    for (int i = 0; i + 1 < d; ++i) CHECK(sp.eigenphases[i] <= sp.eigenphases[i + 1]);
}

TEST_CASE("a defective candidate operator is rejected by the residual gate") {
    Eigen::MatrixXcd m(2, 2);
    m << std::exp(cd(0, -1.0)), 1e-3, 0.0, std::exp(cd(0, -2.0));
    CHECK_THROWS_AS((void)diagonalize(wrap_operator(m, 1.40)), DiagonalizationFailure);
}

TEST_CASE("quasienergy folding maps to the first zone") {
    const double w = 1.40;
    CHECK(quasienergy_representative(0.0, w) == doctest::Approx(0.0).epsilon(1e-15));
    // gamma = pi sits exactly on the zone edge and folds to the lower edge
    CHECK(quasienergy_representative(std::numbers::pi, w) == doctest::Approx(-0.70).epsilon(1e-12));
    // a phase just under a full turn is a small negative quasienergy
    CHECK(quasienergy_representative(oracles::TWO_PI - 1e-6, w) ==
          doctest::Approx(-1e-6 * w / oracles::TWO_PI).epsilon(1e-6));

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u01(0.0, oracles::TWO_PI);
    for (int i = 0; i < 200; ++i) {
        const double g = u01(rng);
        const double rep = quasienergy_representative(g, w);
        CHECK(rep >= -w / 2);
        CHECK(rep < w / 2);
        // representative and raw value agree modulo the drive frequency
        const double diff = g * w / oracles::TWO_PI - rep;
        CHECK(std::abs(diff - w * std::round(diff / w)) <= 1e-12);
    }
}

TEST_CASE("simplicity ordering sorts labels by eta with stable ties") {
    const auto p = reference_params(3);
    auto sp = diagonalize(one_cycle_operator(p, {}));
    Eigen::VectorXd eta(4);
    eta << 0.3, 0.1, 0.2, 0.1;
    order_by_simplicity(sp, eta);
    REQUIRE(sp.eta_order.size() == 4);
    CHECK(sp.eta_order[0] == 1);  // lowest eta, first of the tie
    CHECK(sp.eta_order[1] == 3);
    CHECK(sp.eta_order[2] == 2);
    CHECK(sp.eta_order[3] == 0);  // highest eta gets the top label

    Eigen::VectorXd bad(4);
    bad << 0.3, 0.1, 1.5, 0.2;
    CHECK_THROWS_AS(order_by_simplicity(sp, bad), ValidationError);
    Eigen::VectorXd short_eta(3);
    short_eta << 0.1, 0.2, 0.3;
    CHECK_THROWS_AS(order_by_simplicity(sp, short_eta), ValidationError);
}
