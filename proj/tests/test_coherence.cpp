#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "dimer/coherence.hpp"
#include "dimer/errors.hpp"
#include "dimer/floquet.hpp"
#include "dimer/propagator.hpp"

using namespace dimer;
using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;

namespace {

Eigen::VectorXcd random_state(int n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Eigen::VectorXcd psi(n + 1);
    for (int m = 0; m <= n; ++m) psi[m] = cd(g(rng), g(rng));
    psi /= psi.norm();
    return psi;
}

/** Overlap of two coherent states from the single-orbital inner product:
 *  |<u|v>|^{2N} with u, v the two-component orbitals. Evaluated in log
 *  space so it stays meaningful when the result underflows. */
double overlap_oracle(double t1, double f1, double t2, double f2, int n) {
    const cd inner = std::cos(t1 / 2) * std::cos(t2 / 2) +
                     std::sin(t1 / 2) * std::sin(t2 / 2) * std::exp(cd(0.0, f2 - f1));
    const double a2 = std::norm(inner);
    if (a2 == 0.0) return 0.0;
    return std::exp(n * std::log(a2));
}

/** Same overlap through the spherical law of cosines, as a cross-check on
 *  the oracle itself: Q = ((1 + cos Theta)/2)^N. */
double overlap_oracle_angle(double t1, double f1, double t2, double f2, int n) {
    const double ct = std::cos(t1) * std::cos(t2) +
                      std::sin(t1) * std::sin(t2) * std::cos(f1 - f2);
    const double base = (1.0 + ct) / 2.0;
    if (base <= 0.0) return 0.0;
    return std::exp(n * std::log(base));
}

ReducedDensityMatrix make_rho(int n, cd r11, cd r12, cd r22) {
    ReducedDensityMatrix rho;
    rho.n_particles = n;
    rho.entries << r11, r12, std::conj(r12), r22;
    return rho;
}

} // namespace

TEST_CASE("coherent state: pole states and the balanced two-particle example") {
    const auto top = coherent_state({0.0, 0.3, 7});
    REQUIRE(top.size() == 8);
    CHECK(top[7] == cd(1.0, 0.0));
    for (int m = 0; m < 7; ++m) CHECK(top[m] == cd(0.0, 0.0));

    // theta = pi puts everything on site 2 with the N-fold relative phase
    const auto bottom = coherent_state({kPi, 0.9, 5});
    CHECK(std::abs(bottom[0] - std::exp(cd(0.0, 5 * 0.9))) <= 1e-15);
    for (int m = 1; m <= 5; ++m) CHECK(bottom[m] == cd(0.0, 0.0));

    const auto half = coherent_state({kPi / 2, 0.0, 2});
    REQUIRE(half.size() == 3);
    CHECK(std::abs(half[0] - 0.5) <= 1e-15);
    CHECK(std::abs(half[1] - std::sqrt(0.5)) <= 1e-15);
    CHECK(std::abs(half[2] - 0.5) <= 1e-15);
}

TEST_CASE("coherent state: matches the direct binomial formula at small N") {
    const int n = 10;
    const double theta = 1.1, phi = -2.3;
    const auto psi = coherent_state({theta, phi, n});
    auto binom = [](int nn, int kk) {
        double b = 1.0;
        for (int i = 1; i <= kk; ++i) b *= double(nn - kk + i) / i;
        return b;
    };
    for (int m = 0; m <= n; ++m) {
        const cd direct = std::sqrt(binom(n, m)) * std::pow(std::cos(theta / 2), m) *
                          std::pow(std::sin(theta / 2), n - m) * std::exp(cd(0.0, (n - m) * phi));
        CHECK(std::abs(psi[m] - direct) <= 1e-14);
    }
}

TEST_CASE("coherent state: unit norm everywhere, log-space construction at N = 10000") {
    for (int n : {1, 3, 50, 1000}) {
        for (double theta : {0.0, 0.13, kPi / 2, 2.8, kPi}) {
            for (double phi : {-3.0, 0.0, 2.2}) {
                const auto psi = coherent_state({theta, phi, n});
                CHECK(std::abs(psi.norm() - 1.0) <= 1e-13);
            }
        }
    }
    // worst case for binomial magnitudes: the balanced state
    CHECK(std::abs(coherent_state({kPi / 2, 1.0, 10000}).norm() - 1.0) <= 1e-12);
    CHECK(std::abs(coherent_state({0.3, -1.0, 10000}).norm() - 1.0) <= 1e-12);
}

TEST_CASE("coherent state: validation and phase wrapping") {
    CHECK_THROWS_AS((void)coherent_state({-0.1, 0.0, 4}), ValidationError);
    CHECK_THROWS_AS((void)coherent_state({kPi + 0.1, 0.0, 4}), ValidationError);
    CHECK_THROWS_AS((void)coherent_state({1.0, 0.0, 0}), ValidationError);

    const auto a = coherent_state({1.2, 0.7, 9});
    const auto b = coherent_state({1.2, 0.7 + 2 * kPi, 9});
    CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-12);

    // both ends of the phase interval denote the same state
    const auto lo = coherent_state({1.2, -kPi, 9});
    const auto hi = coherent_state({1.2, kPi, 9});
    CHECK((lo - hi).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("single-point overlap: self-overlap is 1, two states follow the orbital power law") {
    for (int n : {1, 5, 100, 1000}) {
        for (double theta : {0.4, kPi / 2, 2.9}) {
            const double phi = 0.8;
            const auto psi = coherent_state({theta, phi, n});
            CHECK(std::abs(husimi_point(psi, std::cos(theta), phi) - 1.0) <= 1e-12);
        }
    }

    std::mt19937_64 rng(2026);
    std::uniform_real_distribution<double> ut(0.05, kPi - 0.05), uf(-kPi, kPi);
    std::normal_distribution<double> g;
    for (int n : {1, 2, 17, 200}) {
        const double spread = 2.0 / std::sqrt(double(n));
        for (int k = 0; k < 30; ++k) {
            const double t1 = ut(rng), f1 = uf(rng);
            // nearby second point, so the overlap stays of order one
            const double t2 = std::clamp(t1 + spread * g(rng), 0.0, kPi);
            const double f2 = f1 + spread * g(rng);
            const double q = husimi_point(coherent_state({t1, f1, n}), std::cos(t2), f2);
            const double oracle = overlap_oracle(t1, f1, t2, f2, n);
            CHECK(std::abs(q - oracle) <= 1e-10);
            CHECK(std::abs(oracle - overlap_oracle_angle(t1, f1, t2, f2, n)) <= 1e-12);
        }
        for (int k = 0; k < 10; ++k) {  // arbitrary separations
            const double t1 = ut(rng), f1 = uf(rng), t2 = ut(rng), f2 = uf(rng);
            const double q = husimi_point(coherent_state({t1, f1, n}), std::cos(t2), f2);
            CHECK(std::abs(q - overlap_oracle(t1, f1, t2, f2, n)) <= 1e-10);
        }
    }

    // antipodal states are orthogonal
    const auto psi = coherent_state({0.7, 0.3, 12});
    CHECK(husimi_point(psi, std::cos(kPi - 0.7), 0.3 + kPi) <= 1e-20);

    CHECK_THROWS_AS((void)husimi_point(psi, 1.5, 0.0), ValidationError);
    CHECK_THROWS_AS((void)husimi_point(2.0 * psi, 0.0, 0.0), ValidationError);
}

TEST_CASE("husimi grid: axes, bounds, and agreement with single-point evaluation") {
    const int n = 40, pc = 37, qc = 41;
    const auto psi = random_state(n, 7);
    const auto grid = husimi(psi, pc, qc, 1, 5);
    REQUIRE(grid.p_axis.size() == pc);
    REQUIRE(grid.phi_axis.size() == qc);
    REQUIRE(grid.values.rows() == pc);
    REQUIRE(grid.values.cols() == qc);
    CHECK(grid.n_particles == n);
    CHECK(grid.state_label == 5);
    CHECK(grid.dp() == 2.0 / pc);
    CHECK(std::abs(grid.dphi() - 2 * kPi / qc) <= 1e-16);

    // p cell-centered over [-1, 1], phi left-aligned over [-pi, pi)
    for (int i = 0; i < pc; ++i)
        CHECK(std::abs(grid.p_axis[i] - (-1.0 + (i + 0.5) * 2.0 / pc)) <= 1e-15);
    for (int j = 0; j < qc; ++j)
        CHECK(std::abs(grid.phi_axis[j] - (-kPi + j * 2 * kPi / qc)) <= 1e-14);

    for (int i = 0; i < pc; i += 5)
        for (int j = 0; j < qc; j += 7)
            CHECK(std::abs(grid.values(i, j) - husimi_point(psi, grid.p_axis[i], grid.phi_axis[j])) <=
                  1e-13);
    CHECK(grid.values.minCoeff() >= 0.0);
    CHECK(grid.values.maxCoeff() <= 1.0 + 1e-12);

    // a worker pool must reproduce the serial bytes
    const auto par = husimi(psi, pc, qc, 3);
    CHECK((par.values - grid.values).cwiseAbs().maxCoeff() == 0.0);

    CHECK_THROWS_AS((void)husimi(psi, 0, 8), ValidationError);
    CHECK_THROWS_AS((void)husimi(2.0 * psi, 8, 8), ValidationError);
}

TEST_CASE("husimi grid: peak of a coherent state sits at its phase-space point") {
    const double theta = 2.0, phi = 1.0;
    const auto grid = husimi(coherent_state({theta, phi, 200}), 100, 100);
    Eigen::Index imax = 0, jmax = 0;
    grid.values.maxCoeff(&imax, &jmax);
    CHECK(std::abs(grid.p_axis[imax] - std::cos(theta)) <= 2.0 / 100);
    CHECK(std::abs(grid.phi_axis[jmax] - phi) <= 2 * kPi / 100);
    CHECK(grid.values(imax, jmax) >= 0.9);
}

TEST_CASE("husimi grid: portrait-scale normalization and quadrature convergence") {
    // balanced coherent state, N = 1000: structure well above the cell scale
    const auto broad = husimi(coherent_state({kPi / 2, 0.5, 1000}), 400, 400);
    CHECK(std::abs(broad.normalization() - 1.0) <= 1e-3);

    const auto rnd = husimi(random_state(1000, 11), 400, 400);
    CHECK(std::abs(rnd.normalization() - 1.0) <= 1e-3);

    const auto mid = husimi(random_state(100, 13), 400, 400);
    CHECK(std::abs(mid.normalization() - 1.0) <= 1e-3);

    const auto tiny = husimi(coherent_state({2.2, -1.3, 2}), 400, 400);
    CHECK(std::abs(tiny.normalization() - 1.0) <= 1e-3);

    // near-pole state: the p-direction midpoint error is measurable and
    // must fall as the square of the cell size
    const auto narrow = coherent_state({0.35, 0.0, 1000});
    const double e400 = std::abs(husimi(narrow, 400, 400).normalization() - 1.0);
    const double e800 = std::abs(husimi(narrow, 800, 400).normalization() - 1.0);
    CHECK(e400 <= 1e-3);
    CHECK(e800 <= 0.5 * e400 + 1e-9);
}

TEST_CASE("reduced density matrix: pole states, balanced Fock state, coherent projector") {
    Eigen::VectorXcd top = Eigen::VectorXcd::Zero(11);
    top[10] = 1.0;
    const auto rho_top = reduced_density(top);
    CHECK(rho_top.n_particles == 10);
    CHECK(rho_top.entries(0, 0) == cd(10.0, 0.0));
    CHECK(rho_top.entries(1, 1) == cd(0.0, 0.0));
    CHECK(rho_top.entries(0, 1) == cd(0.0, 0.0));

    Eigen::VectorXcd fock = Eigen::VectorXcd::Zero(9);
    fock[4] = 1.0;  // N = 8, half the particles on each site
    const auto rho_fock = reduced_density(fock);
    CHECK(rho_fock.entries(0, 0) == cd(4.0, 0.0));
    CHECK(rho_fock.entries(1, 1) == cd(4.0, 0.0));
    CHECK(rho_fock.entries(0, 1) == cd(0.0, 0.0));

    // coherent state: N times the projector onto its orbital
    for (int n : {1, 10, 100}) {
        const double theta = 1.234, phi = -0.777;
        const double c = std::cos(theta / 2), s = std::sin(theta / 2);
        const auto rho = reduced_density(coherent_state({theta, phi, n}));
        CHECK(std::abs(rho.entries(0, 0) - cd(n * c * c, 0.0)) <= 1e-12 * n);
        CHECK(std::abs(rho.entries(1, 1) - cd(n * s * s, 0.0)) <= 1e-12 * n);
        CHECK(std::abs(rho.entries(0, 1) - n * c * s * std::exp(cd(0.0, phi))) <= 1e-12 * n);
    }
}

TEST_CASE("reduced density matrix: hermitian, trace N, spectrum in [0, N]") {
    for (int n : {2, 17, 300}) {
        for (unsigned seed : {1u, 2u, 3u}) {
            const auto rho = reduced_density(random_state(n, seed * 100 + n));
            CHECK(rho.entries(1, 0) == std::conj(rho.entries(0, 1)));
            CHECK(std::abs(rho.entries(0, 0).imag()) <= 1e-14 * n);
            CHECK(std::abs(rho.entries(0, 0).real() + rho.entries(1, 1).real() - n) <= 1e-10 * n);
            Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(rho.entries);
            CHECK(es.eigenvalues()[0] >= -1e-10 * n);
            CHECK(es.eigenvalues()[1] <= n * (1.0 + 1e-10));
        }
    }
}

TEST_CASE("degree of simplicity: extremes, bounds, basis independence, coherent purity") {
    CHECK(degree_of_simplicity(make_rho(10, {10, 0}, {0, 0}, {0, 0})) == 1.0);
    CHECK(degree_of_simplicity(make_rho(10, {5, 0}, {0, 0}, {5, 0})) == 0.0);
    CHECK_THROWS_AS((void)degree_of_simplicity(make_rho(10, {9, 0}, {0, 0}, {0, 0})),
                    ValidationError);
    CHECK_THROWS_AS((void)degree_of_simplicity(make_rho(0, {0, 0}, {0, 0}, {0, 0})),
                    ValidationError);

    for (int n : {5, 50, 500}) {
        for (unsigned seed = 0; seed < 6; ++seed) {
            const auto rho = reduced_density(random_state(n, 31 * n + seed));
            const double eta = degree_of_simplicity(rho);
            CHECK(eta >= -1e-12);
            CHECK(eta <= 1.0 + 1e-12);
            // the trace of rho^2 may equally be read off the eigenvalues
            Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(rho.entries);
            const double l0 = es.eigenvalues()[0], l1 = es.eigenvalues()[1];
            CHECK(std::abs(eta - (2.0 * (l0 * l0 + l1 * l1) / (double(n) * n) - 1.0)) <= 1e-12);
        }
    }

    for (int n : {10, 100, 1000}) {
        for (int i = 0; i < 20; ++i) {
            for (int j = 0; j < 20; ++j) {
                const double theta = i * kPi / 19, phi = -kPi + j * 2 * kPi / 20;
                const auto rho = reduced_density(coherent_state({theta, phi, n}));
                CHECK(std::abs(degree_of_simplicity(rho) - 1.0) <= 1e-10);
            }
        }
    }
}

TEST_CASE("simplicity spectrum: factorizing operator reproduces the full eta multiset") {
    // with no interaction the cycle operator is a tensor power, so the
    // Floquet states put k particles in one single-particle mode and N - k
    // in the other: eta = 2(k^2 + (N-k)^2)/N^2 - 1 exactly
    const int n = 8;
    DimerParams params;
    params.n_particles = n;
    params.alpha = 0.0;
    params.drive_amplitude = 0.41;
    params.drive_frequency = 1.40;
    auto spectrum = diagonalize(one_cycle_operator(params, {}));
    Eigen::VectorXd eta = eta_spectrum(spectrum);
    REQUIRE(eta.size() == n + 1);

    std::vector<double> expected, got(eta.data(), eta.data() + eta.size());
    for (int k = 0; k <= n; ++k)
        expected.push_back(2.0 * (double(k) * k + double(n - k) * (n - k)) / (double(n) * n) - 1.0);
    std::sort(expected.begin(), expected.end());
    std::sort(got.begin(), got.end());
    for (int i = 0; i <= n; ++i) CHECK(std::abs(got[i] - expected[i]) <= 1e-8);

    // the two condensate-like states carry the top labels
    order_by_simplicity(spectrum, eta);
    CHECK(std::abs(eta[spectrum.eta_order[n]] - 1.0) <= 1e-8);
    CHECK(std::abs(eta[spectrum.eta_order[n - 1]] - 1.0) <= 1e-8);

    FloquetSpectrum empty;
    CHECK_THROWS_AS((void)eta_spectrum(empty), ValidationError);
}
