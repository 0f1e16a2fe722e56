#ifndef DIMER_TESTS_ORACLES_HPP
#define DIMER_TESTS_ORACLES_HPP

// Independent reference constructions used by the test suites. Everything
// here is deliberately implemented with algorithms different from the
// library's own (dense eigendecomposition, brute-force RK4, combinatorial
// tensor powers) so agreement is evidence, not circularity.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "dimer/model.hpp"
#include "dimer/params.hpp"

namespace oracles {

using cd = std::complex<double>;
inline constexpr cd I{0.0, 1.0};
inline constexpr double TWO_PI = 2.0 * std::numbers::pi;

/** exp(-i t H) for real symmetric H via dense eigendecomposition. */
inline Eigen::MatrixXcd expm_hermitian(const Eigen::MatrixXd& h, double t) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    Eigen::VectorXcd phases(es.eigenvalues().size());
    for (int i = 0; i < phases.size(); ++i) phases[i] = std::exp(-I * (t * es.eigenvalues()[i]));
    const Eigen::MatrixXcd v = es.eigenvectors().cast<cd>();
    return v * phases.asDiagonal() * v.transpose();
}

/** Brute-force dense RK4 one-cycle operator with a fixed step count.
 *  O(steps * N^2); keep N small. */
inline Eigen::MatrixXcd rk4_one_cycle(const dimer::DimerParams& p, int steps) {
    const dimer::HamiltonianMatrix h = dimer::build_static_hamiltonian(p);
    const int d = p.dim();
    auto rhs = [&](double tau, const Eigen::MatrixXcd& u) -> Eigen::MatrixXcd {
        const double f = dimer::drive_factor(p, tau);
        Eigen::MatrixXcd out(d, d);
        for (int c = 0; c < d; ++c) {
            Eigen::VectorXcd y(d);
            dimer::apply_hamiltonian(h, f, u.col(c), y);
            out.col(c) = -I * y;
        }
        return out;
    };
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(d, d);
    const double T = p.period(), dt = T / steps;
    for (int s = 0; s < steps; ++s) {
        const double t = s * dt;
        const Eigen::MatrixXcd k1 = rhs(t, u);
        const Eigen::MatrixXcd k2 = rhs(t + dt / 2, u + (dt / 2) * k1);
        const Eigen::MatrixXcd k3 = rhs(t + dt / 2, u + (dt / 2) * k2);
        const Eigen::MatrixXcd k4 = rhs(t + dt, u + dt * k3);
        u += (dt / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    return u;
}

/** Eigenphases gamma = -arg(lambda) mod 2pi of a unitary, sorted ascending. */
inline std::vector<double> eigenphases(const Eigen::MatrixXcd& u) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(u, false);
    std::vector<double> g(es.eigenvalues().size());
    for (size_t i = 0; i < g.size(); ++i) {
        double x = -std::arg(es.eigenvalues()[static_cast<int>(i)]);
        x = std::fmod(x, TWO_PI);
        if (x < 0) x += TWO_PI;
        g[i] = x;
    }
    std::sort(g.begin(), g.end());
    return g;
}

inline double circular_distance(double a, double b) {
    double d = std::fmod(std::abs(a - b), TWO_PI);
    return std::min(d, TWO_PI - d);
}

/** Greedy circular multiset match; returns the worst pair distance. */
inline double match_phase_multisets(std::vector<double> a, std::vector<double> b) {
    double worst = 0.0;
    for (double x : a) {
        double best = 1e300;
        size_t at = 0;
        for (size_t i = 0; i < b.size(); ++i) {
            const double d = circular_distance(x, b[i]);
            if (d < best) {
                best = d;
                at = i;
            }
        }
        worst = std::max(worst, best);
        b.erase(b.begin() + static_cast<long>(at));
    }
    return worst;
}

inline double log_factorial(int n) { return std::lgamma(n + 1.0); }

/** N-fold symmetric tensor power of a single-particle 2x2 unitary:
 *  <m'|U_N|m> = sqrt(m'!(N-m')!/(m!(N-m)!)) * sum_j C(m,j) C(N-m, m'-j)
 *               u11^j u21^(m-j) u12^(m'-j) u22^((N-m)-(m'-j)). */
inline Eigen::MatrixXcd tensor_power(const Eigen::Matrix2cd& u, int n) {
    const int d = n + 1;
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);
    auto binom = [](int a, int b) -> double {
        if (b < 0 || b > a) return 0.0;
        return std::round(std::exp(log_factorial(a) - log_factorial(b) - log_factorial(a - b)));
    };
    // powers tables to avoid pow() in the inner loop
    std::vector<cd> p11(d + 1), p12(d + 1), p21(d + 1), p22(d + 1);
    p11[0] = p12[0] = p21[0] = p22[0] = 1.0;
    for (int k = 1; k <= d; ++k) {
        p11[k] = p11[k - 1] * u(0, 0);
        p12[k] = p12[k - 1] * u(0, 1);
        p21[k] = p21[k - 1] * u(1, 0);
        p22[k] = p22[k - 1] * u(1, 1);
    }
    for (int m = 0; m <= n; ++m) {
        for (int mp = 0; mp <= n; ++mp) {
            cd sum = 0.0;
            const int jlo = std::max(0, mp - (n - m)), jhi = std::min(m, mp);
            for (int j = jlo; j <= jhi; ++j)
                sum += binom(m, j) * binom(n - m, mp - j) * p11[j] * p21[m - j] * p12[mp - j] *
                       p22[(n - m) - (mp - j)];
            const double pref = std::exp(0.5 * (log_factorial(mp) + log_factorial(n - mp) -
                                                log_factorial(m) - log_factorial(n - m)));
            out(mp, m) = pref * sum;
        }
    }
    return out;
}

/** Single-particle one-cycle operator by brute-force RK4, in SITE ordering
 *  (row/column 0 = site 1). The N = 1 Fock index counts site-1 occupation,
 *  so Fock index 1 is site 1 and both indices must be reversed before the
 *  matrix can feed the site-indexed tensor-power formula above. */
inline Eigen::Matrix2cd single_particle_cycle(double drive_amplitude, double drive_frequency,
                                              int steps = 2000000) {
    dimer::DimerParams p;
    p.n_particles = 1;
    p.alpha = 0.0;
    p.drive_amplitude = drive_amplitude;
    p.drive_frequency = drive_frequency;
    const Eigen::Matrix2cd fock = rk4_one_cycle(p, steps);
    Eigen::Matrix2cd site;
    site << fock(1, 1), fock(1, 0), fock(0, 1), fock(0, 0);
    return site;
}

} // namespace oracles

#endif
