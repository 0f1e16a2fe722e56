#ifndef DIMER_COHERENCE_HPP
#define DIMER_COHERENCE_HPP

#include <numbers>

#include <Eigen/Dense>

#include "dimer/floquet.hpp"

namespace dimer {

/**
 * Spin coherent state |theta, phi>: all N particles occupying the orbital
 * A+ = cos(theta/2) a1+ + sin(theta/2) e^{i phi} a2+. The polar angle induces
 * the population imbalance p = cos(theta); phi is the site-2 phase relative
 * to site 1, matching the pendulum angle.
 */
struct CoherentStateSpec {
    double theta = 0.0;  // [0, pi]
    double phi = 0.0;    // wrapped into [-pi, pi)
    int n_particles = 1;
};

/** Fock amplitudes c_m = sqrt(C(N,m)) cos^m(theta/2) sin^{N-m}(theta/2)
 *  e^{i(N-m)phi} (m = site-1 occupation). Binomials are taken in log space,
 *  so the construction stays finite up to N = 10000 and beyond; the result
 *  has unit norm by the binomial identity. */
Eigen::VectorXcd coherent_state(const CoherentStateSpec& spec);

/** Husimi value Q = |<state|p, phi>|^2 at a single phase-space point. */
double husimi_point(const Eigen::VectorXcd& state, double p, double phi);

/**
 * Husimi distribution sampled on a grid uniform in (p, phi): p cell-centered
 * over [-1, 1] (the measure sin(theta) dtheta dphi = -dp dphi makes the
 * quadrature a plain sum), phi left-aligned over [-pi, pi). values(i, j) is
 * Q at (p_axis[i], phi_axis[j]).
 */
struct HusimiGrid {
    Eigen::VectorXd p_axis;
    Eigen::VectorXd phi_axis;
    Eigen::MatrixXd values;
    int n_particles = 0;
    int state_label = -1;  // eta-order label when the state is a Floquet state

    double dp() const { return 2.0 / static_cast<double>(p_axis.size()); }
    double dphi() const { return 2.0 * std::numbers::pi / static_cast<double>(phi_axis.size()); }
    /** Discretized ((N+1)/(4pi)) * dp * dphi * sum Q; 1 up to quadrature error. */
    double normalization() const;
};

/** Samples Q over a p_cells x phi_cells grid (parallel over p rows). The
 *  state must be normalized. Cost: O(p_cells * N) amplitude tables plus one
 *  O(N) inner product per node. */
HusimiGrid husimi(const Eigen::VectorXcd& state, int p_cells, int phi_cells, int threads = 0,
                  int state_label = -1);

/** One-particle reduced density matrix <aj+ ak>, trace N. */
struct ReducedDensityMatrix {
    Eigen::Matrix2cd entries;
    int n_particles = 0;
};

ReducedDensityMatrix reduced_density(const Eigen::VectorXcd& state);

/** Leggett's degree of simplicity eta = 2 N^-2 tr(rho^2) - 1, in [0, 1]:
 *  1 for a pure condensate (eigenvalues N, 0), 0 for maximal fragmentation
 *  (N/2, N/2). tr(rho^2) is the squared Frobenius norm of the entries. */
double degree_of_simplicity(const ReducedDensityMatrix& rho);

/** eta for every Floquet eigenvector column. */
Eigen::VectorXd eta_spectrum(const FloquetSpectrum& spectrum);

} // namespace dimer

#endif
