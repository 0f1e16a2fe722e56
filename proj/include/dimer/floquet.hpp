#ifndef DIMER_FLOQUET_HPP
#define DIMER_FLOQUET_HPP

#include <Eigen/Dense>
#include <numbers>
#include <vector>

#include "dimer/propagator.hpp"

namespace dimer {

/**
 * Spectral decomposition of the one-cycle operator,
 * U = sum_n |n> exp(-i gamma_n) <n|, with eigenphases gamma_n in [0, 2pi)
 * sorted ascending (the raw index), orthonormal eigenvectors as columns,
 * quasienergy representatives folded to [-omega/2, omega/2) in units of
 * hbar*Omega, and (once assigned) the eta-induced ordering permutation.
 */
struct FloquetSpectrum {
    Eigen::VectorXd eigenphases;     // gamma_n, ascending
    Eigen::VectorXd quasienergies;   // folded representatives
    Eigen::MatrixXcd eigenvectors;   // column n <-> gamma_n
    std::vector<int> eta_order;      // label -> raw index; empty until assigned
    Eigen::VectorXd residuals;       // ||U v_n - e^{-i gamma_n} v_n||_2
    double max_residual = 0.0;
    double drive_frequency = 0.0;
};

struct DiagonalizationSettings {
    /** Phases closer than this (radians) are treated as one near-degenerate
     *  cluster and re-orthonormalized together. */
    double cluster_tol = 1e-12 * 2.0 * std::numbers::pi;
    /** Residual bound, scaled by sqrt(N+1); exceeded -> DiagonalizationFailure. */
    double residual_tolerance = 1e-8;
};

/** Diagonalizes a verified one-cycle operator via a unitary Schur reduction
 *  (orthonormal basis by construction), repairs near-degenerate clusters,
 *  and records residuals. Throws DiagonalizationFailure when residuals stay
 *  above residual_tolerance * sqrt(N+1). */
FloquetSpectrum diagonalize(const OneCycleOperator& u, const DiagonalizationSettings& settings = {});

/** Unique quasienergy representative of gamma in [-omega/2, omega/2),
 *  units of hbar*Omega: eps = gamma/T mod omega. */
double quasienergy_representative(double gamma, double drive_frequency);

/** Sorts labels by eta ascending (ties: raw index ascending) and stores the
 *  permutation in spectrum.eta_order; label n = eta_order[n] raw index. */
void order_by_simplicity(FloquetSpectrum& spectrum, const Eigen::VectorXd& eta_values);

} // namespace dimer

#endif
