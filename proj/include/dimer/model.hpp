#ifndef DIMER_MODEL_HPP
#define DIMER_MODEL_HPP

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "dimer/params.hpp"

namespace dimer {

/**
 * Fock basis of N bosons on two sites, ordered by the occupation m of
 * site 1 ascending: |m> = |m, N-m>, m = 0..N. Index m is the canonical
 * basis index everywhere in this library.
 */
struct FockBasis {
    int n_particles;

    explicit FockBasis(int n) : n_particles(n) {}

    int dim() const { return n_particles + 1; }

    /** Occupation pair (site 1, site 2) of basis state m. */
    std::pair<int, int> occupations(int m) const { return {m, n_particles - m}; }

    std::vector<std::pair<int, int>> states() const {
        std::vector<std::pair<int, int>> s;
        s.reserve(dim());
        for (int m = 0; m <= n_particles; ++m) s.emplace_back(m, n_particles - m);
        return s;
    }
};

/** Real symmetric tridiagonal matrix: diag size d, off size d-1. */
struct Tridiagonal {
    Eigen::VectorXd diag;
    Eigen::VectorXd off;

    int dim() const { return static_cast<int>(diag.size()); }
};

/**
 * Time-dependent Hamiltonian of the driven dimer in units of hbar*Omega,
 * split into the static tridiagonal part and the drive diagonal:
 *
 *   H(tau)/hbar*Omega = static + (mu/Omega) sin((omega/Omega) tau) * drive
 *
 * with matrix elements in the Fock basis
 *   static diag[m]  = (alpha/N) [m(m-1) + (N-m)(N-m-1)]
 *   static off[m]   = -(1/2) sqrt((m+1)(N-m))     (couples m and m+1)
 *   drive diag[m]   = 2m - N                      (site population imbalance)
 *
 * The storage is exactly real symmetric tridiagonal; Hermiticity holds by
 * construction and propagation uses O(N) matrix-vector products.
 */
struct HamiltonianMatrix {
    int dimension;
    Eigen::VectorXd diagonal;        // static part, units of hbar*Omega
    Eigen::VectorXd off_diagonal;    // length dimension-1
    Eigen::VectorXd drive_diagonal;  // multiplied by (mu/Omega) sin((omega/Omega) tau)
};

HamiltonianMatrix build_static_hamiltonian(const DimerParams& params);

/** Instantaneous drive prefactor (mu/Omega) sin((omega/Omega) tau). */
double drive_factor(const DimerParams& params, double tau);

/** Instantaneous matrix H(tau)/hbar*Omega as a plain tridiagonal. */
Tridiagonal evaluate_hamiltonian(const HamiltonianMatrix& h, const DimerParams& params,
                                 double tau);

/** y = M x for a real symmetric tridiagonal M acting on a complex vector. */
void apply_tridiagonal(const Tridiagonal& m, const Eigen::VectorXcd& x, Eigen::VectorXcd& y);

/** y = (diag(d) + f * offdiag-part) ... composed form used by steppers:
 *  y = d_total .* x + off-coupling, with d_total = h.diagonal + f*h.drive_diagonal. */
void apply_hamiltonian(const HamiltonianMatrix& h, double drive, const Eigen::VectorXcd& x,
                       Eigen::VectorXcd& y);

/** Dense copy of the instantaneous Hamiltonian (test/diagnostic use only). */
Eigen::MatrixXd dense_hamiltonian(const HamiltonianMatrix& h, const DimerParams& params,
                                  double tau);

} // namespace dimer

#endif
