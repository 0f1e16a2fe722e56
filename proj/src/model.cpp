#include "dimer/model.hpp"

#include <cmath>

namespace dimer {

HamiltonianMatrix build_static_hamiltonian(const DimerParams& params) {
    params.validate();
    const int n = params.n_particles;
    const int d = n + 1;
    HamiltonianMatrix h;
    h.dimension = d;
    h.diagonal.resize(d);
    h.off_diagonal.resize(d - 1);
    h.drive_diagonal.resize(d);

    const double kappa = params.kappa_over_omega0();
    for (int m = 0; m <= n; ++m) {
        const double m1 = m, m2 = n - m;
        h.diagonal[m] = kappa * (m1 * (m1 - 1.0) + m2 * (m2 - 1.0));
        h.drive_diagonal[m] = 2.0 * m1 - n;
    }
    for (int m = 0; m < n; ++m)
        h.off_diagonal[m] = -0.5 * std::sqrt((m + 1.0) * (n - m));
    return h;
}

double drive_factor(const DimerParams& params, double tau) {
    return params.drive_amplitude * std::sin(params.drive_frequency * tau);
}

Tridiagonal evaluate_hamiltonian(const HamiltonianMatrix& h, const DimerParams& params,
                                 double tau) {
    Tridiagonal m;
    m.diag = h.diagonal + drive_factor(params, tau) * h.drive_diagonal;
    m.off = h.off_diagonal;
    return m;
}

void apply_tridiagonal(const Tridiagonal& m, const Eigen::VectorXcd& x, Eigen::VectorXcd& y) {
    const int d = m.dim();
    y.resize(d);
    if (d == 1) {
        y[0] = m.diag[0] * x[0];
        return;
    }
    y[0] = m.diag[0] * x[0] + m.off[0] * x[1];
    for (int i = 1; i < d - 1; ++i)
        y[i] = m.off[i - 1] * x[i - 1] + m.diag[i] * x[i] + m.off[i] * x[i + 1];
    y[d - 1] = m.off[d - 2] * x[d - 2] + m.diag[d - 1] * x[d - 1];
}

void apply_hamiltonian(const HamiltonianMatrix& h, double drive, const Eigen::VectorXcd& x,
                       Eigen::VectorXcd& y) {
    const int d = h.dimension;
    y.resize(d);
    auto dtot = [&](int i) { return h.diagonal[i] + drive * h.drive_diagonal[i]; };
    if (d == 1) {
        y[0] = dtot(0) * x[0];
        return;
    }
    y[0] = dtot(0) * x[0] + h.off_diagonal[0] * x[1];
    for (int i = 1; i < d - 1; ++i)
        y[i] = h.off_diagonal[i - 1] * x[i - 1] + dtot(i) * x[i] + h.off_diagonal[i] * x[i + 1];
    y[d - 1] = h.off_diagonal[d - 2] * x[d - 2] + dtot(d - 1) * x[d - 1];
}

Eigen::MatrixXd dense_hamiltonian(const HamiltonianMatrix& h, const DimerParams& params,
                                  double tau) {
    const int d = h.dimension;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
    const double f = drive_factor(params, tau);
    for (int i = 0; i < d; ++i) m(i, i) = h.diagonal[i] + f * h.drive_diagonal[i];
    for (int i = 0; i < d - 1; ++i) {
        m(i, i + 1) = h.off_diagonal[i];
        m(i + 1, i) = h.off_diagonal[i];
    }
    return m;
}

} // namespace dimer
