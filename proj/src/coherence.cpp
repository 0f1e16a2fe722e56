#include "dimer/coherence.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "dimer/errors.hpp"
#include "dimer/parallel.hpp"

namespace dimer {

using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;

namespace {

double wrap_pi(double phi) {
    phi = std::remainder(phi, 2.0 * kPi);
    if (phi >= kPi) phi -= 2.0 * kPi;  // remainder returns (-pi, pi]; want [-pi, pi)
    return phi;
}

/** Real amplitude magnitudes a_m = sqrt(C(N,m)) cos^m(theta/2) sin^{N-m}(theta/2),
 *  evaluated in log space; exact zeros at the poles are kept as zeros. */
void amplitude_table(double theta, int n, std::vector<double>& a) {
    a.assign(n + 1, 0.0);
    if (theta == 0.0) {  // all on site 1, exactly
        a[n] = 1.0;
        return;
    }
    if (theta == kPi) {  // all on site 2, exactly
        a[0] = 1.0;
        return;
    }
    const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
    const double lc = std::log(c), ls = std::log(s);
    const double lgn = std::lgamma(n + 1.0);
    double s2 = 0.0;
    for (int m = 0; m <= n; ++m) {
        const double lbin = 0.5 * (lgn - std::lgamma(m + 1.0) - std::lgamma(n - m + 1.0));
        a[m] = std::exp(lbin + m * lc + (n - m) * ls);
        s2 += a[m] * a[m];
    }
    // the log-space route carries eps*|log| ~ 1e-12 rounding at N = 10^4;
    // the binomial identity fixes the true norm at 1, so pin it there
    const double scale = 1.0 / std::sqrt(s2);
    for (int m = 0; m <= n; ++m) a[m] *= scale;
}

void check_normalized(const Eigen::VectorXcd& state) {
    if (state.size() < 2) throw ValidationError("state", "amplitude vector length must be N+1 >= 2");
    if (std::abs(state.norm() - 1.0) > 1e-6)
        throw ValidationError("state", "state must be normalized");
}

/** |sum_m conj(state_m) a_m e^{-i m phi}|^2 by a Horner walk in z = e^{-i phi};
 *  the dropped overall phase e^{i N phi} does not affect the magnitude. */
double husimi_inner(const Eigen::VectorXcd& state, const std::vector<double>& a, double phi) {
    const int n = static_cast<int>(a.size()) - 1;
    const cd z = std::exp(cd(0.0, -phi));
    cd acc = std::conj(state[n]) * a[n];
    for (int m = n - 1; m >= 0; --m) acc = acc * z + std::conj(state[m]) * a[m];
    return std::norm(acc);
}

} // namespace

Eigen::VectorXcd coherent_state(const CoherentStateSpec& spec) {
    if (spec.n_particles < 1)
        throw ValidationError("n", "particle number must be at least 1");
    if (!(spec.theta >= 0.0 && spec.theta <= kPi))
        throw ValidationError("theta", "polar angle must lie in [0, pi]");
    const int n = spec.n_particles;
    const double phi = wrap_pi(spec.phi);
    std::vector<double> a;
    amplitude_table(spec.theta, n, a);
    Eigen::VectorXcd psi(n + 1);
    for (int m = 0; m <= n; ++m) psi[m] = a[m] * std::exp(cd(0.0, (n - m) * phi));
    return psi;
}

double husimi_point(const Eigen::VectorXcd& state, double p, double phi) {
    check_normalized(state);
    if (!(p >= -1.0 && p <= 1.0))
        throw ValidationError("p", "population imbalance must lie in [-1, 1]");
    const int n = static_cast<int>(state.size()) - 1;
    const Eigen::VectorXcd psi = state / state.norm();
    std::vector<double> a;
    amplitude_table(std::acos(p), n, a);
    return husimi_inner(psi, a, wrap_pi(phi));
}

double HusimiGrid::normalization() const {
    return (n_particles + 1) / (4.0 * kPi) * dp() * dphi() * values.sum();
}

HusimiGrid husimi(const Eigen::VectorXcd& state, int p_cells, int phi_cells, int threads,
                  int state_label) {
    check_normalized(state);
    if (p_cells < 1 || phi_cells < 1)
        throw ValidationError("grid", "grid must have at least one cell per axis");
    const int n = static_cast<int>(state.size()) - 1;
    const Eigen::VectorXcd psi = state / state.norm();

    HusimiGrid grid;
    grid.n_particles = n;
    grid.state_label = state_label;
    grid.p_axis.resize(p_cells);
    grid.phi_axis.resize(phi_cells);
    grid.values.resize(p_cells, phi_cells);
    const double dp = 2.0 / p_cells, dphi = 2.0 * kPi / phi_cells;
    for (int i = 0; i < p_cells; ++i) grid.p_axis[i] = -1.0 + (i + 0.5) * dp;
    for (int j = 0; j < phi_cells; ++j) grid.phi_axis[j] = -kPi + j * dphi;

    parallel_for(p_cells, threads, [&](int i) {
        std::vector<double> a;
        amplitude_table(std::acos(grid.p_axis[i]), n, a);
        for (int j = 0; j < phi_cells; ++j)
            grid.values(i, j) = husimi_inner(psi, a, grid.phi_axis[j]);
    });
    return grid;
}

ReducedDensityMatrix reduced_density(const Eigen::VectorXcd& state) {
    check_normalized(state);
    const int n = static_cast<int>(state.size()) - 1;
    double n1 = 0.0, n2 = 0.0;
    cd x = 0.0;  // <a1+ a2>
    for (int m = 0; m <= n; ++m) {
        const double w = std::norm(state[m]);
        n1 += m * w;
        n2 += (n - m) * w;
        if (m < n)
            x += std::sqrt(double(m + 1) * double(n - m)) * std::conj(state[m + 1]) * state[m];
    }
    const double total = state.squaredNorm();  // pins trace to N exactly
    ReducedDensityMatrix rho;
    rho.n_particles = n;
    rho.entries << cd(n1 / total, 0.0), x / total, std::conj(x) / total, cd(n2 / total, 0.0);
    return rho;
}

double degree_of_simplicity(const ReducedDensityMatrix& rho) {
    const double n = rho.n_particles;
    if (n < 1) throw ValidationError("rho", "reduced density matrix lacks a particle count");
    const double tr = rho.entries(0, 0).real() + rho.entries(1, 1).real();
    if (std::abs(tr - n) > 1e-8 * n)
        throw ValidationError("rho", "trace must equal the particle number");
    const double tr2 = rho.entries.squaredNorm();  // tr(rho^2) for Hermitian rho
    return 2.0 * tr2 / (n * n) - 1.0;
}

Eigen::VectorXd eta_spectrum(const FloquetSpectrum& spectrum) {
    const int d = static_cast<int>(spectrum.eigenvectors.cols());
    if (d == 0 || spectrum.eigenvectors.rows() != d)
        throw ValidationError("spectrum", "spectrum must hold a square eigenvector set");
    Eigen::VectorXd eta(d);
    for (int i = 0; i < d; ++i)
        eta[i] = degree_of_simplicity(reduced_density(spectrum.eigenvectors.col(i)));
    return eta;
}

} // namespace dimer
