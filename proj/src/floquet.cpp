#include "dimer/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

#include "dimer/errors.hpp"

#if defined(DIMER_HAVE_LAPACKE)
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>
#endif

namespace dimer {

using cd = std::complex<double>;
constexpr cd kI{0.0, 1.0};
constexpr double kTwoPi = 2.0 * std::numbers::pi;

namespace {

double wrap_phase(double g) {
    g = std::fmod(g, kTwoPi);
    if (g < 0.0) g += kTwoPi;
    if (g == kTwoPi) g = 0.0;
    return g;
}

/** Schur reduction of a (numerically normal) unitary matrix: returns the
 *  orthonormal Schur basis and the eigenvalue list. For a normal matrix the
 *  triangular factor is diagonal up to roundoff, so the Schur vectors are
 *  eigenvectors except inside near-degenerate clusters, which are repaired
 *  downstream. */
void unitary_schur(const Eigen::MatrixXcd& u, Eigen::MatrixXcd& vs, Eigen::VectorXcd& w) {
    const int n = static_cast<int>(u.rows());
#if defined(DIMER_HAVE_LAPACKE)
    Eigen::MatrixXcd a = u;  // overwritten by the triangular factor
    vs.resize(n, n);
    w.resize(n);
    lapack_int sdim = 0;
    const lapack_int info =
        LAPACKE_zgees(LAPACK_COL_MAJOR, 'V', 'N', nullptr, n, a.data(), n, &sdim, w.data(),
                      vs.data(), n);
    if (info != 0)
        throw DiagonalizationFailure("Schur reduction failed with LAPACK info " +
                                     std::to_string(info));
#else
    Eigen::ComplexSchur<Eigen::MatrixXcd> schur(u, true);
    if (schur.info() != Eigen::Success)
        throw DiagonalizationFailure("Schur reduction did not converge");
    vs = schur.matrixU();
    w = schur.matrixT().diagonal();
#endif
}

struct ClusterRange {
    std::vector<int> indices;  // positions in the sorted arrays
};

/** Groups sorted phases into near-degenerate clusters on the circle
 *  (wrap-aware): consecutive gaps below tol merge. */
std::vector<ClusterRange> find_clusters(const Eigen::VectorXd& gamma, double tol) {
    const int n = static_cast<int>(gamma.size());
    std::vector<ClusterRange> out;
    if (n == 0) return out;
    if (n == 1) {
        out.push_back({{0}});
        return out;
    }
    // circular gaps; start walking just after the largest gap
    int start = 0;
    double biggest = -1.0;
    for (int i = 0; i < n; ++i) {
        const double next = (i + 1 < n) ? gamma[i + 1] : gamma[0] + kTwoPi;
        const double gap = next - gamma[i];
        if (gap > biggest) {
            biggest = gap;
            start = (i + 1) % n;
        }
    }
    if (biggest < tol) {  // everything is one cluster
        ClusterRange all;
        all.indices.resize(n);
        std::iota(all.indices.begin(), all.indices.end(), 0);
        out.push_back(std::move(all));
        return out;
    }
    ClusterRange cur;
    cur.indices.push_back(start);
    for (int k = 1; k <= n; ++k) {
        const int i = (start + k) % n;
        if (k == n) {
            out.push_back(std::move(cur));
            break;
        }
        const int prev = (start + k - 1) % n;
        double gap = gamma[i] - gamma[prev];
        if (gap < 0) gap += kTwoPi;
        if (gap < tol) {
            cur.indices.push_back(i);
        } else {
            out.push_back(std::move(cur));
            cur = ClusterRange{};
            cur.indices.push_back(i);
        }
    }
    return out;
}

} // namespace

FloquetSpectrum diagonalize(const OneCycleOperator& u, const DiagonalizationSettings& settings) {
    const int n = static_cast<int>(u.matrix.rows());
    Eigen::MatrixXcd vs;
    Eigen::VectorXcd w;
    unitary_schur(u.matrix, vs, w);

    Eigen::VectorXd gamma(n);
    for (int i = 0; i < n; ++i) gamma[i] = wrap_phase(-std::arg(w[i]));

    // raw order: eigenphase ascending
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::stable_sort(perm.begin(), perm.end(), [&](int a, int b) { return gamma[a] < gamma[b]; });

    FloquetSpectrum sp;
    sp.drive_frequency = u.params.drive_frequency;
    sp.eigenphases.resize(n);
    sp.eigenvectors.resize(n, n);
    for (int i = 0; i < n; ++i) {
        sp.eigenphases[i] = gamma[perm[i]];
        sp.eigenvectors.col(i) = vs.col(perm[i]);
    }

    // cluster repair: rotate each near-degenerate block into the basis that
    // diagonalizes the block of U restricted to it; the rotation is unitary,
    // so global orthonormality survives exactly.
    for (const ClusterRange& c : find_clusters(sp.eigenphases, settings.cluster_tol)) {
        const int k = static_cast<int>(c.indices.size());
        if (k < 2) continue;
        Eigen::MatrixXcd vc(n, k);
        for (int j = 0; j < k; ++j) vc.col(j) = sp.eigenvectors.col(c.indices[j]);
        const Eigen::MatrixXcd b = vc.adjoint() * (u.matrix * vc);
        cd mean = 0.0;
        for (int j = 0; j < k; ++j) mean += b(j, j);
        const double gbar = wrap_phase(-std::arg(mean));
        const Eigen::MatrixXcd brot = std::exp(kI * gbar) * b;
        const Eigen::MatrixXcd herm = (kI / 2.0) * (brot - brot.adjoint());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm);
        if (es.info() != Eigen::Success)
            throw DiagonalizationFailure("cluster repair eigensolve failed");
        const Eigen::MatrixXcd rotated = vc * es.eigenvectors();
        for (int j = 0; j < k; ++j) {
            sp.eigenvectors.col(c.indices[j]) = rotated.col(j);
            sp.eigenphases[c.indices[j]] = wrap_phase(gbar + es.eigenvalues()[j]);
        }
    }

    // repairs inside wrap-straddling clusters can leave the array cyclically
    // shifted; restore strict ascending order
    std::iota(perm.begin(), perm.end(), 0);
    std::stable_sort(perm.begin(), perm.end(),
                     [&](int a, int b) { return sp.eigenphases[a] < sp.eigenphases[b]; });
    {
        Eigen::VectorXd g2(n);
        Eigen::MatrixXcd v2(n, n);
        for (int i = 0; i < n; ++i) {
            g2[i] = sp.eigenphases[perm[i]];
            v2.col(i) = sp.eigenvectors.col(perm[i]);
        }
        sp.eigenphases.swap(g2);
        sp.eigenvectors.swap(v2);
    }

    // residuals ||U v - e^{-i gamma} v||
    Eigen::MatrixXcd resid = u.matrix * sp.eigenvectors;
    for (int i = 0; i < n; ++i) resid.col(i) -= std::exp(-kI * sp.eigenphases[i]) * sp.eigenvectors.col(i);
    sp.residuals.resize(n);
    for (int i = 0; i < n; ++i) sp.residuals[i] = resid.col(i).norm();
    sp.max_residual = sp.residuals.maxCoeff();

    const double bound = settings.residual_tolerance * std::sqrt(static_cast<double>(n));
    if (sp.max_residual > bound) {
        char msg[128];
        std::snprintf(msg, sizeof(msg), "max eigen-residual %.3e exceeds %.3e after cluster repair",
                      sp.max_residual, bound);
        throw DiagonalizationFailure(msg);
    }

    sp.quasienergies.resize(n);
    for (int i = 0; i < n; ++i)
        sp.quasienergies[i] = quasienergy_representative(sp.eigenphases[i], sp.drive_frequency);
    return sp;
}

double quasienergy_representative(double gamma, double drive_frequency) {
    if (!std::isfinite(gamma)) throw ValidationError("gamma", "eigenphase must be finite");
    const double eps = gamma * drive_frequency / kTwoPi;  // hbar*gamma/T in units of hbar*Omega
    return eps - drive_frequency * std::floor(eps / drive_frequency + 0.5);
}

void order_by_simplicity(FloquetSpectrum& spectrum, const Eigen::VectorXd& eta_values) {
    const int n = static_cast<int>(spectrum.eigenphases.size());
    if (eta_values.size() != n)
        throw ValidationError("eta", "eta sequence length must equal the spectrum size");
    for (int i = 0; i < n; ++i)
        if (!(eta_values[i] > -1e-6 && eta_values[i] < 1.0 + 1e-6))
            throw ValidationError("eta", "eta value out of [0, 1] range at index " +
                                             std::to_string(i));
    spectrum.eta_order.resize(n);
    std::iota(spectrum.eta_order.begin(), spectrum.eta_order.end(), 0);
    std::stable_sort(spectrum.eta_order.begin(), spectrum.eta_order.end(), [&](int a, int b) {
        if (eta_values[a] != eta_values[b]) return eta_values[a] < eta_values[b];
        return a < b;
    });
}

} // namespace dimer
