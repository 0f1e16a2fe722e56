#include "dimer/propagator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "dimer/errors.hpp"
#include "dimer/parallel.hpp"

namespace dimer {

using std::complex;
using cd = complex<double>;
constexpr cd kI{0.0, 1.0};

std::string method_name(Method m) {
    switch (m) {
        case Method::SplitStep: return "split";
        case Method::Magnus4: return "magnus4";
        case Method::Rkf78: return "rkf78";
    }
    return "?";
}

Method method_from_name(const std::string& name) {
    if (name == "split") return Method::SplitStep;
    if (name == "magnus4") return Method::Magnus4;
    if (name == "rkf78") return Method::Rkf78;
    throw ValidationError("method", "unknown integrator '" + name + "'");
}

// Step floors come from empirical one-cycle error laws measured against the
// adaptive backend at tight tolerance (rtol 1e-13), sweeping N = 16..1000
// and both the interaction-dominated (alpha = 1.3) and drive-dominated
// (alpha = 0) regimes at the reference drive (mu/Omega = 0.41, omega/Omega = 1.4):
//
//   Magnus4:  error ~ N * (omega * steps)^-4   (both regimes collapse)
//   split:    error ~ 0.6 * N * (scale / (omega * steps))^2
//
// The Magnus4 floor targets 1e-10 per cycle with a 10x margin, so default
// runs deliver ~1e-11; a linear spectral-resolution term backstops
// parameters far outside the calibrated window. The split floor targets
// 1e-6: second order cannot reach the Magnus accuracy at sane cost, and its
// role is exact norm preservation plus cross-validation. The adaptive floor
// merely seeds the initial trial step.
namespace {
constexpr double kMagnusTarget = 1e11;  // (10x margin) / (1e-10 target)
constexpr double kSplitTarget = 6e5;    // 0.6 / (1e-6 target)
} // namespace

int step_floor(const DimerParams& params, Method method) {
    const double n = params.n_particles;
    const double scale = std::max({std::abs(params.alpha) * n, params.drive_amplitude * n, 1.0});
    const double w = params.drive_frequency;
    double steps = 1.0;
    switch (method) {
        case Method::Magnus4:
            steps = std::max(std::pow(kMagnusTarget * n, 0.25), scale) / w;
            break;
        case Method::SplitStep:
            steps = std::sqrt(kSplitTarget * n) * scale / w;
            break;
        case Method::Rkf78:
            steps = 0.02 * scale / w + 1.0;
            break;
    }
    return std::max(2, static_cast<int>(std::ceil(steps)));
}

double default_unitarity_tolerance(const DimerParams& params) {
    return params.n_particles <= 1000 ? 1e-10 : 1e-8;
}

IntegratorSettings resolve_settings(const DimerParams& params, IntegratorSettings s) {
    if (s.steps_per_period < 0)
        s.steps_per_period = -s.steps_per_period;  // explicit count, floor bypassed
    else if (s.steps_per_period == 0)
        s.steps_per_period = step_floor(params, s.method);
    else
        s.steps_per_period = std::max(s.steps_per_period, step_floor(params, s.method));
    if (s.unitarity_tolerance <= 0.0) s.unitarity_tolerance = default_unitarity_tolerance(params);
    return s;
}

Eigen::VectorXd bessel_j_array(double x, int kmax) {
    Eigen::VectorXd j = Eigen::VectorXd::Zero(kmax + 1);
    if (x == 0.0) {
        j[0] = 1.0;
        return j;
    }
    // Miller backward recurrence: seed far above both the order and the
    // argument (J_k decays superexponentially once k > x), normalize with
    // J_0 + 2*sum J_{2k} = 1.
    const double ax = std::abs(x);
    int start = kmax + 16 + static_cast<int>(2.0 * std::sqrt(std::max<double>(kmax, ax)));
    if (start < ax + 16) start = static_cast<int>(ax) + kmax + 16;
    if (start % 2) ++start;

    double jp = 0.0, jc = 1e-280, norm = 0.0;
    for (int k = start; k >= 1; --k) {
        double jm = (2.0 * k / ax) * jc - jp;
        jp = jc;
        jc = jm;
        if (k - 1 <= kmax) j[k - 1] = jc;
        if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2.0 * jc;
        if (std::abs(jc) > 1e260) {
            jp *= 1e-260;
            jc *= 1e-260;
            norm *= 1e-260;
            for (int i = k - 1; i <= kmax; ++i)
                if (i >= 0) j[i] *= 1e-260;
        }
    }
    norm += jc;  // jc now holds the unnormalized J_0
    j /= norm;
    if (x < 0.0)
        for (int k = 1; k <= kmax; k += 2) j[k] = -j[k];
    return j;
}

namespace {

// ---------------------------------------------------------------------------
// Second-order split plan: per step  D(first half) E(dt/2) O(dt) E(dt/2)
// D(second half), where D is the exact flow of the full diagonal (static +
// closed-form integral of the sine drive) and E/O are the commuting even/odd
// Givens blocks of the hopping part. Every factor is unitary.
// ---------------------------------------------------------------------------
struct SplitPlan {
    int dim = 0;
    int nsteps = 0;
    Eigen::VectorXcd dhalf;            // exp(-i * static_diag * dt/2)
    std::vector<double> q;             // 2 per step: drive phase integrals per half
    Eigen::VectorXd ce, se;            // even-pair Givens, angle off[m]*dt/2
    Eigen::VectorXd co, so;            // odd-pair Givens, angle off[m]*dt
};

SplitPlan make_split_plan(const HamiltonianMatrix& h, const DimerParams& params, double tau0,
                          double tau1, int nsteps) {
    SplitPlan plan;
    plan.dim = h.dimension;
    plan.nsteps = nsteps;
    const double dt = (tau1 - tau0) / nsteps;
    plan.dhalf.resize(h.dimension);
    for (int m = 0; m < h.dimension; ++m)
        plan.dhalf[m] = std::exp(-kI * (h.diagonal[m] * dt / 2.0));
    plan.q.resize(2 * nsteps);
    const double w = params.drive_frequency, a = params.drive_amplitude / w;
    for (int s = 0; s < nsteps; ++s) {
        const double t0 = tau0 + s * dt, tm = t0 + dt / 2.0, t1 = t0 + dt;
        plan.q[2 * s] = a * (std::cos(w * t0) - std::cos(w * tm));
        plan.q[2 * s + 1] = a * (std::cos(w * tm) - std::cos(w * t1));
    }
    const int nb = h.dimension - 1;
    plan.ce.resize(nb);
    plan.se.resize(nb);
    plan.co.resize(nb);
    plan.so.resize(nb);
    for (int m = 0; m < nb; ++m) {
        plan.ce[m] = std::cos(h.off_diagonal[m] * dt / 2.0);
        plan.se[m] = std::sin(h.off_diagonal[m] * dt / 2.0);
        plan.co[m] = std::cos(h.off_diagonal[m] * dt);
        plan.so[m] = std::sin(h.off_diagonal[m] * dt);
    }
    return plan;
}

// Diagonal half-flow: psi[m] *= dhalf[m] * exp(-i*q*(2m-N)); the integer
// drive exponent is walked with one complex multiply per element.
inline void split_apply_diag(const SplitPlan& plan, double q, int n, Eigen::VectorXcd& psi) {
    const cd step = std::exp(-kI * (2.0 * q));
    cd z = std::exp(kI * (q * n));
    for (int m = 0; m < plan.dim; ++m) {
        psi[m] *= plan.dhalf[m] * z;
        z *= step;
    }
}

inline void split_apply_pairs(const Eigen::VectorXd& c, const Eigen::VectorXd& s, int first,
                              Eigen::VectorXcd& psi) {
    const int nb = static_cast<int>(c.size());
    for (int m = first; m < nb; m += 2) {
        const cd a = psi[m], b = psi[m + 1];
        psi[m] = c[m] * a - kI * (s[m] * b);
        psi[m + 1] = c[m] * b - kI * (s[m] * a);
    }
}

void split_propagate(const SplitPlan& plan, int n_particles, Eigen::VectorXcd& psi,
                     std::int64_t& ops) {
    for (int s = 0; s < plan.nsteps; ++s) {
        split_apply_diag(plan, plan.q[2 * s], n_particles, psi);
        split_apply_pairs(plan.ce, plan.se, 0, psi);
        split_apply_pairs(plan.co, plan.so, 1, psi);
        split_apply_pairs(plan.ce, plan.se, 0, psi);
        split_apply_diag(plan, plan.q[2 * s + 1], n_particles, psi);
        ops += 5;
    }
}

// ---------------------------------------------------------------------------
// Fourth-order commutator-free Magnus plan. Each step covers dt with two
// exponential stages exp(X2) exp(X1),
//   X_i = -i * dt * ( H0/2 + w_i * V ),   V = drive diagonal,
//   w_1 = g1 f(t_a) + g2 f(t_b),  w_2 = g2 f(t_a) + g1 f(t_b),
// with Gauss-Legendre nodes t_{a,b} = t + (1/2 -+ sqrt(3)/6) dt and weights
// g_{1,2} = 1/4 +- sqrt(3)/6. Each stage exponential is evaluated by a
// Chebyshev expansion with Bessel coefficients, spectral bounds from
// Gershgorin discs of the (real symmetric tridiagonal) stage matrix.
// ---------------------------------------------------------------------------
struct ChebStage {
    double wdrive;  // multiplies the scaled drive diagonal
    double center;  // spectral center of the stage matrix (phase shift)
    double half;    // spectral half-width (Chebyshev argument)
    std::vector<cd> coef;
};

struct MagnusPlan {
    int dim = 0;
    int nsteps = 0;
    Eigen::VectorXd sdiag;   // dt/2 * static diagonal
    Eigen::VectorXd soff;    // dt/2 * off-diagonal
    Eigen::VectorXd sdrive;  // dt   * drive diagonal
    std::vector<ChebStage> stages;  // 2 per step, in application order
};

ChebStage make_stage(const MagnusPlan& plan, double w) {
    ChebStage st;
    st.wdrive = w;
    const int d = plan.dim;
    double lo = 0.0, hi = 0.0;
    for (int m = 0; m < d; ++m) {
        const double diag = plan.sdiag[m] + w * plan.sdrive[m];
        double r = 0.0;
        if (m > 0) r += std::abs(plan.soff[m - 1]);
        if (m < d - 1) r += std::abs(plan.soff[m]);
        const double a = diag - r, b = diag + r;
        if (m == 0 || a < lo) lo = a;
        if (m == 0 || b > hi) hi = b;
    }
    st.center = 0.5 * (hi + lo);
    st.half = 0.5 * (hi - lo) * (1.0 + 1e-12) + 1e-30;

    const double x = st.half;
    int kmax = static_cast<int>(x + 16.0 * std::cbrt(x + 1.0) + 24.0);
    Eigen::VectorXd j = bessel_j_array(x, kmax);
    int k = kmax;
    while (k > 2 && std::abs(j[k]) < 1e-17 && std::abs(j[k - 1]) < 1e-17) --k;
    st.coef.resize(k + 1);
    const cd mi[4] = {cd{1, 0}, cd{0, -1}, cd{-1, 0}, cd{0, 1}};  // (-i)^k
    st.coef[0] = j[0];
    for (int q = 1; q <= k; ++q) st.coef[q] = 2.0 * j[q] * mi[q % 4];
    return st;
}

MagnusPlan make_magnus_plan(const HamiltonianMatrix& h, const DimerParams& params, double tau0,
                            double tau1, int nsteps) {
    MagnusPlan plan;
    plan.dim = h.dimension;
    plan.nsteps = nsteps;
    const double dt = (tau1 - tau0) / nsteps;
    plan.sdiag = (dt / 2.0) * h.diagonal;
    plan.soff = (dt / 2.0) * h.off_diagonal;
    plan.sdrive = dt * h.drive_diagonal;

    const double sq3 = std::sqrt(3.0);
    const double c1 = 0.5 - sq3 / 6.0, c2 = 0.5 + sq3 / 6.0;
    const double g1 = 0.25 + sq3 / 6.0, g2 = 0.25 - sq3 / 6.0;
    plan.stages.reserve(2 * nsteps);
    for (int s = 0; s < nsteps; ++s) {
        const double t = tau0 + s * dt;
        const double f1 = drive_factor(params, t + c1 * dt);
        const double f2 = drive_factor(params, t + c2 * dt);
        plan.stages.push_back(make_stage(plan, g1 * f1 + g2 * f2));
        plan.stages.push_back(make_stage(plan, g2 * f1 + g1 * f2));
    }
    return plan;
}

struct ChebWorkspace {
    Eigen::VectorXcd t0, t1, t2, acc;
    void resize(int d) {
        t0.resize(d);
        t1.resize(d);
        t2.resize(d);
        acc.resize(d);
    }
};

// y = S x with S = (stage matrix - center) / half, stage matrix =
// diag(sdiag + w*sdrive) + tridiagonal soff couplings.
inline void stage_matvec(const MagnusPlan& p, const ChebStage& st, const Eigen::VectorXcd& x,
                         Eigen::VectorXcd& y) {
    const int d = p.dim;
    const double w = st.wdrive, c = st.center, ih = 1.0 / st.half;
    const double* sd = p.sdiag.data();
    const double* sv = p.sdrive.data();
    const double* so = p.soff.data();
    const cd* xp = x.data();
    cd* yp = y.data();
    if (d == 1) {
        yp[0] = (sd[0] + w * sv[0] - c) * ih * xp[0];
        return;
    }
    yp[0] = ((sd[0] + w * sv[0] - c) * xp[0] + so[0] * xp[1]) * ih;
    for (int m = 1; m < d - 1; ++m)
        yp[m] = (so[m - 1] * xp[m - 1] + (sd[m] + w * sv[m] - c) * xp[m] + so[m] * xp[m + 1]) * ih;
    yp[d - 1] = (so[d - 2] * xp[d - 2] + (sd[d - 1] + w * sv[d - 1] - c) * xp[d - 1]) * ih;
}

void magnus_propagate(const MagnusPlan& plan, Eigen::VectorXcd& psi, ChebWorkspace& ws,
                      std::int64_t& ops) {
    const int d = plan.dim;
    ws.resize(d);
    for (const ChebStage& st : plan.stages) {
        const int kk = static_cast<int>(st.coef.size()) - 1;
        ws.t0 = psi;
        stage_matvec(plan, st, ws.t0, ws.t1);
        ws.acc = st.coef[0] * ws.t0 + st.coef[1] * ws.t1;
        for (int k = 2; k <= kk; ++k) {
            stage_matvec(plan, st, ws.t1, ws.t2);
            ws.t2 = 2.0 * ws.t2 - ws.t0;
            ws.acc += st.coef[k] * ws.t2;
            ws.t0.swap(ws.t1);
            ws.t1.swap(ws.t2);
        }
        psi = std::exp(-kI * st.center) * ws.acc;
        ops += kk;
    }
}

// ---------------------------------------------------------------------------
// Adaptive backend on the raw amplitudes.
// ---------------------------------------------------------------------------
using OdeState = std::vector<cd>;

struct SchrodingerRhs {
    const HamiltonianMatrix* h;
    const DimerParams* params;
    std::int64_t* evals;
    void operator()(const OdeState& x, OdeState& dxdt, double tau) const {
        const int d = h->dimension;
        dxdt.resize(d);
        const double f = drive_factor(*params, tau);
        const double* dg = h->diagonal.data();
        const double* dv = h->drive_diagonal.data();
        const double* off = h->off_diagonal.data();
        if (d == 1) {
            dxdt[0] = -kI * ((dg[0] + f * dv[0]) * x[0]);
        } else {
            dxdt[0] = -kI * ((dg[0] + f * dv[0]) * x[0] + off[0] * x[1]);
            for (int m = 1; m < d - 1; ++m)
                dxdt[m] =
                    -kI * (off[m - 1] * x[m - 1] + (dg[m] + f * dv[m]) * x[m] + off[m] * x[m + 1]);
            dxdt[d - 1] = -kI * (off[d - 2] * x[d - 2] + (dg[d - 1] + f * dv[d - 1]) * x[d - 1]);
        }
        ++*evals;
    }
};

void rkf78_propagate(const HamiltonianMatrix& h, const DimerParams& params,
                     const IntegratorSettings& s, double tau0, double tau1, Eigen::VectorXcd& psi,
                     std::int64_t& ops) {
    namespace ode = boost::numeric::odeint;
    OdeState y(psi.data(), psi.data() + psi.size());
    SchrodingerRhs rhs{&h, &params, &ops};
    const double dt0 = params.period() / step_floor(params, Method::Rkf78);
    auto ctrl = ode::make_controlled(s.adaptive_atol, s.adaptive_rtol,
                                     ode::runge_kutta_fehlberg78<OdeState>());
    ode::integrate_adaptive(ctrl, rhs, y, tau0, tau1, std::min(dt0, tau1 - tau0));
    for (int m = 0; m < psi.size(); ++m) psi[m] = y[m];
}

// Shared plan for one interval; per-column application.
struct PropagationPlan {
    Method method;
    const HamiltonianMatrix* h;
    const DimerParams* params;
    IntegratorSettings settings;
    double tau0, tau1;
    SplitPlan split;
    MagnusPlan magnus;
};

PropagationPlan make_plan(const HamiltonianMatrix& h, const DimerParams& params,
                          const IntegratorSettings& settings, double tau0, double tau1) {
    PropagationPlan plan;
    plan.method = settings.method;
    plan.h = &h;
    plan.params = &params;
    plan.settings = settings;
    plan.tau0 = tau0;
    plan.tau1 = tau1;
    if (tau1 <= tau0) return plan;  // identity
    const double frac = (tau1 - tau0) / params.period();
    const int nsteps =
        std::max(1, static_cast<int>(std::ceil(settings.steps_per_period * frac - 1e-12)));
    if (settings.method == Method::SplitStep)
        plan.split = make_split_plan(h, params, tau0, tau1, nsteps);
    else if (settings.method == Method::Magnus4)
        plan.magnus = make_magnus_plan(h, params, tau0, tau1, nsteps);
    return plan;
}

void apply_plan(const PropagationPlan& plan, Eigen::VectorXcd& psi, ChebWorkspace& ws,
                std::int64_t& ops) {
    if (plan.tau1 <= plan.tau0) return;
    switch (plan.method) {
        case Method::SplitStep:
            split_propagate(plan.split, plan.params->n_particles, psi, ops);
            break;
        case Method::Magnus4:
            magnus_propagate(plan.magnus, psi, ws, ops);
            break;
        case Method::Rkf78:
            rkf78_propagate(*plan.h, *plan.params, plan.settings, plan.tau0, plan.tau1, psi, ops);
            break;
    }
}

} // namespace

Eigen::VectorXcd propagate_state(const Eigen::VectorXcd& psi, const DimerParams& params,
                                 const IntegratorSettings& settings, double tau0, double tau1,
                                 IntegratorReport* report) {
    params.validate();
    if (psi.size() != params.dim())
        throw ValidationError("state", "amplitude vector length must be N+1");
    if (tau1 < tau0) throw ValidationError("tau", "propagation requires tau1 >= tau0");
    const IntegratorSettings s = resolve_settings(params, settings);
    const HamiltonianMatrix h = build_static_hamiltonian(params);
    const PropagationPlan plan = make_plan(h, params, s, tau0, tau1);

    Eigen::VectorXcd out = psi;
    ChebWorkspace ws;
    std::int64_t ops = 0;
    apply_plan(plan, out, ws, ops);

    double drift = 0.0;
    const double nin = psi.norm();
    if (nin > 0.0) {
        drift = std::abs(out.norm() / nin - 1.0);
        if (drift > s.unitarity_tolerance) {
            char msg[128];
            std::snprintf(msg, sizeof(msg),
                          "norm drift %.3e exceeds tolerance %.3e; increase steps_per_period",
                          drift, s.unitarity_tolerance);
            throw StepTooLarge(msg);
        }
    }
    if (report) {
        report->method = method_name(s.method);
        report->steps_per_period = (s.method == Method::Rkf78) ? 0 : s.steps_per_period;
        report->rhs_evaluations = ops;
        report->max_norm_drift = drift;
        report->unitarity_defect = drift;  // single-state run: norm drift only
        report->defect_exact = false;
    }
    return out;
}

double unitarity_defect(const Eigen::MatrixXcd& u) {
    const Eigen::MatrixXcd gram = u.adjoint() * u;
    const int d = static_cast<int>(u.cols());
    return (gram - Eigen::MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff();
}

OneCycleOperator one_cycle_operator(const DimerParams& params, const IntegratorSettings& settings) {
    params.validate();
    const IntegratorSettings s = resolve_settings(params, settings);
    const HamiltonianMatrix h = build_static_hamiltonian(params);
    const PropagationPlan plan = make_plan(h, params, s, 0.0, params.period());
    const int d = params.dim();

    OneCycleOperator op;
    op.params = params;
    op.settings = s;
    op.matrix.resize(d, d);
    op.report.method = method_name(s.method);
    op.report.steps_per_period = (s.method == Method::Rkf78) ? 0 : s.steps_per_period;

    std::atomic<std::int64_t> total_ops{0};
    std::vector<double> drift(d, 0.0);
    parallel_for(d, s.threads, [&](int col) {
        Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(d);
        psi[col] = 1.0;
        ChebWorkspace ws;
        std::int64_t ops = 0;
        apply_plan(plan, psi, ws, ops);
        op.matrix.col(col) = psi;
        drift[col] = std::abs(psi.norm() - 1.0);
        total_ops.fetch_add(ops, std::memory_order_relaxed);
    });
    op.report.rhs_evaluations = total_ops.load();
    op.report.max_norm_drift = *std::max_element(drift.begin(), drift.end());

    if (d <= 2001) {
        op.report.unitarity_defect = unitarity_defect(op.matrix);
        op.report.defect_exact = true;
    } else {
        // Probe: worst row deviation of U+ U from identity on sampled columns.
        double worst = 0.0;
        const int probes = 32;
        for (int k = 0; k < probes; ++k) {
            const int j = static_cast<int>((static_cast<std::int64_t>(k) * (d - 1)) / (probes - 1));
            Eigen::VectorXcd g = op.matrix.adjoint() * op.matrix.col(j);
            g[j] -= 1.0;
            worst = std::max(worst, g.cwiseAbs().maxCoeff());
        }
        op.report.unitarity_defect = worst;
        op.report.defect_exact = false;
    }
    if (op.report.unitarity_defect > s.unitarity_tolerance) {
        char msg[128];
        std::snprintf(msg, sizeof(msg), "one-cycle unitarity defect %.3e exceeds tolerance %.3e",
                      op.report.unitarity_defect, s.unitarity_tolerance);
        throw UnitarityLoss(msg);
    }
    return op;
}

} // namespace dimer
