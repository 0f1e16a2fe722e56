#ifndef DIMER_MEANFIELD_HPP
#define DIMER_MEANFIELD_HPP

#include <complex>
#include <vector>

#include "dimer/params.hpp"

namespace dimer {

/** Point of the mean-field phase plane: population imbalance p = |c1|^2 -
 *  |c2|^2 and relative phase phi = arg(c2) - arg(c1), wrapped to [-pi, pi). */
struct PhasePoint {
    double p = 0.0;
    double phi = 0.0;
};

/** Condensate amplitudes (c1, c2), |c1|^2 + |c2|^2 = 1. The globally regular
 *  chart: the pendulum chart degenerates at |p| = 1 where phi loses meaning. */
struct MeanFieldAmplitudes {
    std::complex<double> c1{1.0, 0.0};
    std::complex<double> c2{0.0, 0.0};
};

/**
 * Controls for all mean-field integration. The mean-field flow depends on
 * the parameters only through (alpha, drive_amplitude, drive_frequency);
 * the particle number never enters, which is what makes trajectories of
 * configs with equal alpha bit-identical.
 */
struct MfSettings {
    /** Controller tolerances sized so that the amplitude norm drifts by
     *  less than 1e-10 and phase-space area is conserved to 1e-6 over the
     *  thousand-period horizons the diagnostics run on. */
    double rtol = 1e-13;
    double atol = 1e-15;
    /** pendulum_rhs throws PoleProximity when 1 - p^2 < pole_guard. */
    double pole_guard = 1e-12;
    /** poincare_map abandons the pendulum chart for the amplitude chart
     *  when a trajectory reaches 1 - p^2 < chart_switch. */
    double chart_switch = 1e-6;
    /** Fixed-point solve: max-norm tolerance on P(x) - x and the base step
     *  of the fourth-order difference stencil for Jacobians of the map. */
    double newton_tol = 1e-10;
    int newton_max_iter = 50;
    double jacobian_step = 1e-5;
};

/** Chart conversions. amplitudes_from_point fixes the overall U(1) gauge
 *  by making c1 real nonnegative; point_from_amplitudes inverts it. */
MeanFieldAmplitudes amplitudes_from_point(const PhasePoint& x);
PhasePoint point_from_amplitudes(const MeanFieldAmplitudes& c);

/** Wraps a phase into [-pi, pi). */
double wrap_angle(double phi);

/** Discrete two-mode Gross-Pitaevskii right-hand side,
 *    i dc1/dtau = -(1/2) c2 + 2 alpha |c1|^2 c1 + drive(tau) c1
 *    i dc2/dtau = -(1/2) c1 + 2 alpha |c2|^2 c2 - drive(tau) c2
 *  with drive(tau) = (mu/Omega) sin((omega/Omega) tau). */
MeanFieldAmplitudes gpe_rhs(const MeanFieldAmplitudes& c, const DimerParams& params, double tau);

/** Pendulum-chart right-hand side,
 *    dp/dtau   = -sqrt(1 - p^2) sin(phi)
 *    dphi/dtau = 2 alpha p + p cos(phi)/sqrt(1 - p^2) + 2 drive(tau).
 *  Throws PoleProximity when 1 - p^2 < pole_guard). */
PhasePoint pendulum_rhs(const PhasePoint& x, const DimerParams& params, double tau,
                        double pole_guard = 1e-12);

/** Mean-field Hamiltonian alpha p^2 - sqrt(1-p^2) cos(phi) + 2 drive(tau) p;
 *  conserved when the drive amplitude vanishes. */
double mf_energy(const PhasePoint& x, const DimerParams& params, double tau);

/** Strobe of the flow over one driving period: x at tau0 -> x at tau0 + T.
 *  Integrates in the pendulum chart, redoing the whole period in the
 *  amplitude chart if the trajectory approaches the |p| = 1 pole. */
PhasePoint poincare_map(const PhasePoint& x, const DimerParams& params,
                        const MfSettings& settings = {}, double tau0 = 0.0);

/** Trajectory strobed over whole periods: returns {x, P(x), ..., P^n(x)}
 *  (count + 1 points). Each successive period continues the same
 *  trajectory; only the chart choice is re-evaluated per period. */
std::vector<PhasePoint> strobe_orbit(const PhasePoint& seed, int count,
                                     const DimerParams& params,
                                     const MfSettings& settings = {});

/** Stroboscopic section: one strobed orbit per seed, in seed order. */
struct PoincareSection {
    std::vector<PhasePoint> seeds;
    std::vector<std::vector<PhasePoint>> orbits;  // orbits[s][k], k = 0..iterations
};

PoincareSection build_section(const std::vector<PhasePoint>& seeds, int iterations,
                              const DimerParams& params, const MfSettings& settings = {});

/** Time-resolved trajectory samples (for diagnostics and conservation
 *  tests): state at tau0 + j*dtau for j = 0..samples, pendulum chart with
 *  amplitude-chart fallback per segment. */
std::vector<PhasePoint> sample_trajectory(const PhasePoint& seed, double tau0, double dtau,
                                          int samples, const DimerParams& params,
                                          const MfSettings& settings = {});

/** One-period strobe entirely in the amplitude chart (exposed for the
 *  chart-equivalence tests; poincare_map uses it as the pole fallback). */
MeanFieldAmplitudes propagate_amplitudes(const MeanFieldAmplitudes& c, double tau0, double tau1,
                                         const DimerParams& params,
                                         const MfSettings& settings = {});

} // namespace dimer

#endif
