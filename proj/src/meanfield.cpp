#include "dimer/meanfield.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>

#include <boost/numeric/odeint.hpp>

#include "dimer/errors.hpp"
#include "dimer/model.hpp"

namespace dimer {

namespace ode = boost::numeric::odeint;
using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;

namespace {

/** Internal signal: the pendulum chart came too close to its pole and the
 *  caller must redo the segment in the amplitude chart. */
struct ChartEscape {};

using PendulumState = std::array<double, 2>;   // (p, phi), phi unwrapped
using AmplitudeState = std::array<double, 4>;  // (Re c1, Im c1, Re c2, Im c2)

double clamp_p(double p) { return std::clamp(p, -1.0, 1.0); }

/** Integrates dx/dtau = rhs over [tau0, tau1] with the controlled
 *  high-order stepper shared by every mean-field computation. */
template <typename State, typename Rhs>
void integrate_segment(State& y, double tau0, double tau1, const MfSettings& s, Rhs&& rhs) {
    if (!(tau1 > tau0)) return;
    auto ctrl = ode::make_controlled(s.atol, s.rtol, ode::runge_kutta_fehlberg78<State>());
    const double dt0 = std::min((tau1 - tau0) / 16.0, 0.1);
    ode::integrate_adaptive(ctrl, rhs, y, tau0, tau1, dt0);
}

void gpe_segment(AmplitudeState& y, double tau0, double tau1, const DimerParams& params,
                 const MfSettings& settings) {
    const double alpha = params.alpha;
    integrate_segment(y, tau0, tau1, settings,
                      [&params, alpha](const AmplitudeState& x, AmplitudeState& dx, double tau) {
                          const cd c1(x[0], x[1]), c2(x[2], x[3]);
                          const double d = drive_factor(params, tau);
                          const cd d1 = cd(0, 1) * (0.5 * c2 - (2 * alpha * std::norm(c1) + d) * c1);
                          const cd d2 = cd(0, 1) * (0.5 * c1 - (2 * alpha * std::norm(c2) - d) * c2);
                          dx = {d1.real(), d1.imag(), d2.real(), d2.imag()};
                      });
}

/** Pendulum-chart segment; throws ChartEscape when 1 - p^2 falls below the
 *  chart-switch margin (also covering stage evaluations beyond |p| = 1). */
void pendulum_segment(PendulumState& y, double tau0, double tau1, const DimerParams& params,
                      const MfSettings& settings) {
    const double alpha = params.alpha;
    const double margin = std::max(settings.chart_switch, settings.pole_guard);
    integrate_segment(y, tau0, tau1, settings,
                      [&params, alpha, margin](const PendulumState& x, PendulumState& dx,
                                               double tau) {
                          const double w = 1.0 - x[0] * x[0];
                          if (w < margin) throw ChartEscape{};
                          const double root = std::sqrt(w);
                          const double d = drive_factor(params, tau);
                          dx[0] = -root * std::sin(x[1]);
                          dx[1] = 2 * alpha * x[0] + x[0] * std::cos(x[1]) / root + 2 * d;
                      });
}

/** One segment of the flow in phase-plane coordinates, with the automatic
 *  pendulum -> amplitude chart fallback. The whole segment is redone in the
 *  amplitude chart on escape, so the result never depends on how far the
 *  abandoned attempt got. */
PhasePoint flow_segment(const PhasePoint& x, double tau0, double tau1, const DimerParams& params,
                        const MfSettings& settings) {
    if (1.0 - x.p * x.p >= std::max(settings.chart_switch, settings.pole_guard)) {
        try {
            PendulumState y{x.p, x.phi};
            pendulum_segment(y, tau0, tau1, params, settings);
            return {clamp_p(y[0]), wrap_angle(y[1])};
        } catch (const ChartEscape&) {
            // fall through to the regular chart
        }
    }
    AmplitudeState y;
    const auto c = amplitudes_from_point(x);
    y = {c.c1.real(), c.c1.imag(), c.c2.real(), c.c2.imag()};
    gpe_segment(y, tau0, tau1, params, settings);
    return point_from_amplitudes({cd(y[0], y[1]), cd(y[2], y[3])});
}

} // namespace

double wrap_angle(double phi) {
    phi = std::remainder(phi, 2.0 * kPi);
    if (phi >= kPi) phi -= 2.0 * kPi;  // remainder returns (-pi, pi]; want [-pi, pi)
    return phi;
}

MeanFieldAmplitudes amplitudes_from_point(const PhasePoint& x) {
    if (!(std::abs(x.p) <= 1.0))
        throw ValidationError("p", "population imbalance must lie in [-1, 1]");
    MeanFieldAmplitudes c;
    c.c1 = std::sqrt((1.0 + x.p) / 2.0);
    c.c2 = std::sqrt((1.0 - x.p) / 2.0) * std::exp(cd(0.0, x.phi));
    return c;
}

PhasePoint point_from_amplitudes(const MeanFieldAmplitudes& c) {
    const double n1 = std::norm(c.c1), n2 = std::norm(c.c2);
    const double total = n1 + n2;
    if (!(total > 0.0))
        throw ValidationError("amplitudes", "amplitudes must not both vanish");
    PhasePoint x;
    x.p = clamp_p((n1 - n2) / total);
    // the relative phase degenerates at the poles; pin it to 0 there
    x.phi = (n1 == 0.0 || n2 == 0.0) ? 0.0 : wrap_angle(std::arg(c.c2) - std::arg(c.c1));
    return x;
}

MeanFieldAmplitudes gpe_rhs(const MeanFieldAmplitudes& c, const DimerParams& params, double tau) {
    const double d = drive_factor(params, tau);
    MeanFieldAmplitudes dc;
    dc.c1 = cd(0, 1) * (0.5 * c.c2 - (2 * params.alpha * std::norm(c.c1) + d) * c.c1);
    dc.c2 = cd(0, 1) * (0.5 * c.c1 - (2 * params.alpha * std::norm(c.c2) - d) * c.c2);
    return dc;
}

PhasePoint pendulum_rhs(const PhasePoint& x, const DimerParams& params, double tau,
                        double pole_guard) {
    const double w = 1.0 - x.p * x.p;
    if (w < pole_guard) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "1 - p^2 = %.3e below pole guard %.3e", w, pole_guard);
        throw PoleProximity(buf);
    }
    const double root = std::sqrt(w);
    const double d = drive_factor(params, tau);
    PhasePoint dx;
    dx.p = -root * std::sin(x.phi);
    dx.phi = 2 * params.alpha * x.p + x.p * std::cos(x.phi) / root + 2 * d;
    return dx;
}

double mf_energy(const PhasePoint& x, const DimerParams& params, double tau) {
    if (!(std::abs(x.p) <= 1.0))
        throw ValidationError("p", "population imbalance must lie in [-1, 1]");
    return params.alpha * x.p * x.p - std::sqrt(1.0 - x.p * x.p) * std::cos(x.phi) +
           2.0 * drive_factor(params, tau) * x.p;
}

PhasePoint poincare_map(const PhasePoint& x, const DimerParams& params,
                        const MfSettings& settings, double tau0) {
    return flow_segment(x, tau0, tau0 + params.period(), params, settings);
}

std::vector<PhasePoint> strobe_orbit(const PhasePoint& seed, int count, const DimerParams& params,
                                     const MfSettings& settings) {
    if (count < 0) throw ValidationError("iterations", "strobe count must be >= 0");
    std::vector<PhasePoint> orbit;
    orbit.reserve(count + 1);
    PhasePoint x{clamp_p(seed.p), wrap_angle(seed.phi)};
    orbit.push_back(x);
    // the flow is T-periodic, so every period is the tau = 0 map
    for (int k = 0; k < count; ++k) {
        x = poincare_map(x, params, settings);
        orbit.push_back(x);
    }
    return orbit;
}

PoincareSection build_section(const std::vector<PhasePoint>& seeds, int iterations,
                              const DimerParams& params, const MfSettings& settings) {
    PoincareSection section;
    section.seeds = seeds;
    section.orbits.resize(seeds.size());
    for (std::size_t s = 0; s < seeds.size(); ++s)
        section.orbits[s] = strobe_orbit(seeds[s], iterations, params, settings);
    return section;
}

std::vector<PhasePoint> sample_trajectory(const PhasePoint& seed, double tau0, double dtau,
                                          int samples, const DimerParams& params,
                                          const MfSettings& settings) {
    if (!(dtau > 0.0)) throw ValidationError("dtau", "sample spacing must be positive");
    if (samples < 0) throw ValidationError("samples", "sample count must be >= 0");
    std::vector<PhasePoint> path;
    path.reserve(samples + 1);
    PhasePoint x{clamp_p(seed.p), wrap_angle(seed.phi)};
    path.push_back(x);
    for (int j = 0; j < samples; ++j) {
        x = flow_segment(x, tau0 + j * dtau, tau0 + (j + 1) * dtau, params, settings);
        path.push_back(x);
    }
    return path;
}

MeanFieldAmplitudes propagate_amplitudes(const MeanFieldAmplitudes& c, double tau0, double tau1,
                                         const DimerParams& params, const MfSettings& settings) {
    if (!(tau1 >= tau0)) throw ValidationError("tau", "tau1 must be >= tau0");
    AmplitudeState y{c.c1.real(), c.c1.imag(), c.c2.real(), c.c2.imag()};
    gpe_segment(y, tau0, tau1, params, settings);
    return {cd(y[0], y[1]), cd(y[2], y[3])};
}

} // namespace dimer
