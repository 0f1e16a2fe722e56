#include "dimer/orbits.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <vector>

#include "dimer/errors.hpp"

namespace dimer {

constexpr double kPi = std::numbers::pi;

namespace {

/** Wrap-aware displacement a - b on the phase circle, in (-pi, pi]. */
double angle_diff(double a, double b) { return std::remainder(a - b, 2.0 * kPi); }

PhasePoint clamp_point(PhasePoint x) {
    x.p = std::clamp(x.p, -1.0 + 1e-9, 1.0 - 1e-9);
    x.phi = wrap_angle(x.phi);
    return x;
}

struct Frame {
    double su = 1.0, sv = 1.0;  // aspect scales for dphi and dp
};

/** Center-relative coordinates (u, v) = (dphi, dp) of an orbit. */
void relative_coords(const std::vector<PhasePoint>& orbit, const PhasePoint& center,
                     std::vector<double>& u, std::vector<double>& v) {
    const std::size_t n = orbit.size();
    u.resize(n);
    v.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        u[i] = angle_diff(orbit[i].phi, center.phi);
        v[i] = orbit[i].p - center.p;
    }
}

Frame aspect_frame(const std::vector<double>& u, const std::vector<double>& v) {
    const std::size_t n = u.size();
    double mu = 0.0, mv = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mu += u[i];
        mv += v[i];
    }
    mu /= n;
    mv /= n;
    double su = 0.0, sv = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        su += (u[i] - mu) * (u[i] - mu);
        sv += (v[i] - mv) * (v[i] - mv);
    }
    return {std::sqrt(su / n), std::sqrt(sv / n)};
}

} // namespace

Eigen::Matrix2d map_jacobian(const PhasePoint& x, const DimerParams& params,
                             const MfSettings& settings) {
    const double h = settings.jacobian_step;
    if (!(h > 0.0)) throw ValidationError("jacobian_step", "finite-difference step must be > 0");
    if (std::abs(x.p) + 2 * h > 1.0)
        throw ValidationError("p", "point too close to |p| = 1 for the difference stencil");
    // fourth-order stencil: near strong stretching the third derivatives of
    // the map reach ~1e7, which makes a second-order quotient truncation
    // bound useless at any step the integrator noise allows
    const auto column = [&](double dp, double dphi) {
        PhasePoint probe[4];
        const double off[4] = {-2.0, -1.0, 1.0, 2.0};
        for (int k = 0; k < 4; ++k)
            probe[k] = poincare_map({x.p + off[k] * h * dp, x.phi + off[k] * h * dphi}, params,
                                    settings);
        Eigen::Vector2d col;
        col[0] = (probe[0].p - 8.0 * probe[1].p + 8.0 * probe[2].p - probe[3].p) / (12.0 * h);
        const double base = probe[1].phi;
        col[1] = (angle_diff(probe[0].phi, base) - 8.0 * angle_diff(probe[1].phi, base) +
                  8.0 * angle_diff(probe[2].phi, base) - angle_diff(probe[3].phi, base)) /
                 (12.0 * h);
        return col;
    };
    Eigen::Matrix2d j;
    j.col(0) = column(1.0, 0.0);
    j.col(1) = column(0.0, 1.0);
    return j;
}

PeriodicOrbit find_periodic_orbit(const PhasePoint& guess, const DimerParams& params,
                                  const MfSettings& settings) {
    PhasePoint x = clamp_point(guess);
    double residual = std::numeric_limits<double>::infinity();
    int it = 0;
    for (; it < settings.newton_max_iter; ++it) {
        const PhasePoint fx = poincare_map(x, params, settings);
        const Eigen::Vector2d f(fx.p - x.p, angle_diff(fx.phi, x.phi));
        residual = f.cwiseAbs().maxCoeff();
        if (residual <= settings.newton_tol) break;

        const Eigen::Matrix2d a = map_jacobian(x, params, settings) - Eigen::Matrix2d::Identity();
        const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
        if (std::abs(det) < 1e-10) {
            char buf[96];
            std::snprintf(buf, sizeof buf, "|det(J - 1)| = %.3e: map tangent to identity", det);
            throw JacobianSingular(buf);
        }
        Eigen::Vector2d step = a.partialPivLu().solve(-f);
        // trust region: long steps mean the guess is outside the basin
        const double len = step.cwiseAbs().maxCoeff();
        if (len > 0.5) step *= 0.5 / len;
        x = clamp_point({x.p + step[0], x.phi + step[1]});
    }
    if (residual > settings.newton_tol) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "residual %.3e after %d iterations", residual, it);
        throw NoConvergence(buf);
    }

    PeriodicOrbit orbit;
    orbit.fixed_point = x;
    orbit.monodromy = map_jacobian(x, params, settings);
    orbit.residual = residual;
    orbit.newton_iterations = it;
    const double tr = orbit.monodromy.trace();
    const double det = orbit.monodromy.determinant();
    const double disc = tr * tr - 4.0 * det;
    if (disc < 0.0) {
        const double im = std::sqrt(-disc) / 2.0;
        orbit.multipliers[0] = {tr / 2.0, im};
        orbit.multipliers[1] = {tr / 2.0, -im};
    } else {
        const double rt = std::sqrt(disc) / 2.0;
        orbit.multipliers[0] = {tr / 2.0 + rt, 0.0};
        orbit.multipliers[1] = {tr / 2.0 - rt, 0.0};
    }
    orbit.stability = std::abs(tr) < 2.0   ? Stability::Elliptic
                      : std::abs(tr) > 2.0 ? Stability::Hyperbolic
                                           : Stability::Parabolic;
    return orbit;
}

InvariantCurve trace_invariant_curve(const PhasePoint& seed, const PhasePoint& center,
                                     int n_strobes, const DimerParams& params,
                                     const MfSettings& settings, const CurveGate& gate) {
    if (n_strobes < 16)
        throw ValidationError("n_strobes", "need at least 16 strobes to resolve a curve");
    const auto orbit = strobe_orbit(seed, n_strobes, params, settings);
    const std::size_t n = orbit.size();

    std::vector<double> u, v;
    relative_coords(orbit, center, u, v);
    const Frame fr = aspect_frame(u, v);
    if (fr.su < 1e-12 || fr.sv < 1e-12)
        throw NotRegular("iterates collapse onto the center: no curve to trace");

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> theta(n);
    for (std::size_t i = 0; i < n; ++i) theta[i] = std::atan2(v[i] / fr.sv, u[i] / fr.su);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return theta[a] < theta[b]; });

    double max_gap = 2.0 * kPi - (theta[order[n - 1]] - theta[order[0]]);
    for (std::size_t i = 0; i + 1 < n; ++i)
        max_gap = std::max(max_gap, theta[order[i + 1]] - theta[order[i]]);

    // perimeter growth: the angular-sorted polyline through points ON a
    // curve keeps its length when more strobes arrive, while iterates that
    // fill an area make it grow like sqrt(count)
    const auto dist = [&](int a, int b) {
        return std::hypot((u[a] - u[b]) / fr.su, (v[a] - v[b]) / fr.sv);
    };
    const auto perimeter = [&](std::size_t count) {
        std::vector<int> idx(count);
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(),
                         [&](int a, int b) { return theta[a] < theta[b]; });
        double len = 0.0;
        for (std::size_t i = 0; i < count; ++i) len += dist(idx[i], idx[(i + 1) % count]);
        return len;
    };
    const double score = perimeter(n) / std::max(perimeter(n / 2), 1e-300);

    if (max_gap > gate.gap_tol) {
        char buf[112];
        std::snprintf(buf, sizeof buf,
                      "angular gap %.3f rad exceeds %.3f: resonance chain or escaping orbit",
                      max_gap, gate.gap_tol);
        throw NotRegular(buf);
    }
    if (score > gate.spacing_tol) {
        char buf[112];
        std::snprintf(buf, sizeof buf,
                      "perimeter growth %.2f exceeds %.2f: iterates fill an area", score,
                      gate.spacing_tol);
        throw NotRegular(buf);
    }

    // shoelace area of the closed polyline in center-relative coordinates;
    // the constant offsets drop out of the loop integral of p dphi
    double twice_area = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const int a = order[i], b = order[(i + 1) % n];
        twice_area += u[a] * v[b] - u[b] * v[a];
    }

    InvariantCurve curve;
    curve.points.reserve(n);
    for (std::size_t i = 0; i < n; ++i) curve.points.push_back(orbit[order[i]]);
    curve.center = center;
    curve.seed = orbit.front();
    curve.action = std::abs(twice_area) / (4.0 * kPi);
    curve.max_angular_gap = max_gap;
    curve.spacing_score = score;
    return curve;
}

double ActionChart::action_at(const PhasePoint& x) const {
    const double u = angle_diff(x.phi, center.phi) / scale_phi;
    const double v = (x.p - center.p) / scale_p;
    const double rho = std::hypot(u, v);
    if (rho == 0.0) return 0.0;
    const double th = std::atan2(v, u);

    const int m = static_cast<int>(theta.size());
    const double dth = 2.0 * kPi / m;
    const int j0 = std::min(m - 1, static_cast<int>(std::floor((th + kPi) / dth)));
    const double frac = (th - theta[j0]) / dth;
    auto profile = [&](const Eigen::VectorXd& r) {
        return r[j0] + (r[(j0 + 1) % m] - r[j0]) * frac;
    };

    double r_in = 0.0, a_in = 0.0;
    for (std::size_t c = 0; c < radii.size(); ++c) {
        const double rc = profile(radii[c]);
        if (rho <= rc) {
            if (c == 0)  // enclosed area scales quadratically toward the center
                return actions[0] * (rho / rc) * (rho / rc);
            return a_in + (actions[c] - a_in) * (rho - r_in) / (rc - r_in);
        }
        r_in = rc;
        a_in = actions[c];
    }
    return std::numeric_limits<double>::quiet_NaN();
}

ActionChart build_action_chart(const PeriodicOrbit& island, double r_min, double r_max,
                               int curves, int n_strobes, const DimerParams& params,
                               const MfSettings& settings, const CurveGate& gate) {
    if (!(r_min > 0.0) || !(r_max > r_min))
        throw ValidationError("radius", "need 0 < r_min < r_max");
    if (curves < 2) throw ValidationError("curves", "a family needs at least two members");
    const PhasePoint c = island.fixed_point;

    std::vector<InvariantCurve> family;
    std::vector<double> seed_radii;
    const double ratio = std::pow(r_max / r_min, 1.0 / (curves - 1));
    double r = r_min;
    for (int j = 0; j < curves; ++j, r *= ratio) {
        InvariantCurve cv;
        try {
            cv = trace_invariant_curve({c.p + r, c.phi}, c, n_strobes, params, settings, gate);
        } catch (const NotRegular&) {
            continue;
        }
        if (!family.empty() && cv.action <= family.back().action) continue;  // keep monotone
        family.push_back(std::move(cv));
        seed_radii.push_back(r);
    }
    if (family.size() < 2)
        throw NoCurve("fewer than two nested curves survive in the requested radius range");

    ActionChart chart;
    chart.center = c;
    {
        std::vector<double> u, v;
        relative_coords(family.back().points, c, u, v);
        const Frame fr = aspect_frame(u, v);
        chart.scale_phi = fr.su;
        chart.scale_p = fr.sv;
    }
    const int m = 256;
    chart.theta.resize(m);
    for (int j = 0; j < m; ++j) chart.theta[j] = -kPi + j * 2.0 * kPi / m;

    for (const auto& cv : family) {
        std::vector<double> u, v;
        relative_coords(cv.points, c, u, v);
        const std::size_t n = u.size();
        std::vector<std::pair<double, double>> polar(n);  // (angle, radius) in chart frame
        for (std::size_t i = 0; i < n; ++i) {
            const double uu = u[i] / chart.scale_phi, vv = v[i] / chart.scale_p;
            polar[i] = {std::atan2(vv, uu), std::hypot(uu, vv)};
        }
        std::sort(polar.begin(), polar.end());
        Eigen::VectorXd prof(m);
        std::size_t k = 0;
        for (int j = 0; j < m; ++j) {
            const double th = chart.theta[j];
            while (k < n && polar[k].first < th) ++k;
            // cyclic linear interpolation between the bracketing points
            const auto& hi = polar[k % n];
            const auto& lo = polar[(k + n - 1) % n];
            double span = hi.first - lo.first;
            double off = th - lo.first;
            if (span <= 0) span += 2.0 * kPi;
            if (off < 0) off += 2.0 * kPi;
            prof[j] = lo.second + (hi.second - lo.second) * (span > 0 ? off / span : 0.0);
        }
        chart.radii.push_back(std::move(prof));
        chart.actions.push_back(cv.action);
    }
    chart.seed_radii = std::move(seed_radii);
    return chart;
}

std::vector<EBKResult> ebk_quantize(const PeriodicOrbit& island, int n_particles, int k_max,
                                    int n_strobes, const DimerParams& params,
                                    const MfSettings& settings, const CurveGate& gate) {
    if (n_particles < 1) throw ValidationError("n", "particle number must be at least 1");
    if (k_max < 0) throw ValidationError("kmax", "k_max must be >= 0");
    const double heff = 2.0 / n_particles;
    const PhasePoint c = island.fixed_point;

    auto eval = [&](double r) -> std::optional<InvariantCurve> {
        try {
            return trace_invariant_curve({c.p + r, c.phi}, c, n_strobes, params, settings, gate);
        } catch (const NotRegular&) {
            return std::nullopt;
        }
    };

    std::vector<EBKResult> results;
    double r_lo = 0.0;      // largest radius known to sit below the current target
    double r_probe = 1e-2;  // next expansion radius
    bool boundary = false;
    for (int k = 0; k <= k_max && !boundary; ++k) {
        EBKResult res;
        res.k = k;
        res.target_action = heff * (k + 0.5);

        // expand outward until a curve beyond the target brackets it
        std::optional<InvariantCurve> hi_curve;
        double r_hi = 0.0;
        int failures = 0;
        while (!hi_curve) {
            const double r_try = std::max(r_probe, r_lo * 1.05 + 1e-6);
            if (auto cv = eval(r_try)) {
                failures = 0;
                if (cv->action >= res.target_action) {
                    r_hi = r_try;
                    hi_curve = std::move(cv);
                } else {
                    r_lo = r_try;
                    r_probe = r_try * 1.5;
                }
            } else {
                r_probe = r_try * 1.15;
                if (++failures >= 8) break;  // persistent failure: past the island edge
            }
        }
        if (!hi_curve) {
            boundary = true;
            res.note = "island boundary reached before the target action";
            results.push_back(std::move(res));
            break;
        }

        // bisect the bracket on the (checked) monotone action profile
        const double tol = std::max(1e-9, 2e-4 * res.target_action);
        double lo = r_lo, hi = r_hi;
        InvariantCurve best = std::move(*hi_curve);
        int stuck = 0;
        while (std::abs(best.action - res.target_action) > tol && hi - lo > 1e-13) {
            double mid = 0.5 * (lo + hi);
            auto cv = eval(mid);
            for (int t = 0; !cv && t < 3; ++t) {  // sidestep thin resonance bands
                mid = lo + (hi - lo) * (0.38 + 0.17 * t);
                cv = eval(mid);
            }
            if (!cv) {
                ++stuck;
                if (stuck >= 2) break;
                lo = std::nextafter(lo, hi);
                continue;
            }
            stuck = 0;
            if (cv->action >= res.target_action) {
                hi = mid;
                best = std::move(*cv);
            } else {
                lo = mid;
            }
        }

        res.achieved_action = best.action;
        res.residual = std::abs(best.action - res.target_action);
        if (res.residual <= tol) {
            res.found = true;
            res.curve = std::move(best);
            r_lo = std::max(r_lo, lo);
            r_probe = hi;
        } else {
            res.note = "no traceable curve carries the quantized action (resonance gap)";
        }
        results.push_back(std::move(res));
    }
    return results;
}

} // namespace dimer
