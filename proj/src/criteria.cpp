#include "dimer/criteria.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include "dimer/artifacts.hpp"
#include "dimer/coherence.hpp"
#include "dimer/config.hpp"
#include "dimer/floquet.hpp"
#include "dimer/meanfield.hpp"
#include "dimer/orbits.hpp"
#include "dimer/propagator.hpp"

namespace dimer {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// pinned acceptance tolerances
constexpr double kFactorizationTol = 1e-8;       // eigenphase multiset deviation
constexpr double kUnitarityTol = 1e-9;           // one-cycle defect at n = 1000
constexpr double kResidualScale = 1e-8;          // residual bound per sqrt(dim)
constexpr double kEtaExtremeTol = 1e-12;         // simplicity extremes
constexpr double kEtaTailMin = 0.95;             // coherent-tail maximum at n = 1000
constexpr double kNormDriftTol = 1e-10;          // amplitude norm over 1e3 periods
constexpr double kEnergyDriftTol = 1e-9;         // undriven energy over 1e3 periods
constexpr double kChartGapTol = 1e-8;            // chart agreement over 1e2 periods
constexpr double kSymplecticTol = 1e-6;          // |det(J) - 1| of the strobe map
constexpr double kActionMatchRel = 0.15;         // semiclassical ladder, relative
constexpr double kHusimiNormTol = 1e-3;          // grid normalization defect
constexpr double kLongEtaTol = 0.01;             // ordered-curve values at n = 10000
constexpr double kLongEtaPairTol = 0.005;        // the near-degenerate pair
constexpr double kLongEtaMinFactor = 3.0;        // eta minimum, multiplicative band

DimerParams reference_params(int n) {
    DimerParams p;
    p.n_particles = n;
    p.alpha = 1.30;
    p.drive_amplitude = 0.41;
    p.drive_frequency = 1.40;
    return p;
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, a, b, c);
    return buf;
}

/** Lazily built n = 1000 spectral stack shared by several properties. */
struct Context {
    AcceptanceOptions opts;
    bool tried = false;
    std::optional<FloquetSpectrum> spectrum;
    double unitarity = 0.0;
    Eigen::VectorXd eta_raw;
    std::string error;

    const FloquetSpectrum* acquire() {
        if (!tried) {
            tried = true;
            try {
                auto params = reference_params(1000);
                IntegratorSettings settings;
                settings.threads = opts.threads;
                auto op = one_cycle_operator(params, settings);
                unitarity = op.report.unitarity_defect;
                spectrum = diagonalize(op);
                eta_raw = eta_spectrum(*spectrum);
                order_by_simplicity(*spectrum, eta_raw);
            } catch (const std::exception& e) {
                spectrum.reset();
                error = e.what();
            }
        }
        return spectrum ? &*spectrum : nullptr;
    }
};

double circular_distance(double a, double b) {
    const double d = std::abs(a - b);
    return std::min(d, kTwoPi - d);
}

/** Best max-deviation over cyclic alignments of two sorted phase multisets;
 *  the optimal bijection between circular sorted sequences is a shift. */
double multiset_deviation(std::vector<double> predicted, const Eigen::VectorXd& computed) {
    const std::size_t n = predicted.size();
    if (static_cast<Eigen::Index>(n) != computed.size())
        return std::numeric_limits<double>::infinity();
    for (auto& v : predicted) {
        v = std::fmod(v, kTwoPi);
        if (v < 0.0) v += kTwoPi;
    }
    std::sort(predicted.begin(), predicted.end());
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t shift = 0; shift < n; ++shift) {
        double worst = 0.0;
        for (std::size_t k = 0; k < n && worst < best; ++k)
            worst = std::max(worst,
                             circular_distance(predicted[(k + shift) % n], computed[k]));
        best = std::min(best, worst);
    }
    return best;
}

using Outcome = std::pair<bool, std::string>;

// 1. With the interaction off, the many-body spectrum factorizes into the
//    single-particle eigenphase pair.
Outcome factorization(Context& ctx) {
    DimerParams single = reference_params(1);
    single.alpha = 0.0;
    IntegratorSettings settings;
    settings.threads = ctx.opts.threads;
    const auto one = diagonalize(one_cycle_operator(single, settings));
    const double gamma0 = one.eigenphases[0];
    const double gamma1 = one.eigenphases[1];

    double worst = 0.0;
    for (const int n : {2, 5, 10, 25, 50}) {
        DimerParams many = reference_params(n);
        many.alpha = 0.0;
        const auto full = diagonalize(one_cycle_operator(many, settings));
        std::vector<double> predicted(static_cast<std::size_t>(n) + 1);
        for (int k = 0; k <= n; ++k)
            predicted[static_cast<std::size_t>(k)] = (n - k) * gamma0 + k * gamma1;
        worst = std::max(worst, multiset_deviation(predicted, full.eigenphases));
    }
    return {worst <= kFactorizationTol,
            fmt("eigenphase multiset deviation %.3g (bound %.3g)", worst, kFactorizationTol)};
}

// 2. The n = 1000 one-cycle operator is unitary and its eigenpairs are tight.
Outcome unitarity_and_residuals(Context& ctx) {
    const auto* spec = ctx.acquire();
    if (!spec) return {false, "spectrum unavailable: " + ctx.error};
    const double residual_bound = kResidualScale * std::sqrt(1001.0);
    const bool ok = ctx.unitarity <= kUnitarityTol && spec->max_residual <= residual_bound;
    return {ok, fmt("unitarity defect %.3g (bound %.3g), max residual %.3g", ctx.unitarity,
                    kUnitarityTol, spec->max_residual) +
                    fmt(" (bound %.3g)", residual_bound)};
}

// 3. The simplicity measure hits its closed-form extremes on Fock states.
Outcome simplicity_extremes(Context&) {
    double worst = 0.0;
    const auto check = [&](int n, int m, double want) {
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n + 1);
        v[m] = 1.0;
        worst = std::max(worst, std::abs(degree_of_simplicity(reduced_density(v)) - want));
    };
    check(50, 50, 1.0);  // all on site 1
    check(50, 0, 1.0);   // all on site 2
    check(50, 25, 0.0);  // balanced
    check(2, 1, 0.0);
    check(7, 7, 1.0);
    return {worst <= kEtaExtremeTol,
            fmt("worst extreme deviation %.3g (bound %.3g)", worst, kEtaExtremeTol)};
}

// 4. The eta-ordered curve at n = 1000 carries the coherent tail and its
//    kink; optionally the n = 10000 regression against published values.
Outcome simplicity_curve(Context& ctx) {
    const auto* spec = ctx.acquire();
    if (!spec) return {false, "spectrum unavailable: " + ctx.error};
    const int n = 1000;
    const int dim = n + 1;
    Eigen::VectorXd curve(dim);
    for (int label = 0; label < dim; ++label)
        curve[label] = ctx.eta_raw[spec->eta_order[static_cast<std::size_t>(label)]];

    const double max_eta = curve[dim - 1];

    // centered moving average, then the discrete second difference; the
    // kink is its maximum, expected a little below the tail
    const int half = n / 200;  // window 2*half + 1 = 11
    Eigen::VectorXd smooth(dim);
    for (int i = 0; i < dim; ++i) {
        const int lo = std::max(0, i - half);
        const int hi = std::min(dim - 1, i + half);
        smooth[i] = curve.segment(lo, hi - lo + 1).mean();
    }
    int kink = 1;
    double best = -std::numeric_limits<double>::infinity();
    for (int i = half + 1; i < dim - half - 1; ++i) {
        const double d2 = smooth[i + 1] - 2.0 * smooth[i] + smooth[i - 1];
        if (d2 > best) {
            best = d2;
            kink = i;
        }
    }
    const double kink_at = static_cast<double>(kink) / n;
    bool ok = max_eta >= kEtaTailMin && kink_at >= 0.9 && kink_at <= 1.0;
    std::string detail = fmt("max eta %.4f (need >= %.2f), kink at n/N = %.3f (window [0.9, 1])",
                             max_eta, kEtaTailMin, kink_at);

    if (ctx.opts.long_run) {
        // production-scale regression; hours of compute
        auto params = reference_params(10000);
        IntegratorSettings settings;
        settings.threads = ctx.opts.threads;
        auto big = diagonalize(one_cycle_operator(params, settings));
        const Eigen::VectorXd eta_big = eta_spectrum(big);
        order_by_simplicity(big, eta_big);
        const auto at = [&](int label) {
            return eta_big[big.eta_order[static_cast<std::size_t>(label)]];
        };
        const struct { int label; double want; double tol; } anchors[] = {
            {9520, 0.274, kLongEtaTol},  {9700, 0.695, kLongEtaTol},
            {9900, 0.887, kLongEtaTol},  {10000, 0.996, kLongEtaTol},
            {9479, 0.0117, kLongEtaPairTol}, {9480, 0.0135, kLongEtaPairTol},
        };
        for (const auto& a : anchors) {
            const double got = at(a.label);
            ok = ok && std::abs(got - a.want) <= a.tol;
            detail += fmt("; eta[%g] = %.4f", static_cast<double>(a.label), got);
        }
        const double eta0 = at(0);
        ok = ok && eta0 >= 6.7e-7 / kLongEtaMinFactor && eta0 <= 6.7e-7 * kLongEtaMinFactor;
        detail += fmt("; eta[0] = %.3g (band 6.7e-7 x/ %g)", eta0, kLongEtaMinFactor);
    }
    return {ok, detail};
}

// 5. Mean-field conservation: norm, undriven energy, chart agreement.
Outcome meanfield_conservation(Context&) {
    const auto params = reference_params(1000);
    const MfSettings mf;

    const double period = params.period();
    MeanFieldAmplitudes c = amplitudes_from_point({0.0, -2.0});
    double norm_drift = 0.0;
    for (int k = 0; k < 1000; ++k) {
        c = propagate_amplitudes(c, 0.0, period, params, mf);
        const double norm = std::sqrt(std::norm(c.c1) + std::norm(c.c2));
        norm_drift = std::max(norm_drift, std::abs(norm - 1.0));
    }

    DimerParams quiet = params;
    quiet.drive_amplitude = 0.0;
    PhasePoint x{0.2, 1.0};
    const double e0 = mf_energy(x, quiet, 0.0);
    double energy_drift = 0.0;
    for (int k = 0; k < 1000; ++k) {
        x = poincare_map(x, quiet, mf);
        energy_drift = std::max(energy_drift, std::abs(mf_energy(x, quiet, 0.0) - e0));
    }

    PhasePoint pend{0.0, -2.0};
    MeanFieldAmplitudes amp = amplitudes_from_point(pend);
    double chart_gap = 0.0;
    for (int k = 0; k < 100; ++k) {
        pend = poincare_map(pend, params, mf);
        amp = propagate_amplitudes(amp, 0.0, period, params, mf);
        const PhasePoint from_amp = point_from_amplitudes(amp);
        const double dphi = std::abs(std::remainder(from_amp.phi - pend.phi, kTwoPi));
        chart_gap = std::max({chart_gap, std::abs(from_amp.p - pend.p), dphi});
    }

    const bool ok = norm_drift <= kNormDriftTol && energy_drift <= kEnergyDriftTol &&
                    chart_gap <= kChartGapTol;
    return {ok, fmt("norm drift %.3g (bound %.3g), ", norm_drift, kNormDriftTol) +
                    fmt("energy drift %.3g (bound %.3g), ", energy_drift, kEnergyDriftTol) +
                    fmt("chart gap %.3g (bound %.3g)", chart_gap, kChartGapTol)};
}

// 6. The stroboscopic map is symplectic: unit Jacobian determinant.
Outcome symplecticity(Context&) {
    const auto params = reference_params(1000);
    const MfSettings mf;
    std::mt19937_64 rng(20260818);
    std::uniform_real_distribution<double> pd(-0.9, 0.9);
    std::uniform_real_distribution<double> fd(-kPi, kPi);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const PhasePoint x{pd(rng), fd(rng)};
        worst = std::max(worst, std::abs(map_jacobian(x, params, mf).determinant() - 1.0));
    }
    return {worst <= kSymplecticTol,
            fmt("worst |det - 1| %.3g over 100 points (bound %.3g)", worst, kSymplecticTol)};
}

// 7. The island centers: a stable fixed point, and a second one at the
//    cylinder seam.
Outcome fixed_points(Context&) {
    const auto params = reference_params(1000);
    const auto main_island = find_periodic_orbit({0.0, -2.2}, params);
    const auto seam_island = find_periodic_orbit({0.83, -3.09}, params);
    const double main_trace = main_island.monodromy.trace();
    const double seam_dist = kPi - std::abs(seam_island.fixed_point.phi);
    const bool ok = main_island.stability == Stability::Elliptic && std::abs(main_trace) < 2.0 &&
                    seam_island.stability == Stability::Elliptic && std::abs(seam_dist) < 0.2;
    return {ok, fmt("main island trace %.4f at phi = %.4f, ", main_trace,
                    main_island.fixed_point.phi) +
                    fmt("seam island %.3f rad from phi = +-pi", seam_dist)};
}

// 8. The most coherent Floquet states sit on the quantized tubes: their
//    Husimi-weighted mean action matches heff*(k + 1/2).
Outcome action_correspondence(Context& ctx) {
    const auto* spec = ctx.acquire();
    if (!spec) return {false, "spectrum unavailable: " + ctx.error};
    const auto params = reference_params(1000);
    const MfSettings mf;

    const auto island = find_periodic_orbit({0.0, -2.2}, params, mf);
    const auto chart = build_action_chart(island, 0.02, 0.26, 12, 800, params, mf);
    const double heff = 2.0 / 1000.0;

    bool ok = true;
    std::string detail;
    double worst_shifted = 0.0;
    for (int k = 0; k <= 2; ++k) {
        const int label = 1000 - k;
        const int raw = spec->eta_order[static_cast<std::size_t>(label)];
        const auto grid =
            husimi(spec->eigenvectors.col(raw), 400, 400, ctx.opts.threads, label);
        double weight = 0.0, weighted = 0.0;
        for (Eigen::Index i = 0; i < grid.p_axis.size(); ++i)
            for (Eigen::Index j = 0; j < grid.phi_axis.size(); ++j) {
                const double action = chart.action_at({grid.p_axis[i], grid.phi_axis[j]});
                if (!std::isfinite(action)) continue;
                weight += grid.values(i, j);
                weighted += grid.values(i, j) * action;
            }
        const double target = heff * (k + 0.5);
        const double mean = weight > 0.0 ? weighted / weight : std::nan("");
        const double rel = std::abs(mean - target) / target;
        ok = ok && std::isfinite(mean) && rel <= kActionMatchRel;
        // the Husimi measure is anti-normally ordered, so its action mean
        // carries an extra half quantum: heff*(k + 1) is where the same
        // data lands once that broadening is accounted for
        worst_shifted = std::max(worst_shifted,
                                 std::abs(mean - heff * (k + 1.0)) / (heff * (k + 1.0)));
        if (k) detail += ", ";
        detail += fmt("k=%.0f: mean %.3g vs %.3g", static_cast<double>(k), mean, target) +
                  fmt(" (%.1f%%)", 100.0 * rel);
    }
    detail += fmt("; bound %.0f%%", 100.0 * kActionMatchRel);
    detail += fmt("; the offset is the anti-normal half quantum: vs heff*(k+1) "
                  "all three match within %.1f%%",
                  100.0 * worst_shifted);
    return {ok, detail};
}

// 9. Husimi grids integrate to one.
Outcome husimi_normalization(Context& ctx) {
    const auto* spec = ctx.acquire();
    if (!spec) return {false, "spectrum unavailable: " + ctx.error};
    std::mt19937_64 rng(424242);
    std::uniform_int_distribution<int> pick(0, 1000);
    double worst = 0.0;
    for (int s = 0; s < 5; ++s) {
        const int raw = pick(rng);
        const auto grid = husimi(spec->eigenvectors.col(raw), 400, 400, ctx.opts.threads, -1);
        worst = std::max(worst, std::abs(grid.normalization() - 1.0));
    }
    return {worst <= kHusimiNormTol,
            fmt("worst |normalization - 1| %.3g over five states (bound %.3g)", worst,
                kHusimiNormTol)};
}

// 10. Universality: the mean-field flow knows only alpha, so runs at
//     different n with the same n*kappa emit byte-identical section files.
Outcome universality(Context& ctx) {
    namespace fs = std::filesystem;
    const fs::path dir = ctx.opts.scratch_dir.empty()
                             ? fs::temp_directory_path() / "dimer-universality"
                             : fs::path(ctx.opts.scratch_dir);
    const auto make_config = [](int n, const char* kappa) {
        return parse_config("[system]\nn = " + std::to_string(n) +
                            "\nkappa_over_omega0 = " + kappa +
                            "\nmu_over_omega0 = 0.41\nomega_over_omega0 = 1.40\n");
    };
    const RunConfig a = make_config(100, "0.013");
    const RunConfig b = make_config(1000, "0.0013");

    const std::vector<PhasePoint> seeds = {{0.0, -2.2}, {0.12, -2.2}, {0.26, -2.2},
                                           {-0.2, -2.0}, {0.45, 2.2},  {0.7, 0.5},
                                           {-0.6, 1.4},  {0.9, 0.0}};
    const auto file_a = (dir / "section_a.csv").string();
    const auto file_b = (dir / "section_b.csv").string();
    write_section_csv(file_a, build_section(seeds, 200, a.params, a.meanfield), a);
    write_section_csv(file_b, build_section(seeds, 200, b.params, b.meanfield), b);

    const auto slurp = [](const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    };
    const std::string bytes_a = slurp(file_a);
    const std::string bytes_b = slurp(file_b);
    const bool ok = !bytes_a.empty() && bytes_a == bytes_b;
    return {ok, fmt("section files %.0f bytes each, ", static_cast<double>(bytes_a.size())) +
                    (ok ? "byte-identical" : "DIFFER")};
}

} // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options) {
    Context ctx;
    ctx.opts = options;

    struct Entry {
        int id;
        const char* name;
        Outcome (*run)(Context&);
    };
    const Entry entries[] = {
        {1, "interaction-free spectra factorize", factorization},
        {2, "one-cycle unitarity and eigen-residuals", unitarity_and_residuals},
        {3, "simplicity-measure extremes", simplicity_extremes},
        {4, "simplicity curve: coherent tail and kink", simplicity_curve},
        {5, "mean-field conservation laws", meanfield_conservation},
        {6, "stroboscopic map is symplectic", symplecticity},
        {7, "island fixed points are elliptic", fixed_points},
        {8, "Husimi-weighted actions sit on the semiclassical ladder", action_correspondence},
        {9, "Husimi grids are normalized", husimi_normalization},
        {10, "mean-field universality in alpha", universality},
    };

    std::vector<CriterionResult> results;
    for (const auto& entry : entries) {
        CriterionResult r;
        r.id = entry.id;
        r.name = entry.name;
        const auto start = std::chrono::steady_clock::now();
        try {
            auto [passed, detail] = entry.run(ctx);
            r.passed = passed;
            r.detail = std::move(detail);
        } catch (const std::exception& e) {
            r.passed = false;
            r.detail = std::string("exception: ") + e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        results.push_back(std::move(r));
    }
    return results;
}

int print_acceptance(const std::vector<CriterionResult>& results, std::ostream& out) {
    int failed = 0;
    for (const auto& r : results) {
        failed += r.passed ? 0 : 1;
        char head[64];
        std::snprintf(head, sizeof head, "%s %2d. ", r.passed ? "PASS" : "FAIL", r.id);
        out << head << r.name << ": " << r.detail << "  [" << fmt("%.1f", r.seconds) << " s]\n";
    }
    out << results.size() - failed << "/" << results.size() << " acceptance properties passed\n";
    return failed;
}

} // namespace dimer
