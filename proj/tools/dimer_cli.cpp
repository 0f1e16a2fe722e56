#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dimer/artifacts.hpp"
#include "dimer/cache.hpp"
#include "dimer/coherence.hpp"
#include "dimer/config.hpp"
#include "dimer/criteria.hpp"
#include "dimer/floquet.hpp"
#include "dimer/meanfield.hpp"
#include "dimer/orbits.hpp"
#include "dimer/propagator.hpp"

namespace {

using namespace dimer;

/** Module errors leave as machine-readable JSON on stderr + exit 1. */
[[noreturn]] void fail(const std::string& type, const std::string& message) {
    nlohmann::json err{{"error", {{"type", type}, {"message", message}}}};
    std::cerr << err.dump() << "\n";
    std::exit(1);
}

std::vector<PhasePoint> read_seeds(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("validation", "cannot read seeds file '" + path + "'");
    std::vector<PhasePoint> seeds;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        for (auto& ch : line)
            if (ch == ',') ch = ' ';
        std::istringstream row(line);
        std::string first;
        if (!(row >> first) || first[0] == '#') continue;
        PhasePoint x;
        try {
            x.p = std::stod(first);
        } catch (const std::exception&) {
            fail("parse", path + ":" + std::to_string(line_no) + ": not a number");
        }
        if (!(row >> x.phi))
            fail("parse", path + ":" + std::to_string(line_no) + ": expected 'p phi'");
        seeds.push_back(x);
    }
    if (seeds.empty()) fail("validation", "seeds file '" + path + "' holds no points");
    return seeds;
}

/** Portrait seeds when none are given: island rings, the seam island,
 *  rotor bands, and the chaotic sea. */
std::vector<PhasePoint> default_seeds() {
    return {{0.05, -2.18}, {0.12, -2.18}, {0.19, -2.18}, {0.26, -2.18},
            {0.83, -3.09}, {0.45, 2.2},   {-0.45, -2.2}, {0.6, 0.0},
            {-0.6, 0.0},   {0.9, 0.0},    {-0.9, 0.0},   {0.97, 0.0}};
}

struct CacheFlow {
    bool read = false, write = false, hit = false;
    SpectrumCachePaths paths;
};

/** Spectrum with the configured cache policy applied. */
FloquetSpectrum obtain_spectrum(const RunConfig& cfg, CacheFlow& flow) {
    flow.read = cfg.cache == CachePolicy::ReadWrite || cfg.cache == CachePolicy::ReadOnly;
    flow.write = cfg.cache == CachePolicy::ReadWrite || cfg.cache == CachePolicy::WriteOnly;
    if (flow.read || flow.write)
        flow.paths = spectrum_cache_paths(cfg.resolved_cache_dir(), cfg);
    if (flow.read) {
        if (auto cached = load_spectrum(flow.paths, cfg)) {
            flow.hit = true;
            return std::move(*cached);
        }
    }
    auto spectrum = diagonalize(one_cycle_operator(cfg.params, cfg.quantum));
    if (flow.write) store_spectrum(flow.paths, cfg, spectrum);
    return spectrum;
}

std::string output_path(const RunConfig& cfg, const std::string& name) {
    return (std::filesystem::path(cfg.output_dir) / name).string();
}

int run(int argc, char** argv) {
    CLI::App app{"Floquet states, coherence diagnostics and mean-field phase-space "
                 "portraits of the periodically driven two-site Bose-Hubbard system"};
    app.require_subcommand(1);

    std::string config_path, cache_dir, seeds_path, state_spec = "top", grid_spec;
    int iterations = 0, kmax = 3, threads = -1;
    bool no_cache = false, long_run = false;

    app.add_option("--config", config_path, "run configuration file");
    app.add_option("--cache-dir", cache_dir, "override the spectrum cache directory");
    app.add_flag("--no-cache", no_cache, "bypass the spectrum cache entirely");
    app.add_option("--threads", threads, "worker threads (0 = hardware concurrency)");

    auto* poincare = app.add_subcommand("poincare", "stroboscopic section -> CSV");
    poincare->add_option("--seeds", seeds_path, "seed file, one 'p phi' per line");
    poincare->add_option("--iterations", iterations, "periods per seed (default 400)");

    auto* floquet = app.add_subcommand("floquet", "spectrum -> cache + CSV");

    auto* eta = app.add_subcommand("eta", "simplicity table in eta order -> CSV");

    auto* husimi_cmd = app.add_subcommand("husimi", "phase-space density -> binary + sidecar");
    husimi_cmd->add_option("--state", state_spec, "raw index, 'top' or 'bottom' (default top)");
    husimi_cmd->add_option("--grid", grid_spec, "cells as PxQ (default from config)");

    auto* orbit = app.add_subcommand("orbit", "periodic orbits from seed guesses -> JSON");
    orbit->add_option("--seeds", seeds_path, "guess file, one 'p phi' per line");

    auto* ebk = app.add_subcommand("ebk", "semiclassical action ladder -> JSON + curve CSVs");
    ebk->add_option("--kmax", kmax, "highest rung (default 3)");
    ebk->add_option("--iterations", iterations, "strobes per curve (default 1200)");

    auto* verify = app.add_subcommand("verify", "run the acceptance properties");
    verify->add_flag("--long", long_run, "include the production-scale regression (hours)");

    CLI11_PARSE(app, argc, argv);

    if (verify->parsed()) {
        AcceptanceOptions opts;
        opts.long_run = long_run;
        opts.threads = threads < 0 ? 0 : threads;
        const auto results = run_acceptance(opts);
        return print_acceptance(results, std::cout) == 0 ? 0 : 1;
    }

    if (config_path.empty()) fail("validation", "--config is required for this subcommand");
    if (iterations < 0) fail("validation", "--iterations must be positive (0 = default)");
    if (kmax < 0) fail("validation", "--kmax must be >= 0");
    RunConfig cfg = load_config(config_path);
    for (const auto& notice : cfg.notices) std::cerr << "notice: " << notice << "\n";
    if (!cache_dir.empty()) cfg.cache_dir = cache_dir;
    if (no_cache) cfg.cache = CachePolicy::Off;
    if (threads >= 0) cfg.quantum.threads = threads;

    if (poincare->parsed()) {
        const auto seeds = seeds_path.empty() ? default_seeds() : read_seeds(seeds_path);
        const int count = iterations > 0 ? iterations : 400;
        const auto section = build_section(seeds, count, cfg.params, cfg.meanfield);
        const auto path = output_path(cfg, "poincare_section.csv");
        write_section_csv(path, section, cfg);
        std::cout << "wrote " << path << " (" << seeds.size() << " seeds x " << count
                  << " periods)\n";
        return 0;
    }

    if (floquet->parsed() || eta->parsed() || husimi_cmd->parsed()) {
        CacheFlow flow;
        FloquetSpectrum spectrum = obtain_spectrum(cfg, flow);
        const char* origin = flow.hit ? "cache" : (flow.write ? "computed, cached" : "computed");

        if (floquet->parsed()) {
            const auto path = output_path(cfg, "floquet_spectrum.csv");
            write_spectrum_csv(path, spectrum, cfg);
            std::cout << "wrote " << path << " (dim " << spectrum.eigenphases.size()
                      << ", max residual " << format_round_trip(spectrum.max_residual) << ", "
                      << origin << ")\n";
            return 0;
        }

        const Eigen::VectorXd eta_raw = eta_spectrum(spectrum);
        order_by_simplicity(spectrum, eta_raw);

        if (eta->parsed()) {
            const auto path = output_path(cfg, "eta.csv");
            write_eta_csv(path, spectrum, eta_raw, cfg);
            std::cout << "wrote " << path << " (max eta "
                      << format_round_trip(eta_raw[spectrum.eta_order.back()]) << ", " << origin
                      << ")\n";
            return 0;
        }

        // husimi
        const int dim = static_cast<int>(spectrum.eigenphases.size());
        int raw = -1;
        if (state_spec == "top") raw = spectrum.eta_order.back();
        else if (state_spec == "bottom") raw = spectrum.eta_order.front();
        else {
            try {
                raw = std::stoi(state_spec);
            } catch (const std::exception&) {
                fail("validation", "--state must be a raw index, 'top' or 'bottom'");
            }
            if (raw < 0 || raw >= dim)
                fail("validation", "--state index out of range [0, " + std::to_string(dim - 1) + "]");
        }
        int label = -1;
        for (int l = 0; l < dim; ++l)
            if (spectrum.eta_order[static_cast<std::size_t>(l)] == raw) label = l;

        int cells_p = cfg.grid_p, cells_phi = cfg.grid_phi;
        if (!grid_spec.empty() &&
            (std::sscanf(grid_spec.c_str(), "%dx%d", &cells_p, &cells_phi) != 2 ||
             cells_p < 2 || cells_phi < 2))
            fail("validation", "--grid must look like 400x400");

        const auto grid =
            husimi(spectrum.eigenvectors.col(raw), cells_p, cells_phi, cfg.quantum.threads, label);
        const auto stem = output_path(cfg, "husimi_state" + std::to_string(raw));
        const auto [body, sidecar] = write_husimi(stem, grid, cfg);
        std::cout << "wrote " << body << " + " << sidecar << " (raw index " << raw
                  << ", eta label " << label << ", normalization "
                  << format_round_trip(grid.normalization()) << ")\n";
        return 0;
    }

    if (orbit->parsed()) {
        const auto guesses =
            seeds_path.empty() ? std::vector<PhasePoint>{{0.0, -2.2}, {0.83, -3.09}}
                               : read_seeds(seeds_path);
        std::vector<PeriodicOrbit> orbits;
        std::vector<std::string> failures;
        for (const auto& guess : guesses) {
            try {
                orbits.push_back(find_periodic_orbit(guess, cfg.params, cfg.meanfield));
            } catch (const std::exception& e) {
                failures.push_back(e.what());
            }
        }
        if (orbits.empty())
            fail("no_convergence", "no seed converged: " + (failures.empty() ? "" : failures[0]));
        const auto path = output_path(cfg, "orbits.json");
        write_orbit_json(path, orbits, cfg);
        std::cout << "wrote " << path << " (" << orbits.size() << "/" << guesses.size()
                  << " seeds converged)\n";
        for (const auto& f : failures) std::cerr << "notice: seed failed: " << f << "\n";
        return 0;
    }

    // ebk
    const PhasePoint guess = seeds_path.empty() ? PhasePoint{0.0, -2.2} : read_seeds(seeds_path)[0];
    const auto island = find_periodic_orbit(guess, cfg.params, cfg.meanfield);
    const int strobes = iterations > 0 ? iterations : 1200;
    if (kmax < 0) fail("validation", "--kmax must be >= 0");
    const auto ladder = ebk_quantize(island, cfg.params.n_particles, kmax, strobes, cfg.params,
                                     cfg.meanfield);
    std::vector<std::string> curve_files(ladder.size());
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        if (!ladder[i].found) continue;
        const auto name = "ebk_curve_k" + std::to_string(ladder[i].k) + ".csv";
        write_curve_csv(output_path(cfg, name), ladder[i].curve, cfg);
        curve_files[i] = name;
    }
    const auto path = output_path(cfg, "ebk.json");
    write_ebk_json(path, ladder, curve_files, cfg.params.n_particles, cfg);
    int found = 0;
    for (const auto& rung : ladder) found += rung.found ? 1 : 0;
    std::cout << "wrote " << path << " (" << found << "/" << ladder.size() << " rungs found)\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ParseError& e) {
        fail("parse", e.what());
    } catch (const ValidationError& e) {
        fail("validation", e.what());
    } catch (const CacheError& e) {
        fail("cache", e.what());
    } catch (const StepTooLarge& e) {
        fail("step_too_large", e.what());
    } catch (const UnitarityLoss& e) {
        fail("unitarity_loss", e.what());
    } catch (const DiagonalizationFailure& e) {
        fail("diagonalization_failure", e.what());
    } catch (const PoleProximity& e) {
        fail("pole_proximity", e.what());
    } catch (const NoConvergence& e) {
        fail("no_convergence", e.what());
    } catch (const JacobianSingular& e) {
        fail("jacobian_singular", e.what());
    } catch (const NotRegular& e) {
        fail("not_regular", e.what());
    } catch (const NoCurve& e) {
        fail("no_curve", e.what());
    } catch (const std::exception& e) {
        fail("internal", e.what());
    }
}
