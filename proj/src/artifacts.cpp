#include "dimer/artifacts.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dimer/cache.hpp"

namespace dimer {

namespace {

void write_text(const std::string& path, const std::string& text) {
    std::error_code ec;
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent, ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw CacheError("cannot open '" + path + "' for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw CacheError("short write to '" + path + "'");
}

/** The config echo: every line prefixed with '# '. */
std::string comment_block(const std::string& config_text) {
    std::istringstream in(config_text);
    std::string line, out;
    while (std::getline(in, line)) out += "# " + line + "\n";
    return out;
}

std::string stability_name(Stability s) {
    switch (s) {
        case Stability::Elliptic: return "elliptic";
        case Stability::Hyperbolic: return "hyperbolic";
        case Stability::Parabolic: return "parabolic";
    }
    return "?";
}

} // namespace

std::string format_round_trip(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_section_csv(const std::string& path, const PoincareSection& section,
                       const RunConfig& config) {
    // the echo is the config text commented out once; run metadata keeps an
    // inner '#' so a consumer stripping the prefix still parses the block
    std::string out = comment_block(serialize_meanfield_config(config));
    out += "# # seeds = " + std::to_string(section.seeds.size()) + "\n";
    const std::size_t iterations = section.orbits.empty() ? 0 : section.orbits[0].size() - 1;
    out += "# # iterations = " + std::to_string(iterations) + "\n";
    out += "seed,iteration,p,phi\n";
    for (std::size_t s = 0; s < section.orbits.size(); ++s)
        for (std::size_t k = 0; k < section.orbits[s].size(); ++k) {
            const PhasePoint& x = section.orbits[s][k];
            out += std::to_string(s) + "," + std::to_string(k) + "," +
                   format_round_trip(x.p) + "," + format_round_trip(x.phi) + "\n";
        }
    write_text(path, out);
}

void write_spectrum_csv(const std::string& path, const FloquetSpectrum& spectrum,
                        const RunConfig& config) {
    std::string out = comment_block(serialize_config(config));
    out += "raw_index,eigenphase,quasienergy,residual\n";
    for (Eigen::Index i = 0; i < spectrum.eigenphases.size(); ++i)
        out += std::to_string(i) + "," + format_round_trip(spectrum.eigenphases[i]) + "," +
               format_round_trip(spectrum.quasienergies[i]) + "," +
               format_round_trip(spectrum.residuals[i]) + "\n";
    write_text(path, out);
}

void write_eta_csv(const std::string& path, const FloquetSpectrum& spectrum,
                   const Eigen::VectorXd& eta_raw, const RunConfig& config) {
    const auto dim = spectrum.eigenphases.size();
    if (spectrum.eta_order.size() != static_cast<std::size_t>(dim))
        throw ValidationError("eta_order", "simplicity ordering has not been assigned");
    if (eta_raw.size() != dim)
        throw ValidationError("eta", "eta array size does not match the spectrum");
    std::string out = comment_block(serialize_config(config));
    out += "n,n_over_N,eta,raw_index\n";
    const double n_particles = static_cast<double>(config.params.n_particles);
    for (Eigen::Index label = 0; label < dim; ++label) {
        const int raw = spectrum.eta_order[static_cast<std::size_t>(label)];
        out += std::to_string(label) + "," +
               format_round_trip(static_cast<double>(label) / n_particles) + "," +
               format_round_trip(eta_raw[raw]) + "," + std::to_string(raw) + "\n";
    }
    write_text(path, out);
}

void write_orbit_json(const std::string& path, const std::vector<PeriodicOrbit>& orbits,
                      const RunConfig& config) {
    nlohmann::json doc;
    // orbits are pure mean-field objects, so the echo omits the particle
    // number: runs sharing (alpha, drive) emit byte-identical records
    doc["config_text"] = serialize_meanfield_config(config);
    doc["orbits"] = nlohmann::json::array();
    for (const auto& o : orbits) {
        const auto& m = o.monodromy;
        doc["orbits"].push_back(
            {{"p", o.fixed_point.p},
             {"phi", o.fixed_point.phi},
             {"monodromy", {{m(0, 0), m(0, 1)}, {m(1, 0), m(1, 1)}}},
             {"trace", m.trace()},
             {"determinant", m.determinant()},
             {"stability", stability_name(o.stability)},
             {"multipliers",
              {{{"re", o.multipliers[0].real()}, {"im", o.multipliers[0].imag()}},
               {{"re", o.multipliers[1].real()}, {"im", o.multipliers[1].imag()}}}},
             {"residual", o.residual},
             {"newton_iterations", o.newton_iterations}});
    }
    write_text(path, doc.dump(2) + "\n");
}

void write_curve_csv(const std::string& path, const InvariantCurve& curve,
                     const RunConfig& config) {
    std::string out = comment_block(serialize_meanfield_config(config));
    out += "# # action = " + format_round_trip(curve.action) + "\n";
    out += "# # center = " + format_round_trip(curve.center.p) + " " +
           format_round_trip(curve.center.phi) + "\n";
    out += "# # seed = " + format_round_trip(curve.seed.p) + " " +
           format_round_trip(curve.seed.phi) + "\n";
    out += "p,phi\n";
    for (const auto& x : curve.points)
        out += format_round_trip(x.p) + "," + format_round_trip(x.phi) + "\n";
    write_text(path, out);
}

void write_ebk_json(const std::string& path, const std::vector<EBKResult>& ladder,
                    const std::vector<std::string>& curve_files, int n_particles,
                    const RunConfig& config) {
    nlohmann::json doc;
    doc["config_text"] = serialize_config(config);
    doc["n"] = n_particles;
    doc["heff"] = 2.0 / static_cast<double>(n_particles);
    doc["rungs"] = nlohmann::json::array();
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        const auto& r = ladder[i];
        nlohmann::json rung{{"k", r.k},
                            {"target_action", r.target_action},
                            {"achieved_action", r.achieved_action},
                            {"residual", r.residual},
                            {"found", r.found},
                            {"strobes", r.curve.points.size()}};
        if (!r.note.empty()) rung["note"] = r.note;
        if (i < curve_files.size() && !curve_files[i].empty()) rung["curve_csv"] = curve_files[i];
        doc["rungs"].push_back(std::move(rung));
    }
    write_text(path, doc.dump(2) + "\n");
}

std::pair<std::string, std::string> write_husimi(const std::string& stem, const HusimiGrid& grid,
                                                 const RunConfig& config) {
    const std::string body_path = stem + ".bin";
    const std::string sidecar_path = stem + ".json";

    // row-major body: row i = p cell, column j = phi cell
    const auto rows = grid.values.rows();
    const auto cols = grid.values.cols();
    std::vector<double> body(static_cast<std::size_t>(rows) * cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j)
            body[static_cast<std::size_t>(i) * cols + j] = grid.values(i, j);
    const std::size_t body_bytes = body.size() * sizeof(double);

    std::error_code ec;
    const auto parent = std::filesystem::path(body_path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent, ec);
    {
        std::ofstream out(body_path, std::ios::binary | std::ios::trunc);
        if (!out) throw CacheError("cannot open '" + body_path + "' for writing");
        out.write(reinterpret_cast<const char*>(body.data()),
                  static_cast<std::streamsize>(body_bytes));
        if (!out) throw CacheError("short write to '" + body_path + "'");
    }

    nlohmann::json sidecar{
        {"magic", "dimer-husimi-grid"},
        {"version", 1},
        {"n", grid.n_particles},
        {"state_label", grid.state_label},
        {"p_cells", rows},
        {"phi_cells", cols},
        {"dp", grid.dp()},
        {"dphi", grid.dphi()},
        {"p_first", -1.0 + 0.5 * grid.dp()},
        {"phi_first", grid.phi_axis.size() ? grid.phi_axis[0] : 0.0},
        {"normalization", grid.normalization()},
        {"body",
         {{"file", std::filesystem::path(body_path).filename().string()},
          {"bytes", body_bytes},
          {"fnv1a", [&] {
               char buf[20];
               std::snprintf(buf, sizeof buf, "%016llx",
                             static_cast<unsigned long long>(fnv1a(body.data(), body_bytes)));
               return std::string(buf);
           }()},
          {"layout", "f64 row-major, rows = p cells, little-endian"}}},
        {"config_text", serialize_config(config)}};
    write_text(sidecar_path, sidecar.dump(2) + "\n");
    return {body_path, sidecar_path};
}

} // namespace dimer
