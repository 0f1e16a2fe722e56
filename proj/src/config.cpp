#include "dimer/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string_view>

namespace dimer {

namespace {

constexpr const char* kSections[] = {"system", "quantum", "meanfield", "output"};

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

// from_chars with a full-match requirement: trailing junk is a hard error,
// so "1.3 # comment" cannot silently parse as 1.3.
double parse_double(std::string_view key, std::string_view value) {
    double out = 0.0;
    const char* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc{} || ptr != end)
        throw ValidationError(std::string(key), "not a number: '" + std::string(value) + "'");
    return out;
}

int parse_int(std::string_view key, std::string_view value) {
    int out = 0;
    const char* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc{} || ptr != end)
        throw ValidationError(std::string(key), "not an integer: '" + std::string(value) + "'");
    return out;
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

std::string cache_policy_name(CachePolicy p) {
    switch (p) {
        case CachePolicy::ReadWrite: return "read_write";
        case CachePolicy::ReadOnly: return "read_only";
        case CachePolicy::WriteOnly: return "write_only";
        case CachePolicy::Off: return "off";
    }
    return "?";
}

CachePolicy cache_policy_from_name(const std::string& name) {
    if (name == "read_write") return CachePolicy::ReadWrite;
    if (name == "read_only") return CachePolicy::ReadOnly;
    if (name == "write_only") return CachePolicy::WriteOnly;
    if (name == "off") return CachePolicy::Off;
    throw ValidationError("cache_policy", "unknown policy '" + name + "'");
}

bool same_physics(const RunConfig& a, const RunConfig& b) {
    const auto& qa = a.quantum;
    const auto& qb = b.quantum;
    const auto& ma = a.meanfield;
    const auto& mb = b.meanfield;
    return a.params == b.params && qa.method == qb.method &&
           qa.steps_per_period == qb.steps_per_period &&
           qa.unitarity_tolerance == qb.unitarity_tolerance &&
           qa.adaptive_rtol == qb.adaptive_rtol && qa.adaptive_atol == qb.adaptive_atol &&
           ma.rtol == mb.rtol && ma.atol == mb.atol && ma.pole_guard == mb.pole_guard &&
           ma.chart_switch == mb.chart_switch && ma.newton_tol == mb.newton_tol &&
           ma.newton_max_iter == mb.newton_max_iter && ma.jacobian_step == mb.jacobian_step &&
           a.grid_p == b.grid_p && a.grid_phi == b.grid_phi;
}

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::optional<double> alpha, kappa;

    std::string section;
    std::vector<std::string> seen;  // "section.key", for duplicate detection

    std::istringstream stream(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(stream, raw)) {
        ++line_no;
        const std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#' || line.front() == ';') continue;

        if (line.front() == '[') {
            if (line.back() != ']')
                throw ParseError(line_no, "unterminated section header");
            const std::string name(trim(line.substr(1, line.size() - 2)));
            bool known = false;
            for (const char* s : kSections) known = known || name == s;
            if (!known) throw ValidationError(name, "unknown section");
            section = name;
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ParseError(line_no, "expected 'key = value'");
        if (section.empty())
            throw ParseError(line_no, "key outside any [section]");
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) throw ParseError(line_no, "empty key");
        if (value.empty()) throw ParseError(line_no, "empty value for '" + key + "'");

        const std::string qualified = section + "." + key;
        for (const auto& s : seen)
            if (s == qualified)
                throw ValidationError(key, "duplicate key in [" + section + "]");
        seen.push_back(qualified);

        if (section == "system") {
            if (key == "n") cfg.params.n_particles = parse_int(key, value);
            else if (key == "alpha") alpha = parse_double(key, value);
            else if (key == "kappa_over_omega0") kappa = parse_double(key, value);
            else if (key == "mu_over_omega0") cfg.params.drive_amplitude = parse_double(key, value);
            else if (key == "omega_over_omega0") cfg.params.drive_frequency = parse_double(key, value);
            else throw ValidationError(key, "unknown key in [system]");
        } else if (section == "quantum") {
            if (key == "method") cfg.quantum.method = method_from_name(value);
            else if (key == "steps_per_period") cfg.quantum.steps_per_period = parse_int(key, value);
            else if (key == "unitarity_tolerance") cfg.quantum.unitarity_tolerance = parse_double(key, value);
            else if (key == "adaptive_rtol") cfg.quantum.adaptive_rtol = parse_double(key, value);
            else if (key == "adaptive_atol") cfg.quantum.adaptive_atol = parse_double(key, value);
            else if (key == "threads") cfg.quantum.threads = parse_int(key, value);
            else throw ValidationError(key, "unknown key in [quantum]");
        } else if (section == "meanfield") {
            if (key == "rtol") cfg.meanfield.rtol = parse_double(key, value);
            else if (key == "atol") cfg.meanfield.atol = parse_double(key, value);
            else if (key == "pole_guard") cfg.meanfield.pole_guard = parse_double(key, value);
            else if (key == "chart_switch") cfg.meanfield.chart_switch = parse_double(key, value);
            else if (key == "newton_tol") cfg.meanfield.newton_tol = parse_double(key, value);
            else if (key == "newton_max_iter") cfg.meanfield.newton_max_iter = parse_int(key, value);
            else if (key == "jacobian_step") cfg.meanfield.jacobian_step = parse_double(key, value);
            else throw ValidationError(key, "unknown key in [meanfield]");
        } else {  // output
            if (key == "directory") cfg.output_dir = value;
            else if (key == "cache_dir") cfg.cache_dir = value;
            else if (key == "grid_p") cfg.grid_p = parse_int(key, value);
            else if (key == "grid_phi") cfg.grid_phi = parse_int(key, value);
            else if (key == "cache_policy") cfg.cache = cache_policy_from_name(value);
            else throw ValidationError(key, "unknown key in [output]");
        }
    }

    if (alpha && kappa)
        throw ValidationError("alpha", "give either alpha or kappa_over_omega0, not both");
    if (alpha) cfg.params.alpha = *alpha;
    if (kappa) cfg.params.alpha = cfg.params.n_particles * *kappa;

    cfg.params.validate();
    if (cfg.params.alpha < 0.0)
        cfg.notices.push_back(
            "alpha < 0 selects the attractive regime; the validated diagnostics "
            "target repulsive interactions");

    const auto positive = [](const char* key, double v) {
        if (!(v > 0.0)) throw ValidationError(key, "must be positive");
    };
    if (cfg.quantum.unitarity_tolerance < 0.0)
        throw ValidationError("unitarity_tolerance", "must be >= 0 (0 = default)");
    positive("adaptive_rtol", cfg.quantum.adaptive_rtol);
    positive("adaptive_atol", cfg.quantum.adaptive_atol);
    if (cfg.quantum.threads < 0) throw ValidationError("threads", "must be >= 0");
    positive("rtol", cfg.meanfield.rtol);
    positive("atol", cfg.meanfield.atol);
    positive("pole_guard", cfg.meanfield.pole_guard);
    positive("chart_switch", cfg.meanfield.chart_switch);
    positive("newton_tol", cfg.meanfield.newton_tol);
    if (cfg.meanfield.newton_max_iter < 1)
        throw ValidationError("newton_max_iter", "must be >= 1");
    positive("jacobian_step", cfg.meanfield.jacobian_step);
    if (cfg.grid_p < 2) throw ValidationError("grid_p", "must be >= 2");
    if (cfg.grid_phi < 2) throw ValidationError("grid_phi", "must be >= 2");
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("config", "cannot read file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const RunConfig& c) {
    std::ostringstream out;
    out << "[system]\n";
    out << "n = " << c.params.n_particles << "\n";
    out << "alpha = " << fmt_double(c.params.alpha) << "\n";
    out << "mu_over_omega0 = " << fmt_double(c.params.drive_amplitude) << "\n";
    out << "omega_over_omega0 = " << fmt_double(c.params.drive_frequency) << "\n";
    out << "[quantum]\n";
    out << "method = " << method_name(c.quantum.method) << "\n";
    out << "steps_per_period = " << c.quantum.steps_per_period << "\n";
    out << "unitarity_tolerance = " << fmt_double(c.quantum.unitarity_tolerance) << "\n";
    out << "adaptive_rtol = " << fmt_double(c.quantum.adaptive_rtol) << "\n";
    out << "adaptive_atol = " << fmt_double(c.quantum.adaptive_atol) << "\n";
    out << "threads = " << c.quantum.threads << "\n";
    out << "[meanfield]\n";
    out << "rtol = " << fmt_double(c.meanfield.rtol) << "\n";
    out << "atol = " << fmt_double(c.meanfield.atol) << "\n";
    out << "pole_guard = " << fmt_double(c.meanfield.pole_guard) << "\n";
    out << "chart_switch = " << fmt_double(c.meanfield.chart_switch) << "\n";
    out << "newton_tol = " << fmt_double(c.meanfield.newton_tol) << "\n";
    out << "newton_max_iter = " << c.meanfield.newton_max_iter << "\n";
    out << "jacobian_step = " << fmt_double(c.meanfield.jacobian_step) << "\n";
    out << "[output]\n";
    out << "directory = " << c.output_dir << "\n";
    if (!c.cache_dir.empty()) out << "cache_dir = " << c.cache_dir << "\n";
    out << "grid_p = " << c.grid_p << "\n";
    out << "grid_phi = " << c.grid_phi << "\n";
    out << "cache_policy = " << cache_policy_name(c.cache) << "\n";
    return out.str();
}

std::string serialize_meanfield_config(const RunConfig& c) {
    std::ostringstream out;
    out << "[system]\n";
    out << "alpha = " << fmt_double(c.params.alpha) << "\n";
    out << "mu_over_omega0 = " << fmt_double(c.params.drive_amplitude) << "\n";
    out << "omega_over_omega0 = " << fmt_double(c.params.drive_frequency) << "\n";
    out << "[meanfield]\n";
    out << "rtol = " << fmt_double(c.meanfield.rtol) << "\n";
    out << "atol = " << fmt_double(c.meanfield.atol) << "\n";
    out << "pole_guard = " << fmt_double(c.meanfield.pole_guard) << "\n";
    out << "chart_switch = " << fmt_double(c.meanfield.chart_switch) << "\n";
    out << "newton_tol = " << fmt_double(c.meanfield.newton_tol) << "\n";
    out << "newton_max_iter = " << c.meanfield.newton_max_iter << "\n";
    out << "jacobian_step = " << fmt_double(c.meanfield.jacobian_step) << "\n";
    return out.str();
}

} // namespace dimer
