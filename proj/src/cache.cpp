#include "dimer/cache.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <vector>

#include <json.hpp>

namespace dimer {

namespace {

static_assert(std::endian::native == std::endian::little,
              "cache bodies are little-endian; add byte swapping for this target");

constexpr const char* kMagic = "dimer-spectrum-cache";
constexpr int kVersion = 1;

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

void append_bits(std::string& s, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    s += hex64(bits);
    s += '|';
}

// The cached settings are the resolved ones, so a request that spells out
// the defaults and a request that leaves them zero hash to the same entry.
nlohmann::json settings_json(const IntegratorSettings& s) {
    return {{"method", method_name(s.method)},
            {"steps_per_period", s.steps_per_period},
            {"unitarity_tolerance", s.unitarity_tolerance},
            {"adaptive_rtol", s.adaptive_rtol},
            {"adaptive_atol", s.adaptive_atol}};
}

nlohmann::json params_json(const DimerParams& p) {
    return {{"n", p.n_particles},
            {"alpha", p.alpha},
            {"mu_over_omega0", p.drive_amplitude},
            {"omega_over_omega0", p.drive_frequency}};
}

bool matches(const nlohmann::json& h, const DimerParams& p, const IntegratorSettings& s) {
    const auto& jp = h.at("params");
    const auto& js = h.at("quantum");
    return jp.at("n").get<int>() == p.n_particles &&
           jp.at("alpha").get<double>() == p.alpha &&
           jp.at("mu_over_omega0").get<double>() == p.drive_amplitude &&
           jp.at("omega_over_omega0").get<double>() == p.drive_frequency &&
           js.at("method").get<std::string>() == method_name(s.method) &&
           js.at("steps_per_period").get<int>() == s.steps_per_period &&
           js.at("unitarity_tolerance").get<double>() == s.unitarity_tolerance &&
           js.at("adaptive_rtol").get<double>() == s.adaptive_rtol &&
           js.at("adaptive_atol").get<double>() == s.adaptive_atol;
}

void write_file_atomic(const std::string& path, const void* data, std::size_t bytes) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw CacheError("cannot open '" + tmp + "' for writing");
        out.write(static_cast<const char*>(data), static_cast<std::streamsize>(bytes));
        if (!out) throw CacheError("short write to '" + tmp + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw CacheError("cannot rename '" + tmp + "' to '" + path + "': " + ec.message());
}

std::vector<char> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw CacheError("cannot read '" + path + "'");
    const std::streamsize bytes = in.tellg();
    in.seekg(0);
    std::vector<char> data(static_cast<std::size_t>(bytes));
    in.read(data.data(), bytes);
    if (!in) throw CacheError("short read from '" + path + "'");
    return data;
}

} // namespace

std::uint64_t fnv1a(const void* data, std::size_t bytes, std::uint64_t seed) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = seed;
    for (std::size_t i = 0; i < bytes; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

SpectrumCachePaths spectrum_cache_paths(const std::string& cache_dir, const RunConfig& config) {
    const IntegratorSettings s = resolve_settings(config.params, config.quantum);
    std::string key;
    key += std::to_string(config.params.n_particles) + "|";
    append_bits(key, config.params.alpha);
    append_bits(key, config.params.drive_amplitude);
    append_bits(key, config.params.drive_frequency);
    key += method_name(s.method) + "|" + std::to_string(s.steps_per_period) + "|";
    append_bits(key, s.unitarity_tolerance);
    append_bits(key, s.adaptive_rtol);
    append_bits(key, s.adaptive_atol);
    const std::string stem = cache_dir + "/spectrum-" + hex64(fnv1a(key.data(), key.size()));
    return {stem + ".json", stem + ".bin"};
}

void store_spectrum(const SpectrumCachePaths& paths, const RunConfig& config,
                    const FloquetSpectrum& spectrum) {
    const auto dim = spectrum.eigenphases.size();
    if (spectrum.eigenvectors.rows() != dim || spectrum.eigenvectors.cols() != dim ||
        spectrum.residuals.size() != dim)
        throw CacheError("spectrum arrays have inconsistent sizes");

    // body: eigenphases f64[dim], then eigenvectors interleaved re/im with
    // column n contiguous (Eigen's own layout is column-major, so the
    // complex matrix memory maps onto the body directly)
    std::vector<double> body(static_cast<std::size_t>(dim) * (1 + 2 * dim));
    std::memcpy(body.data(), spectrum.eigenphases.data(), sizeof(double) * dim);
    std::memcpy(body.data() + dim, spectrum.eigenvectors.data(),
                sizeof(double) * 2 * dim * dim);
    const std::size_t body_bytes = body.size() * sizeof(double);
    const std::uint64_t digest = fnv1a(body.data(), body_bytes);

    nlohmann::json header{
        {"magic", kMagic},
        {"version", kVersion},
        {"params", params_json(config.params)},
        {"quantum", settings_json(resolve_settings(config.params, config.quantum))},
        {"dim", dim},
        {"max_residual", spectrum.max_residual},
        {"residuals", std::vector<double>(spectrum.residuals.data(),
                                          spectrum.residuals.data() + dim)},
        {"body",
         {{"bytes", body_bytes},
          {"fnv1a", hex64(digest)},
          {"layout", "eigenphases f64[dim]; eigenvectors f64 re,im interleaved, "
                     "column-contiguous, little-endian"}}}};

    std::error_code ec;
    std::filesystem::create_directories(std::filesystem::path(paths.body).parent_path(), ec);
    const std::string text = header.dump(2) + "\n";
    // body first: a header never points at a body that is not fully there
    write_file_atomic(paths.body, body.data(), body_bytes);
    write_file_atomic(paths.header, text.data(), text.size());
}

std::optional<FloquetSpectrum> load_spectrum(const SpectrumCachePaths& paths,
                                             const RunConfig& config) {
    if (!std::filesystem::exists(paths.header) || !std::filesystem::exists(paths.body))
        return std::nullopt;

    nlohmann::json header;
    try {
        const auto text = read_file(paths.header);
        header = nlohmann::json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::exception& e) {
        throw CacheError(std::string("malformed cache header: ") + e.what());
    }

    try {
        if (header.at("magic").get<std::string>() != kMagic)
            throw CacheError("wrong magic string in '" + paths.header + "'");
        if (header.at("version").get<int>() != kVersion)
            throw CacheError("unsupported cache version in '" + paths.header + "'");

        const IntegratorSettings want = resolve_settings(config.params, config.quantum);
        if (!matches(header, config.params, want)) return std::nullopt;

        const auto dim = header.at("dim").get<Eigen::Index>();
        const auto body_bytes = header.at("body").at("bytes").get<std::size_t>();
        const auto body = read_file(paths.body);
        if (body.size() != body_bytes ||
            body_bytes != sizeof(double) * static_cast<std::size_t>(dim) * (1 + 2 * dim))
            throw CacheError("cache body size mismatch for '" + paths.body + "'");
        if (hex64(fnv1a(body.data(), body.size())) != header.at("body").at("fnv1a").get<std::string>())
            throw CacheError("cache body checksum mismatch for '" + paths.body + "'");

        FloquetSpectrum spectrum;
        spectrum.eigenphases.resize(dim);
        spectrum.eigenvectors.resize(dim, dim);
        std::memcpy(spectrum.eigenphases.data(), body.data(), sizeof(double) * dim);
        std::memcpy(spectrum.eigenvectors.data(), body.data() + sizeof(double) * dim,
                    sizeof(double) * 2 * dim * dim);
        const auto residuals = header.at("residuals").get<std::vector<double>>();
        if (static_cast<Eigen::Index>(residuals.size()) != dim)
            throw CacheError("residual array size mismatch in '" + paths.header + "'");
        spectrum.residuals = Eigen::Map<const Eigen::VectorXd>(residuals.data(), dim);
        spectrum.max_residual = header.at("max_residual").get<double>();
        spectrum.drive_frequency = config.params.drive_frequency;
        spectrum.quasienergies.resize(dim);
        for (Eigen::Index i = 0; i < dim; ++i)
            spectrum.quasienergies[i] =
                quasienergy_representative(spectrum.eigenphases[i], spectrum.drive_frequency);
        return spectrum;
    } catch (const nlohmann::json::exception& e) {
        throw CacheError(std::string("malformed cache header: ") + e.what());
    }
}

} // namespace dimer
