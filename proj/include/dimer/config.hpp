#ifndef DIMER_CONFIG_HPP
#define DIMER_CONFIG_HPP

#include <string>
#include <vector>

#include "dimer/meanfield.hpp"
#include "dimer/params.hpp"
#include "dimer/propagator.hpp"

namespace dimer {

/** Spectrum-cache handling for a run: consult and refresh, consult only,
 *  refresh only, or bypass entirely. */
enum class CachePolicy { ReadWrite, ReadOnly, WriteOnly, Off };

std::string cache_policy_name(CachePolicy p);
CachePolicy cache_policy_from_name(const std::string& name);

/**
 * Everything a run needs, assembled from one config file: the physical
 * parameters, solver settings for both the quantum and the mean-field
 * stack, grid shapes, and artifact plumbing. The config is echoed into
 * every output file, and feeding the echo back reproduces the run.
 */
struct RunConfig {
    DimerParams params;
    IntegratorSettings quantum;
    MfSettings meanfield;

    int grid_p = 400;    // Husimi rows (population imbalance)
    int grid_phi = 400;  // Husimi columns (relative phase)

    std::string output_dir = ".";
    std::string cache_dir;  // empty: "<output_dir>/cache"
    CachePolicy cache = CachePolicy::ReadWrite;

    /** Non-fatal observations made while parsing (e.g. an attractive
     *  interaction sign outside the validated regime). */
    std::vector<std::string> notices;

    std::string resolved_cache_dir() const {
        return cache_dir.empty() ? output_dir + "/cache" : cache_dir;
    }
};

/** True when every field that affects computed numbers matches (notices
 *  and plumbing paths are ignored). */
bool same_physics(const RunConfig& a, const RunConfig& b);

/**
 * Parses the key = value config dialect:
 *
 *   - section headers [system], [quantum], [meanfield], [output];
 *   - one "key = value" pair per line; '#' or ';' starts a comment;
 *   - [system] accepts either alpha or kappa_over_omega0 (exclusively);
 *     with the latter, alpha = n * kappa_over_omega0.
 *
 * Unknown sections and unknown keys are hard errors, not warnings: a typo
 * in a physics parameter must never silently fall back to a default.
 * Throws ParseError (with the line number) for malformed text and
 * ValidationError (naming the key) for invalid values.
 */
RunConfig parse_config(const std::string& text);

/** Reads the file and parses it; file errors surface as ParseError. */
RunConfig load_config(const std::string& path);

/** Canonical text form; parse_config(serialize_config(c)) reproduces c
 *  bit-exactly (floats are printed with round-trip precision). */
std::string serialize_config(const RunConfig& config);

/**
 * The mean-field flow depends on the interaction only through alpha, so a
 * mean-field artifact echoes this reduced config instead: the [system]
 * section without the particle number. Two runs that share (alpha, drive)
 * then emit byte-identical section files regardless of n.
 */
std::string serialize_meanfield_config(const RunConfig& config);

} // namespace dimer

#endif
