#ifndef DIMER_CACHE_HPP
#define DIMER_CACHE_HPP

#include <cstdint>
#include <optional>
#include <string>

#include "dimer/config.hpp"
#include "dimer/floquet.hpp"

namespace dimer {

/**
 * On-disk spectrum store: a JSON header next to a raw little-endian binary
 * body. The header carries a magic string, the format version, the exact
 * physical parameters and integrator settings that produced the spectrum,
 * the body checksum, and everything small (residuals, quasienergies); the
 * body carries the two large arrays, eigenphases and eigenvectors. Headers
 * whose parameters do not match the requesting config exactly are treated
 * as misses, never as near-hits.
 */
struct SpectrumCachePaths {
    std::string header;  // .json
    std::string body;    // .bin
};

/** Paths for the given config inside cache_dir; the file stem encodes a
 *  hash of the parameter set so unrelated runs never collide. */
SpectrumCachePaths spectrum_cache_paths(const std::string& cache_dir, const RunConfig& config);

/** FNV-1a 64-bit digest; the body checksum in the header. */
std::uint64_t fnv1a(const void* data, std::size_t bytes, std::uint64_t seed = 14695981039346656037ull);

/** Writes header + body atomically (temp file then rename). Throws
 *  CacheError on I/O failure. */
void store_spectrum(const SpectrumCachePaths& paths, const RunConfig& config,
                    const FloquetSpectrum& spectrum);

/**
 * Loads the spectrum iff the header exists, is well formed, matches the
 * config exactly, and the body checksum verifies. A missing file is a
 * plain miss (nullopt); a present-but-corrupt or mismatched-version file
 * throws CacheError so silent recomputation never masks corruption.
 */
std::optional<FloquetSpectrum> load_spectrum(const SpectrumCachePaths& paths,
                                             const RunConfig& config);

} // namespace dimer

#endif
