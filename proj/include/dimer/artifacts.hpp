#ifndef DIMER_ARTIFACTS_HPP
#define DIMER_ARTIFACTS_HPP

#include <string>
#include <vector>

#include "dimer/coherence.hpp"
#include "dimer/config.hpp"
#include "dimer/floquet.hpp"
#include "dimer/meanfield.hpp"
#include "dimer/orbits.hpp"

namespace dimer {

/** %.17g, the shortest form that survives a text round trip bit-exactly. */
std::string format_round_trip(double v);

/**
 * Output-file writers. Conventions shared by all of them:
 *
 *   - CSV files open with the producing config echoed as '# ' comment
 *     lines (parseable once the prefix is stripped), then one header row,
 *     then data rows with doubles printed by format_round_trip;
 *   - JSON records embed the same echo as a "config_text" string field;
 *   - mean-field artifacts echo the reduced config (no particle number),
 *     so runs that share (alpha, drive) emit byte-identical files;
 *   - all files use '\n' line endings regardless of platform.
 *
 * Every writer creates the parent directory if needed and throws
 * CacheError on I/O failure (same failure class as the spectrum store).
 */

/** Stroboscopic section: rows (seed, iteration, p, phi). */
void write_section_csv(const std::string& path, const PoincareSection& section,
                       const RunConfig& config);

/** Spectrum table: rows (raw_index, eigenphase, quasienergy, residual). */
void write_spectrum_csv(const std::string& path, const FloquetSpectrum& spectrum,
                        const RunConfig& config);

/** Simplicity table in ascending eta order: rows (n, n_over_N, eta,
 *  raw_index); requires spectrum.eta_order to be assigned. */
void write_eta_csv(const std::string& path, const FloquetSpectrum& spectrum,
                   const Eigen::VectorXd& eta_raw, const RunConfig& config);

/** Periodic-orbit record: fixed point, monodromy, trace, determinant,
 *  stability class, multipliers, solver diagnostics. */
void write_orbit_json(const std::string& path, const std::vector<PeriodicOrbit>& orbits,
                      const RunConfig& config);

/** One invariant curve: rows (p, phi), action in the echo. */
void write_curve_csv(const std::string& path, const InvariantCurve& curve,
                     const RunConfig& config);

/** Quantization ladder: per-rung target/achieved actions, residuals and
 *  notes, plus the file names of the per-rung curve CSVs. */
void write_ebk_json(const std::string& path, const std::vector<EBKResult>& ladder,
                    const std::vector<std::string>& curve_files, int n_particles,
                    const RunConfig& config);

/** Husimi grid: raw little-endian f64 body (row-major, rows = p cells)
 *  next to a JSON sidecar with shape, cell sizes, axis origins, checksum
 *  and the config echo. Returns {body path, sidecar path}. */
std::pair<std::string, std::string> write_husimi(const std::string& stem, const HusimiGrid& grid,
                                                 const RunConfig& config);

} // namespace dimer

#endif
