#ifndef DIMER_CRITERIA_HPP
#define DIMER_CRITERIA_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace dimer {

/** Outcome of one acceptance property. */
struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;  // measured value(s) against the pinned bound
    double seconds = 0.0;
};

struct AcceptanceOptions {
    /** Also run the production-scale (n = 10000) simplicity regression;
     *  hours of compute, so off by default. */
    bool long_run = false;
    int threads = 0;  // 0 = hardware concurrency
    /** Where the universality check writes its section files; empty uses
     *  the system temp directory. */
    std::string scratch_dir;
};

/**
 * Runs the full acceptance suite: ten properties covering the factorized
 * interaction-free spectrum, unitarity and residual bounds at n = 1000,
 * the simplicity-measure extremes and the coherent tail of its ordered
 * curve, mean-field conservation laws, symplecticity of the stroboscopic
 * map, fixed-point stability, the semiclassical action ladder against
 * Husimi-weighted quantum actions, Husimi normalization, and mean-field
 * universality in alpha. Tolerances are pinned inside; every property
 * reports measured numbers in its detail string. Exceptions inside one
 * property fail that property and never abort the others.
 */
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options = {});

/** One "PASS/FAIL name: detail [time]" line per result; returns the
 *  number of failures. */
int print_acceptance(const std::vector<CriterionResult>& results, std::ostream& out);

} // namespace dimer

#endif
