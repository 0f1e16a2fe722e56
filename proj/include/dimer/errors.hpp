#ifndef DIMER_ERRORS_HPP
#define DIMER_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace dimer {

/** Step size cannot resolve the largest diagonal energy scale (norm drift). */
struct StepTooLarge : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/** One-cycle operator failed its unitarity-defect tolerance. */
struct UnitarityLoss : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/** Eigen-residuals exceed tolerance even after cluster repair. */
struct DiagonalizationFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/** Pendulum chart evaluated too close to the |p| = 1 coordinate pole. */
struct PoleProximity : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/** Newton iteration exhausted max_iter without meeting tolerance. */
struct NoConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/** Finite-difference Jacobian of the map is singular (parabolic point). */
struct JacobianSingular : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/** Strobe iterates fill an area instead of tracing a closed curve. */
struct NotRegular : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/** No invariant curve carries the requested quantized action. */
struct NoCurve : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/** Config text could not be parsed; carries the offending line number. */
struct ParseError : std::runtime_error {
    int line;
    ParseError(int line_, const std::string& what_)
        : std::runtime_error("line " + std::to_string(line_) + ": " + what_), line(line_) {}
};

/** Config parsed but a value (or key) is invalid; carries the key name. */
struct ValidationError : std::runtime_error {
    std::string key;
    ValidationError(std::string key_, const std::string& what_)
        : std::runtime_error(key_.empty() ? what_ : key_ + ": " + what_), key(std::move(key_)) {}
};

/** Cache file is unreadable, corrupt, or fails its checksum. */
struct CacheError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace dimer

#endif
