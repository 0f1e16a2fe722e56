#ifndef DIMER_ORBITS_HPP
#define DIMER_ORBITS_HPP

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dimer/meanfield.hpp"

namespace dimer {

/** Linear stability class of a periodic orbit of the stroboscopic map:
 *  elliptic iff |trace| < 2, hyperbolic iff |trace| > 2. */
enum class Stability { Elliptic, Hyperbolic, Parabolic };

struct PeriodicOrbit {
    PhasePoint fixed_point;
    Eigen::Matrix2d monodromy;  // d(map)/d(p, phi), finite differences
    Stability stability = Stability::Elliptic;
    std::complex<double> multipliers[2];  // eigenvalues of the monodromy
    double residual = 0.0;                // max-norm of map(x) - x at the solution
    int newton_iterations = 0;
};

/** Finite-difference Jacobian of the one-period map at x: fourth-order
 *  central stencil of half-width 2 * jacobian_step, phi displacements of
 *  the images taken wrap-aware. */
Eigen::Matrix2d map_jacobian(const PhasePoint& x, const DimerParams& params,
                             const MfSettings& settings = {});

/** Newton solve for a fixed point of the one-period map, from `guess` to
 *  max-norm residual newton_tol. Throws NoConvergence after newton_max_iter
 *  and JacobianSingular when (J - 1) is not invertible (parabolic case). */
PeriodicOrbit find_periodic_orbit(const PhasePoint& guess, const DimerParams& params,
                                  const MfSettings& settings = {});

/**
 * Closed invariant curve of the map, traced by strobing a quasiperiodic
 * orbit and ordering the iterates by polar angle about the enclosed fixed
 * point. The action is the enclosed area over 2 pi (shoelace formula on
 * the closed polyline, phase displacements taken wrap-aware around the
 * center), the mean-field form of the quantizable loop integral of p dphi.
 */
struct InvariantCurve {
    std::vector<PhasePoint> points;  // angular order; closed implicitly
    PhasePoint center;
    PhasePoint seed;
    double action = 0.0;
    /** Diagnostics the curve-likeness gate evaluated. */
    double max_angular_gap = 0.0;  // largest angular void around the center, radians
    double spacing_score = 0.0;    // sorted-polyline perimeter, all vs half the strobes
};

/** Thresholds separating closed curves from chaotic fills. Iterates on a
 *  curve keep the sorted-polyline perimeter as strobes accumulate (ratio
 *  near 1); area-filling iterates grow it like sqrt(count) (near 1.41). */
struct CurveGate {
    double gap_tol = 0.9;       // largest tolerated angular void
    double spacing_tol = 1.25;  // perimeter growth, all vs half the strobes
};

/** Strobes the orbit of `seed` n_strobes times and builds the closed curve
 *  around `center`. Throws NotRegular when the iterates fail the
 *  curve-likeness gate (chaotic or resonance-chain seed). */
InvariantCurve trace_invariant_curve(const PhasePoint& seed, const PhasePoint& center,
                                     int n_strobes, const DimerParams& params,
                                     const MfSettings& settings = {}, const CurveGate& gate = {});

/**
 * Radial action interpolator built from a family of nested invariant
 * curves around an elliptic fixed point, seeded along the +p ray. Gives
 * every phase-space point inside the family's coverage its action
 * coordinate; quadratic continuation inside the innermost curve (the
 * action of a shrinking curve vanishes like its enclosed area).
 */
struct ActionChart {
    PhasePoint center;
    double scale_p = 1.0, scale_phi = 1.0;   // aspect frame of the family
    Eigen::VectorXd theta;                   // common angle grid over [-pi, pi)
    std::vector<Eigen::VectorXd> radii;      // scaled radial profiles, nested ascending
    std::vector<double> actions;             // matching actions, strictly increasing
    std::vector<double> seed_radii;          // generating seed offsets along +p

    /** Action coordinate of x; quiet NaN outside the outermost curve. */
    double action_at(const PhasePoint& x) const;
};

/** Traces `curves` members of the curve family with seed offsets geometric
 *  between r_min and r_max; curves failing the gate or breaking action
 *  monotonicity are dropped. Throws NoCurve if fewer than two survive. */
ActionChart build_action_chart(const PeriodicOrbit& island, double r_min, double r_max,
                               int curves, int n_strobes, const DimerParams& params,
                               const MfSettings& settings = {}, const CurveGate& gate = {});

/** One quantized tube: the curve whose action is closest to the half-odd
 *  target (2/N)(k + 1/2) reachable by the radial root-find. */
struct EBKResult {
    int k = 0;
    double target_action = 0.0;
    double achieved_action = 0.0;
    double residual = 0.0;
    bool found = false;
    std::string note;  // failure reason when !found
    InvariantCurve curve;
};

/**
 * EBK quantization around an elliptic fixed point: for k = 0..k_max,
 * root-finds the seed radius where the invariant-curve action equals
 * hbar_eff (k + 1/2) with hbar_eff = 2/N. Stops early when the family
 * stops growing (island boundary); per-k failures are reported in the
 * result, not thrown.
 */
std::vector<EBKResult> ebk_quantize(const PeriodicOrbit& island, int n_particles, int k_max,
                                    int n_strobes, const DimerParams& params,
                                    const MfSettings& settings = {}, const CurveGate& gate = {});

} // namespace dimer

#endif
