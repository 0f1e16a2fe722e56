#ifndef DIMER_PARAMS_HPP
#define DIMER_PARAMS_HPP

#include <cmath>
#include <numbers>

#include "dimer/errors.hpp"

namespace dimer {

/**
 * Dimensionless control parameters of the driven two-site Bose-Hubbard
 * system. Energies are measured in units of the tunneling splitting
 * (hbar*Omega) and time as tau = Omega*t, so only four numbers remain:
 * the particle number N, the mean-field parameter alpha = N*kappa/Omega,
 * and the drive amplitude and frequency in units of Omega.
 */
struct DimerParams {
    int n_particles = 1;
    double alpha = 0.0;
    double drive_amplitude = 0.0;  // mu/Omega
    double drive_frequency = 1.0;  // omega/Omega

    /** Interaction per particle, kappa/Omega; derived, never set directly. */
    double kappa_over_omega0() const { return alpha / n_particles; }

    /** Driving period in scaled time tau. */
    double period() const { return 2.0 * std::numbers::pi / drive_frequency; }

    /** Fock-space dimension N + 1. */
    int dim() const { return n_particles + 1; }

    void validate() const {
        if (n_particles < 1)
            throw ValidationError("n", "n_particles must be >= 1");
        if (!(drive_frequency > 0.0) || !std::isfinite(drive_frequency))
            throw ValidationError("omega_over_omega0", "drive frequency must be positive");
        if (!std::isfinite(alpha))
            throw ValidationError("alpha", "alpha must be finite");
        if (drive_amplitude < 0.0 || !std::isfinite(drive_amplitude))
            throw ValidationError("mu_over_omega0", "drive amplitude must be >= 0");
    }
};

inline bool operator==(const DimerParams& a, const DimerParams& b) {
    return a.n_particles == b.n_particles && a.alpha == b.alpha &&
           a.drive_amplitude == b.drive_amplitude && a.drive_frequency == b.drive_frequency;
}

} // namespace dimer

#endif
