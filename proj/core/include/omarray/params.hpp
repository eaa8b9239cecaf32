#pragma once

#include <cmath>
#include <string>

#include "omarray/errors.hpp"

namespace omarray {

// Parameters of one optomechanical cell plus its mean-field environment.
// All rates and frequencies are in units of the mechanical frequency omega,
// which is kept explicit so sweeps may scale it.
//
// Sign conventions: delta = omega_laser - omega_cavity (red detuned means
// delta < 0); the single-cell Hamiltonian is
//   H = -delta a'a + omega b'b - g0 (b + b') a'a + alpha_L (a + a')
// and the lattice couplings enter as -J(a'<a> + h.c.) and -K(b'<b> + h.c.).
struct SystemParams {
    double delta = 0.0;    // laser detuning from the cavity
    double omega = 1.0;    // mechanical frequency (the frequency unit)
    double g0 = 0.0;       // single-photon optomechanical coupling
    double alpha_L = 0.0;  // laser drive amplitude
    double kappa = 0.0;    // cavity intensity decay rate
    double gamma = 0.0;    // mechanical damping rate
    double n_th = 0.0;     // thermal phonon occupancy of the bath
    double J = 0.0;        // optical hopping (scaled, J = z * J_single)
    double K = 0.0;        // mechanical hopping (scaled likewise)
    int z = 1;             // lattice coordination number

    void validate() const {
        auto bad = [](const std::string& what) { throw invalid_params("SystemParams: " + what); };
        if (!(omega > 0.0)) bad("omega must be positive");
        if (!(kappa > 0.0)) bad("kappa must be positive");
        if (gamma < 0.0) bad("gamma must be non-negative");
        if (n_th < 0.0) bad("n_th must be non-negative");
        if (alpha_L < 0.0) bad("alpha_L must be non-negative");
        if (z < 1) bad("coordination number z must be at least 1");
        for (double v : {delta, omega, g0, alpha_L, kappa, gamma, n_th, J, K})
            if (!std::isfinite(v)) bad("all parameters must be finite");
    }
};

// Fock-space truncation for the joint photon x phonon Hilbert space.
// The photon index is the slow tensor factor: joint index = n_ph * phonon_levels + n_m.
struct HilbertSpec {
    int photon_levels = 14;
    int phonon_levels = 14;

    int dim() const { return photon_levels * phonon_levels; }

    void validate() const {
        if (photon_levels < 2 || phonon_levels < 2)
            throw invalid_params("HilbertSpec: need at least 2 levels per subsystem");
        if (photon_levels > 64 || phonon_levels > 64)
            throw invalid_params("HilbertSpec: truncation above 64 levels per subsystem is not supported");
    }
};

// For sweeps over the effective detuning at fixed J: the drive frequency is
// chosen per point so that the detuning seen by the shifted cavity resonance
// stays at delta_eff. Returns the bare delta to put into SystemParams.
inline double adapt_detuning(double delta_eff, double J) { return delta_eff - J; }

} // namespace omarray
