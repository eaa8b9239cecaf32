#pragma once

#include <vector>

#include "omarray/params.hpp"

namespace omarray {

// Amplitude-resolved calibration of the self-oscillating cell. The
// mechanical motion is prescribed as beta(t) = A e^{-i Omega t} and the
// cavity is driven to its periodic attractor, which yields the induced
// damping and spring shift as period averages:
//
//     Gamma_opt(A) = +2 g0 <|alpha|^2 sin(Omega t)>_T / A
//     Omega(A)     = Omega - g0 <|alpha|^2 cos(Omega t)>_T / A
//
// The limit cycle sits at the balance Gamma + Gamma_opt(A_bar) = 0 with
// A_bar = |beta|. Small amplitude deviations relax at
//
//     gamma = (1/2) d/dA [ (Gamma + Gamma_opt(A)) A ]  at A_bar
//
// which is positive for a stable cycle, and the amplitude-to-frequency
// shear entering the phase model is dOmega = A_bar (dOmega/dA) at A_bar.

enum class HopfStatus {
    ok,                  // stable limit cycle located on the grid
    no_self_oscillation  // Gamma + Gamma_opt(A) > 0 everywhere sampled
};

struct HopfCalibration {
    // profiles sampled on the amplitude grid
    std::vector<double> amplitude;
    std::vector<double> gamma_opt;
    std::vector<double> omega_eff;
    std::vector<double> mean_photons;  // period-averaged |alpha|^2

    HopfStatus status = HopfStatus::no_self_oscillation;
    double a_bar = 0;           // limit-cycle amplitude, zero when absent
    double gamma = 0;           // amplitude relaxation rate at A_bar
    double d_omega = 0;         // A_bar * dOmega/dA at A_bar
    double omega_at_abar = 0;   // Omega(A_bar)
    double photons_at_abar = 0; // <|alpha|^2>_T at A_bar

    SystemParams params;  // the cell this table describes
};

// Calibrates one cell over the given amplitude grid (strictly positive,
// increasing). The cell is treated in isolation: the coupling entries K
// and J of the params do not enter. A_bar is refined by bisection between
// the first grid pair where the net damping changes sign from negative to
// positive; absence of such a pair is the valid no-self-oscillation
// outcome, with the profiles still filled in.
HopfCalibration calibrate_hopf(const SystemParams& p,
                               const std::vector<double>& amplitude_grid);

// Coupling rates of the reduced phase model,
//
//     K1 = K dOmega / gamma - K2,      K2 = K^2 / (2 z^2 gamma),
//
// for intercell coupling K distributed over z neighbours. At z = 1 the
// pair collapses to the single-cell form K1 = (dOmega - K/2) K / gamma.
struct EffectiveCouplings {
    double k1 = 0;
    double k2 = 0;
};
EffectiveCouplings effective_couplings(double K, int z,
                                       const HopfCalibration& calib);

// Phase and amplitude noise floors of the limit cycle in the resolved
// sideband approximation: 2 D_tilde = Gamma + 4 g0^2 <|alpha|^2>_T / kappa,
// applied to both quadratures.
struct SidebandDiffusion {
    double d_phi_tilde = 0;
    double d_a_tilde = 0;
};
SidebandDiffusion sideband_diffusions(const HopfCalibration& calib);

// Effective phase diffusion of the cycle,
//
//     D_phi = (D_phi_tilde + (dOmega/gamma)^2 D_a_tilde) / A_bar^2,
//
// accepting either the sideband estimate above or empirically measured
// quadrature diffusions.
double diffusion_constant(const HopfCalibration& calib, double d_phi_tilde,
                          double d_a_tilde);

// Synchronization window predicted by the linear stability of the
// incoherent state, K1 = 2 D_phi: the roots of
//
//     K^2 - 2 z^2 dOmega K + 4 z^2 gamma D_phi = 0
//
// delimit the coupling range [k_onset, k_reentry] where the lattice
// phase-locks; above the window the quadratic term destabilizes it again.
enum class ThresholdStatus {
    ok,
    no_threshold,       // dOmega <= 0, locking channel closed
    never_synchronizes  // noise exceeds the best case, no real roots
};
struct ThresholdPrediction {
    ThresholdStatus status = ThresholdStatus::no_threshold;
    double k_onset = 0;
    double k_reentry = 0;
};
ThresholdPrediction predict_threshold(int z, const HopfCalibration& calib,
                                      double d_phi);

}  // namespace omarray
