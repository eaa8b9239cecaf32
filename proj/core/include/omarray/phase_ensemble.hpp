#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "omarray/hopf.hpp"

namespace omarray {

// Reduced description of the locked lattice: every cell is a phase
// oscillator coupled to the mean field (R, Psi) and its second harmonic
// (R2, Psi2),
//
//     dphi/dt = -Omega(A_bar) + K R cos(Psi - phi) + K1 R sin(Psi - phi)
//               + K2 R^2 sin(2 Psi - 2 phi)
//               + K2 R R2 sin(Psi2 - Psi - phi) + xi,
//
// with <xi(t) xi(t')> = 2 D_phi delta(t - t'). The cos term only shifts
// the collective frequency but is kept so that its effect is observed
// rather than assumed.

struct PhaseModelCoefficients {
    double k = 0;     // bare coupling, enters the cos term
    double k1 = 0;    // first-order locking rate
    double k2 = 0;    // second-order locking rate
    double d_phi = 0; // phase diffusion constant
    double d_phi_tilde = 0, d_a_tilde = 0;  // quadrature inputs, informational
    double omega = 0; // limit-cycle frequency Omega(A_bar)
};

// Assembles the coefficient set for coupling K on a z-coordinated lattice
// from a calibration, using the sideband diffusion estimate by default or
// explicitly supplied quadrature diffusions.
PhaseModelCoefficients phase_model_coefficients(double K, int z,
                                                const HopfCalibration& calib);
PhaseModelCoefficients phase_model_coefficients(double K, int z,
                                                const HopfCalibration& calib,
                                                double d_phi_tilde,
                                                double d_a_tilde);

struct PhaseEnsembleOptions {
    int oscillators = 1000;
    double t_end = 200;
    double dt = 0.05;
    std::uint64_t seed = 1;
    bool clustered_start = false;  // true: all phases at zero; false: uniform
    int record_stride = 1;         // order parameters kept every this many steps
};

// Order-parameter time series; index n is time t[n].
struct PhaseEnsembleSeries {
    std::vector<double> t;
    std::vector<double> r, psi;    // <e^{i phi}> = R e^{i Psi}
    std::vector<double> r2, psi2;  // <e^{2 i phi}> = R2 e^{i Psi2}
};

// Euler-Maruyama integration of the phase ensemble with the mean field
// recomputed self-consistently every step. The first record is the initial
// condition.
PhaseEnsembleSeries simulate_phase_ensemble(const PhaseModelCoefficients& c,
                                            const PhaseEnsembleOptions& opts);

// Linear growth rate of the first angular harmonic of the incoherent
// (uniform-phase) state: -i (Omega - K/2) - (D_phi - K1/2). A positive
// real part marks the synchronization instability; it vanishes exactly at
// the roots reported by predict_threshold.
std::complex<double> incoherence_growth_rate(const PhaseModelCoefficients& c);

}  // namespace omarray
