#pragma once

#include <complex>
#include <vector>

#include "omarray/operators.hpp"

namespace omarray {

// Expectation-value record of a single mean-field evolution.
// The time grid is uniform and strictly increasing.
struct QuantumTrajectory {
    std::vector<double> t;
    std::vector<Complex> mean_a;   // <a>
    std::vector<Complex> mean_b;   // <b>
    std::vector<double> n_photon;  // <a'a>
    std::vector<double> n_phonon;  // <b'b>
    bool truncation_warning = false;
    double worst_truncation = 0.0; // largest top-level population seen

    size_t size() const { return t.size(); }
    double dt_sample() const { return t.size() > 1 ? t[1] - t[0] : 0.0; }
};

enum class FitStatus {
    converged,      // r drift between consecutive windows below tolerance
    not_converged,  // dynamics still drifting at the end of the data
    too_short,      // fewer than two analysis windows available
};

// Decomposition <b>(t) = b_offset + r e^{-i omega_eff t} on the trajectory tail.
struct LimitCycleFit {
    Complex b_offset{0.0, 0.0};
    double r = 0.0;
    double omega_eff = 0.0;
    double residual = 0.0;   // rms misfit of the model on the last window
    double r_drift = 0.0;    // relative r change between the last two windows
    bool flagged = false;    // residual > 10% of r while r is meaningful
    FitStatus status = FitStatus::too_short;

    bool converged() const { return status == FitStatus::converged; }
};

// Single-window harmonic fit y(t) ~ offset + amp e^{-i omega t}.
// Frequency from the discrete-Fourier peak of the de-meaned series, refined
// by minimizing the least-squares residual; both rotation senses are scanned.
struct HarmonicFit {
    Complex offset{0.0, 0.0};
    Complex amp{0.0, 0.0};
    double omega = 0.0;
    double residual = 0.0; // rms
};
HarmonicFit fit_complex_harmonic(const double* t, const Complex* y, size_t n);

// Fit the last two windows (each window_periods mechanical periods, period
// 2*pi/omega_unit) of the mean_b series and report the tail-window fit with
// convergence judged by the relative r drift between the windows.
LimitCycleFit fit_limit_cycle(const QuantumTrajectory& traj, double window_periods = 20.0,
                              double omega_unit = 1.0, double r_rel_tol = 1e-3);
LimitCycleFit fit_limit_cycle(const std::vector<double>& t, const std::vector<Complex>& y,
                              double window_periods = 20.0, double omega_unit = 1.0,
                              double r_rel_tol = 1e-3);

// Amplitude of the oscillating component of a real series at a known
// frequency: least-squares fit y ~ c0 + c*cos(omega t) + s*sin(omega t),
// returns hypot(c, s). omega <= 0 returns 0.
double real_oscillation_amplitude(const std::vector<double>& t, const std::vector<double>& y,
                                  double omega);

} // namespace omarray
