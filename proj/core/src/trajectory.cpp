#include "omarray/trajectory.hpp"

#include <algorithm>
#include <cmath>

#include "omarray/errors.hpp"

namespace omarray {

namespace {

// Least-squares solve of y ~ c0 + c1 e^{-i w t} at fixed w.
// Returns rms residual; outputs the coefficients.
double solve_two_basis(const double* t, const Complex* y, size_t n, double w,
                       Complex& c0, Complex& c1) {
    // Normal equations for the basis {1, e^{-iwt}}:
    //   [ n    s  ] [c0]   [ sy  ]
    //   [ s*   n  ] [c1] = [ sey ]
    // with s = sum e^{-iwt}, sy = sum y, sey = sum y e^{+iwt}.
    Complex s = 0.0, sy = 0.0, sey = 0.0;
    for (size_t k = 0; k < n; ++k) {
        const Complex e = std::exp(Complex(0.0, -w * t[k]));
        s += e;
        sy += y[k];
        sey += y[k] * std::conj(e);
    }
    const double nn = static_cast<double>(n);
    const Complex det = nn * nn - s * std::conj(s);
    if (std::abs(det) < 1e-12 * nn * nn) {
        // w*T ~ 0: basis degenerate with the constant; treat as constant fit
        c0 = sy / nn;
        c1 = 0.0;
    } else {
        c0 = (nn * sy - s * sey) / det;
        c1 = (nn * sey - std::conj(s) * sy) / det;
    }
    double ss = 0.0;
    for (size_t k = 0; k < n; ++k) {
        const Complex e = std::exp(Complex(0.0, -w * t[k]));
        ss += std::norm(y[k] - c0 - c1 * e);
    }
    return std::sqrt(ss / nn);
}

} // namespace

HarmonicFit fit_complex_harmonic(const double* t, const Complex* y, size_t n) {
    if (n < 8) throw fit_error("fit_complex_harmonic: need at least 8 samples");
    const double t0 = t[0];
    const double dt = (t[n - 1] - t0) / static_cast<double>(n - 1);
    if (!(dt > 0.0)) throw fit_error("fit_complex_harmonic: time grid not increasing");

    Complex mean = 0.0;
    for (size_t k = 0; k < n; ++k) mean += y[k];
    mean /= static_cast<double>(n);

    double scale = 0.0;
    for (size_t k = 0; k < n; ++k) scale = std::max(scale, std::abs(y[k] - mean));

    HarmonicFit fit;
    if (scale < 1e-14 * std::max(1.0, std::abs(mean))) {
        // Constant signal: no oscillating component.
        fit.offset = mean;
        return fit;
    }

    // Coarse scan: correlation of the de-meaned series with e^{-iwt} on the
    // Fourier grid of the window, both rotation senses.
    const double T = t[n - 1] - t0;
    const double dw = 2.0 * M_PI / T;
    const int kmax = static_cast<int>(n) / 2;
    double best_corr = -1.0;
    double w_peak = 0.0;
    for (int k = -kmax; k <= kmax; ++k) {
        if (k == 0) continue;
        const double w = dw * k;
        Complex corr = 0.0;
        for (size_t j = 0; j < n; ++j)
            corr += (y[j] - mean) * std::exp(Complex(0.0, w * (t[j] - t0)));
        const double a = std::abs(corr);
        if (a > best_corr) {
            best_corr = a;
            w_peak = w;
        }
    }

    // Golden-section refinement of the least-squares residual within one bin
    // on either side of the peak.
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double lo = w_peak - dw, hi = w_peak + dw;
    double w1 = hi - gr * (hi - lo), w2 = lo + gr * (hi - lo);
    Complex c0, c1;
    double f1 = solve_two_basis(t, y, n, w1, c0, c1);
    double f2 = solve_two_basis(t, y, n, w2, c0, c1);
    for (int it = 0; it < 80 && (hi - lo) > 1e-12 * std::max(1.0, std::abs(w_peak)); ++it) {
        if (f1 < f2) {
            hi = w2;
            w2 = w1;
            f2 = f1;
            w1 = hi - gr * (hi - lo);
            f1 = solve_two_basis(t, y, n, w1, c0, c1);
        } else {
            lo = w1;
            w1 = w2;
            f1 = f2;
            w2 = lo + gr * (hi - lo);
            f2 = solve_two_basis(t, y, n, w2, c0, c1);
        }
    }
    const double w_best = 0.5 * (lo + hi);
    fit.residual = solve_two_basis(t, y, n, w_best, c0, c1);
    // c1 is referenced to absolute time: y ~ c0 + c1 e^{-i w t}.
    fit.offset = c0;
    fit.amp = c1;
    fit.omega = w_best;
    return fit;
}

LimitCycleFit fit_limit_cycle(const std::vector<double>& t, const std::vector<Complex>& y,
                              double window_periods, double omega_unit, double r_rel_tol) {
    if (t.size() != y.size()) throw invalid_params("fit_limit_cycle: t and y size mismatch");
    LimitCycleFit out;
    if (t.size() < 16) return out; // too_short

    const double dt = t[1] - t[0];
    const double window_T = window_periods * 2.0 * M_PI / omega_unit;
    const size_t win = static_cast<size_t>(std::floor(window_T / dt)) + 1;
    if (win < 8 || t.size() < 2 * win) return out; // too_short

    const size_t n = t.size();
    // Shift each window's time to its own origin; amp is re-referenced inside.
    const HarmonicFit tail = fit_complex_harmonic(t.data() + (n - win), y.data() + (n - win), win);
    const HarmonicFit prev =
        fit_complex_harmonic(t.data() + (n - 2 * win), y.data() + (n - 2 * win), win);

    out.b_offset = tail.offset;
    out.r = std::abs(tail.amp);
    out.omega_eff = out.r > 0.0 ? std::abs(tail.omega) : 0.0;
    out.residual = tail.residual;

    const double r_floor = 1e-8 * std::max(1.0, std::abs(tail.offset));
    const double r_big = std::max(out.r, std::abs(prev.amp));
    if (r_big < r_floor) {
        out.r_drift = 0.0;
        out.r = 0.0;
        out.omega_eff = 0.0;
    } else {
        out.r_drift = std::abs(out.r - std::abs(prev.amp)) / r_big;
    }
    out.status = out.r_drift < r_rel_tol ? FitStatus::converged : FitStatus::not_converged;
    out.flagged = out.r > r_floor && out.residual > 0.1 * out.r;
    return out;
}

LimitCycleFit fit_limit_cycle(const QuantumTrajectory& traj, double window_periods,
                              double omega_unit, double r_rel_tol) {
    return fit_limit_cycle(traj.t, traj.mean_b, window_periods, omega_unit, r_rel_tol);
}

double real_oscillation_amplitude(const std::vector<double>& t, const std::vector<double>& y,
                                  double omega) {
    if (t.size() != y.size()) throw invalid_params("real_oscillation_amplitude: size mismatch");
    if (!(omega > 0.0) || t.size() < 8) return 0.0;
    // Normal equations for y ~ a0 + c cos(wt) + s sin(wt).
    const size_t n = t.size();
    double M[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
    double rhs[3] = {0, 0, 0};
    for (size_t k = 0; k < n; ++k) {
        const double c = std::cos(omega * t[k]), s = std::sin(omega * t[k]);
        const double b[3] = {1.0, c, s};
        for (int i = 0; i < 3; ++i) {
            rhs[i] += b[i] * y[k];
            for (int j = 0; j < 3; ++j) M[i][j] += b[i] * b[j];
        }
    }
    // 3x3 Gaussian elimination with partial pivoting.
    int piv[3] = {0, 1, 2};
    for (int col = 0; col < 3; ++col) {
        int best = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(M[piv[r]][col]) > std::abs(M[piv[best]][col])) best = r;
        std::swap(piv[col], piv[best]);
        const double d = M[piv[col]][col];
        if (std::abs(d) < 1e-14 * static_cast<double>(n)) return 0.0;
        for (int r = col + 1; r < 3; ++r) {
            const double f = M[piv[r]][col] / d;
            for (int j = col; j < 3; ++j) M[piv[r]][j] -= f * M[piv[col]][j];
            rhs[piv[r]] -= f * rhs[piv[col]];
        }
    }
    double x[3];
    for (int col = 2; col >= 0; --col) {
        double acc = rhs[piv[col]];
        for (int j = col + 1; j < 3; ++j) acc -= M[piv[col]][j] * x[j];
        x[col] = acc / M[piv[col]][col];
    }
    return std::hypot(x[1], x[2]);
}

} // namespace omarray
