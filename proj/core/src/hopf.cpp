#include "omarray/hopf.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

#include "omarray/errors.hpp"

namespace omarray {

namespace {

using Complex = std::complex<double>;

constexpr double kTwoPi = 2.0 * M_PI;

struct CycleAverages {
    double sin_weighted = 0;  // <|alpha|^2 sin(Omega t)>_T
    double cos_weighted = 0;  // <|alpha|^2 cos(Omega t)>_T
    double photons = 0;       // <|alpha|^2>_T
};

// Drives the cavity under the prescribed motion x(t) = 2A cos(Omega t) to
// its periodic attractor (10/kappa transient, starting from the adiabatic
// solution of the initial detuning to shrink the transient) and averages
// over 20 periods.
CycleAverages cycle_averages(const SystemParams& p, double amplitude) {
    const double period = kTwoPi / p.omega;
    const int steps_per_period = 256;
    const double dt = period / steps_per_period;

    const int transient_steps =
        static_cast<int>(std::ceil(10.0 / p.kappa / dt));
    const int average_periods = 20;

    auto drift = [&](Complex a, double t) {
        const double x = 2.0 * amplitude * std::cos(p.omega * t);
        return Complex(-p.kappa / 2.0, p.delta + p.g0 * x) * a +
               Complex(0.0, -p.alpha_L);
    };

    // adiabatic start: the fixed point of the instantaneous detuning
    Complex a = Complex(0.0, p.alpha_L) /
                Complex(-p.kappa / 2.0, p.delta + 2.0 * p.g0 * amplitude);
    double t = 0;
    auto rk4 = [&]() {
        const Complex k1 = drift(a, t);
        const Complex k2 = drift(a + 0.5 * dt * k1, t + 0.5 * dt);
        const Complex k3 = drift(a + 0.5 * dt * k2, t + 0.5 * dt);
        const Complex k4 = drift(a + dt * k3, t + dt);
        a += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += dt;
    };

    for (int k = 0; k < transient_steps; ++k) rk4();

    // equispaced samples of a periodic signal: the plain average is
    // spectrally accurate over whole periods
    CycleAverages avg;
    const long n = static_cast<long>(average_periods) * steps_per_period;
    for (long k = 0; k < n; ++k) {
        const double w = std::norm(a);
        avg.sin_weighted += w * std::sin(p.omega * t);
        avg.cos_weighted += w * std::cos(p.omega * t);
        avg.photons += w;
        rk4();
    }
    avg.sin_weighted /= static_cast<double>(n);
    avg.cos_weighted /= static_cast<double>(n);
    avg.photons /= static_cast<double>(n);
    return avg;
}

struct CellResponse {
    double gamma_opt = 0;
    double omega_eff = 0;
    double photons = 0;
};

CellResponse respond(const SystemParams& p, double amplitude) {
    const CycleAverages avg = cycle_averages(p, amplitude);
    CellResponse r;
    r.gamma_opt = 2.0 * p.g0 * avg.sin_weighted / amplitude;
    r.omega_eff = p.omega - p.g0 * avg.cos_weighted / amplitude;
    r.photons = avg.photons;
    return r;
}

}  // namespace

HopfCalibration calibrate_hopf(const SystemParams& p,
                               const std::vector<double>& amplitude_grid) {
    SystemParams cell = p;
    cell.K = 0;
    cell.J = 0;
    cell.validate();
    if (amplitude_grid.size() < 2)
        throw invalid_params("amplitude grid needs at least two points");
    for (size_t k = 0; k < amplitude_grid.size(); ++k) {
        if (amplitude_grid[k] <= 0)
            throw invalid_params("amplitude grid must be strictly positive");
        if (k > 0 && amplitude_grid[k] <= amplitude_grid[k - 1])
            throw invalid_params("amplitude grid must be strictly increasing");
    }

    HopfCalibration calib;
    calib.params = cell;
    calib.amplitude = amplitude_grid;
    calib.gamma_opt.resize(amplitude_grid.size());
    calib.omega_eff.resize(amplitude_grid.size());
    calib.mean_photons.resize(amplitude_grid.size());

    for (size_t k = 0; k < amplitude_grid.size(); ++k) {
        const CellResponse r = respond(cell, amplitude_grid[k]);
        calib.gamma_opt[k] = r.gamma_opt;
        calib.omega_eff[k] = r.omega_eff;
        calib.mean_photons[k] = r.photons;
    }

    // stable balance: net damping crosses zero from gain to loss
    auto net = [&](double a) { return cell.gamma + respond(cell, a).gamma_opt; };
    size_t cross = amplitude_grid.size();
    for (size_t k = 0; k + 1 < amplitude_grid.size(); ++k) {
        const double lo = cell.gamma + calib.gamma_opt[k];
        const double hi = cell.gamma + calib.gamma_opt[k + 1];
        if (lo < 0.0 && hi >= 0.0) {
            cross = k;
            break;
        }
    }
    if (cross == amplitude_grid.size()) {
        calib.status = HopfStatus::no_self_oscillation;
        return calib;
    }

    double lo = amplitude_grid[cross], hi = amplitude_grid[cross + 1];
    for (int iter = 0; iter < 60 && hi - lo > 1e-10 * hi; ++iter) {
        const double mid = 0.5 * (lo + hi);
        (net(mid) < 0.0 ? lo : hi) = mid;
    }
    calib.a_bar = 0.5 * (lo + hi);
    calib.status = HopfStatus::ok;

    const CellResponse at_root = respond(cell, calib.a_bar);
    calib.omega_at_abar = at_root.omega_eff;
    calib.photons_at_abar = at_root.photons;

    // linearization of dA/dt = -(Gamma + Gamma_opt(A)) A / 2 around A_bar
    const double h = 1e-3 * calib.a_bar;
    const CellResponse up = respond(cell, calib.a_bar + h);
    const CellResponse dn = respond(cell, calib.a_bar - h);
    const double g_up = (cell.gamma + up.gamma_opt) * (calib.a_bar + h);
    const double g_dn = (cell.gamma + dn.gamma_opt) * (calib.a_bar - h);
    calib.gamma = 0.5 * (g_up - g_dn) / (2.0 * h);
    calib.d_omega = calib.a_bar * (up.omega_eff - dn.omega_eff) / (2.0 * h);
    return calib;
}

EffectiveCouplings effective_couplings(double K, int z,
                                       const HopfCalibration& calib) {
    if (z < 1) throw invalid_params("coordination number must be positive");
    if (calib.status != HopfStatus::ok || calib.gamma <= 0)
        throw invalid_state(
            "effective couplings need a stable limit cycle with gamma > 0");
    EffectiveCouplings c;
    c.k2 = K * K / (2.0 * static_cast<double>(z) * z * calib.gamma);
    c.k1 = K * calib.d_omega / calib.gamma - c.k2;
    return c;
}

SidebandDiffusion sideband_diffusions(const HopfCalibration& calib) {
    if (calib.status != HopfStatus::ok)
        throw invalid_state("sideband diffusion needs a limit cycle");
    const SystemParams& p = calib.params;
    const double gamma_opt =
        4.0 * p.g0 * p.g0 * calib.photons_at_abar / p.kappa;
    SidebandDiffusion d;
    d.d_phi_tilde = 0.5 * (p.gamma + gamma_opt);
    d.d_a_tilde = d.d_phi_tilde;
    return d;
}

double diffusion_constant(const HopfCalibration& calib, double d_phi_tilde,
                          double d_a_tilde) {
    if (d_phi_tilde < 0 || d_a_tilde < 0)
        throw invalid_params("quadrature diffusions must be non-negative");
    if (calib.status != HopfStatus::ok || calib.a_bar <= 0)
        throw undefined_statistics(
            "phase diffusion is undefined without a finite-amplitude cycle");
    if (calib.gamma <= 0)
        throw invalid_state("amplitude relaxation must be positive");
    const double shear = calib.d_omega / calib.gamma;
    return (d_phi_tilde + shear * shear * d_a_tilde) /
           (calib.a_bar * calib.a_bar);
}

ThresholdPrediction predict_threshold(int z, const HopfCalibration& calib,
                                      double d_phi) {
    if (z < 1) throw invalid_params("coordination number must be positive");
    if (d_phi < 0) throw invalid_params("phase diffusion must be non-negative");
    if (calib.status != HopfStatus::ok || calib.gamma <= 0)
        throw invalid_state("threshold prediction needs a stable limit cycle");

    ThresholdPrediction res;
    if (calib.d_omega <= 0) {
        res.status = ThresholdStatus::no_threshold;
        return res;
    }
    const double zz = static_cast<double>(z) * z;
    const double disc =
        zz * zz * calib.d_omega * calib.d_omega - 4.0 * zz * calib.gamma * d_phi;
    if (disc < 0) {
        res.status = ThresholdStatus::never_synchronizes;
        return res;
    }
    const double root = std::sqrt(disc);
    res.status = ThresholdStatus::ok;
    res.k_onset = zz * calib.d_omega - root;
    res.k_reentry = zz * calib.d_omega + root;
    return res;
}

}  // namespace omarray
