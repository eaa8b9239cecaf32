#include "omarray/phase_ensemble.hpp"

#include <cmath>

#include "omarray/errors.hpp"
#include "omarray/rng.hpp"

namespace omarray {

PhaseModelCoefficients phase_model_coefficients(double K, int z,
                                                const HopfCalibration& calib) {
    const SidebandDiffusion d = sideband_diffusions(calib);
    return phase_model_coefficients(K, z, calib, d.d_phi_tilde, d.d_a_tilde);
}

PhaseModelCoefficients phase_model_coefficients(double K, int z,
                                                const HopfCalibration& calib,
                                                double d_phi_tilde,
                                                double d_a_tilde) {
    const EffectiveCouplings ec = effective_couplings(K, z, calib);
    PhaseModelCoefficients c;
    c.k = K;
    c.k1 = ec.k1;
    c.k2 = ec.k2;
    c.d_phi_tilde = d_phi_tilde;
    c.d_a_tilde = d_a_tilde;
    c.d_phi = diffusion_constant(calib, d_phi_tilde, d_a_tilde);
    c.omega = calib.omega_at_abar;
    return c;
}

PhaseEnsembleSeries simulate_phase_ensemble(const PhaseModelCoefficients& c,
                                            const PhaseEnsembleOptions& opts) {
    if (opts.oscillators < 2)
        throw invalid_params("phase ensemble needs at least two oscillators");
    if (opts.dt <= 0 || opts.t_end <= 0)
        throw invalid_params("time step and horizon must be positive");
    if (opts.record_stride < 1)
        throw invalid_params("record stride must be positive");
    if (c.d_phi < 0) throw invalid_params("phase diffusion must be non-negative");

    const int n = opts.oscillators;
    std::vector<double> phi(n);
    if (!opts.clustered_start) {
        for (int j = 0; j < n; ++j)
            phi[j] = 2.0 * M_PI * uniform_pair(opts.seed, 0, 0, j, 1).u2;
    }

    const long steps = std::lround(std::ceil(opts.t_end / opts.dt));
    PhaseEnsembleSeries out;
    const long records = steps / opts.record_stride + 1;
    out.t.reserve(records);
    out.r.reserve(records);
    out.psi.reserve(records);
    out.r2.reserve(records);
    out.psi2.reserve(records);

    const double noise_amp = std::sqrt(2.0 * c.d_phi * opts.dt);

    double mf_r = 0, mf_psi = 0, mf_r2 = 0, mf_psi2 = 0;
    auto mean_field = [&]() {
        std::complex<double> m1(0, 0), m2(0, 0);
        for (int j = 0; j < n; ++j) {
            const double s = std::sin(phi[j]), co = std::cos(phi[j]);
            m1 += std::complex<double>(co, s);
            // e^{2 i phi} from the same sin/cos pair
            m2 += std::complex<double>(co * co - s * s, 2.0 * s * co);
        }
        m1 /= static_cast<double>(n);
        m2 /= static_cast<double>(n);
        // rounding can push the modulus of a mean of unit phasors just
        // past one
        mf_r = std::min(std::abs(m1), 1.0);
        mf_psi = std::arg(m1);
        mf_r2 = std::min(std::abs(m2), 1.0);
        mf_psi2 = std::arg(m2);
    };

    for (long step = 0; step <= steps; ++step) {
        mean_field();
        if (step % opts.record_stride == 0) {
            out.t.push_back(step * opts.dt);
            out.r.push_back(mf_r);
            out.psi.push_back(mf_psi);
            out.r2.push_back(mf_r2);
            out.psi2.push_back(mf_psi2);
        }
        if (step == steps) break;

        for (int j = 0; j < n; ++j) {
            const double v =
                -c.omega + c.k * mf_r * std::cos(mf_psi - phi[j]) +
                c.k1 * mf_r * std::sin(mf_psi - phi[j]) +
                c.k2 * mf_r * mf_r * std::sin(2.0 * (mf_psi - phi[j])) +
                c.k2 * mf_r * mf_r2 * std::sin(mf_psi2 - mf_psi - phi[j]);
            phi[j] += v * opts.dt;
            if (noise_amp > 0)
                phi[j] += noise_amp *
                          gauss(opts.seed, 0, static_cast<std::uint64_t>(step), j, 0);
        }
    }
    return out;
}

std::complex<double> incoherence_growth_rate(const PhaseModelCoefficients& c) {
    return std::complex<double>(c.k1 / 2.0 - c.d_phi, -(c.omega - c.k / 2.0));
}

}  // namespace omarray
