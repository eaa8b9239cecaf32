#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "omarray/errors.hpp"
#include "omarray/hopf.hpp"
#include "omarray/langevin.hpp"
#include "omarray/lattice.hpp"
#include "omarray/phase_ensemble.hpp"

using namespace omarray;

namespace {

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = a + (b - a) * i / (n - 1);
    return g;
}

SystemParams cell_params(double delta) {
    SystemParams p;
    p.delta = delta;
    p.omega = 1.0;
    p.g0 = 0.3;
    p.alpha_L = 0.33;
    p.kappa = 0.3;
    p.gamma = 0.074;
    return p;
}

// A synthetic calibration for the algebraic layers that do not depend on
// the cavity response.
HopfCalibration synthetic_calib(double a_bar, double gamma, double d_omega) {
    HopfCalibration c;
    c.status = HopfStatus::ok;
    c.a_bar = a_bar;
    c.gamma = gamma;
    c.d_omega = d_omega;
    c.omega_at_abar = 1.0;
    c.photons_at_abar = 1.0;
    c.params = cell_params(1.0);
    return c;
}

}  // namespace

TEST_CASE("small-amplitude optical damping matches the linear response") {
    const SystemParams p = cell_params(1.0);
    const HopfCalibration c = calibrate_hopf(p, {1e-3, 2e-3});

    const double n0 = p.alpha_L * p.alpha_L /
                      (p.delta * p.delta + p.kappa * p.kappa / 4.0);
    const double hk = p.kappa / 2.0;
    const double closed =
        2.0 * p.g0 * p.g0 * n0 * hk *
        (1.0 / (hk * hk + (p.omega + p.delta) * (p.omega + p.delta)) -
         1.0 / (hk * hk + (p.omega - p.delta) * (p.omega - p.delta)));
    CHECK(c.gamma_opt[0] ==
          doctest::Approx(closed).epsilon(5e-3));
    CHECK(c.gamma_opt[1] == doctest::Approx(closed).epsilon(5e-3));
}

TEST_CASE("optical damping flips sign between the two sidebands") {
    const HopfCalibration blue = calibrate_hopf(cell_params(1.0), {1e-3, 2e-3});
    const HopfCalibration red = calibrate_hopf(cell_params(-1.0), {1e-3, 2e-3});
    CHECK(blue.gamma_opt[0] < 0.0);  // amplification
    CHECK(red.gamma_opt[0] > 0.0);   // cooling
    CHECK(std::abs(blue.gamma_opt[0]) ==
          doctest::Approx(std::abs(red.gamma_opt[0])).epsilon(1e-3));
}

TEST_CASE("no optomechanical gain means no limit cycle") {
    SystemParams p = cell_params(1.0);
    p.g0 = 0;
    const HopfCalibration c = calibrate_hopf(p, linspace(0.1, 3.0, 10));
    CHECK(c.status == HopfStatus::no_self_oscillation);
    CHECK(c.a_bar == 0.0);
    for (size_t k = 0; k < c.amplitude.size(); ++k) {
        CHECK(c.gamma_opt[k] == 0.0);
        CHECK(c.omega_eff[k] == doctest::Approx(p.omega).epsilon(1e-12));
    }
}

TEST_CASE("red detuning cools and never self-oscillates") {
    const HopfCalibration c =
        calibrate_hopf(cell_params(-1.0), linspace(0.1, 3.0, 20));
    CHECK(c.status == HopfStatus::no_self_oscillation);
    for (double g : c.gamma_opt) CHECK(g > 0.0);
    CHECK_THROWS_AS(effective_couplings(0.1, 4, c), invalid_state);
    CHECK_THROWS_AS(sideband_diffusions(c), invalid_state);
    CHECK_THROWS_AS(diffusion_constant(c, 0.1, 0.1), undefined_statistics);
}

TEST_CASE("calibration grid is validated") {
    const SystemParams p = cell_params(1.0);
    CHECK_THROWS_AS(calibrate_hopf(p, {1.0}), invalid_params);
    CHECK_THROWS_AS(calibrate_hopf(p, {0.0, 1.0}), invalid_params);
    CHECK_THROWS_AS(calibrate_hopf(p, {2.0, 1.0}), invalid_params);
}

TEST_CASE("blue-detuned cell locates a stable limit cycle") {
    const SystemParams p = cell_params(0.91);
    const HopfCalibration c = calibrate_hopf(p, linspace(0.05, 4.0, 60));
    REQUIRE(c.status == HopfStatus::ok);
    CHECK(c.a_bar > 1.5);
    CHECK(c.a_bar < 2.5);
    CHECK(c.gamma > 0.0);

    // the balance condition holds at the refined root
    const HopfCalibration probe =
        calibrate_hopf(p, {0.95 * c.a_bar, c.a_bar, 1.05 * c.a_bar});
    CHECK(std::abs(p.gamma + probe.gamma_opt[1]) < 1e-7);
    CHECK(probe.a_bar == doctest::Approx(c.a_bar).epsilon(1e-6));

    // the frequency at the cycle agrees with the full semiclassical cell
    LatticeConfig cfg;
    cfg.topology = Topology::square;
    cfg.n = 1;
    cfg.boundary = Boundary::open;
    const double measured = measure_lattice_frequency(cfg, p, 600.0);
    REQUIRE(measured > 0.0);
    CHECK(std::abs(measured - c.omega_at_abar) / measured < 0.05);
}

TEST_CASE("effective couplings follow the reduced-model algebra") {
    const HopfCalibration c = synthetic_calib(2.0, 0.1, 0.05);

    const EffectiveCouplings zero = effective_couplings(0.0, 4, c);
    CHECK(zero.k1 == 0.0);
    CHECK(zero.k2 == 0.0);

    // single-neighbour form (dOmega - K/2) K / gamma
    const double K = 0.07;
    const EffectiveCouplings one = effective_couplings(K, 1, c);
    CHECK(one.k1 ==
          doctest::Approx((c.d_omega - K / 2.0) * K / c.gamma).epsilon(1e-12));

    // quadratic term scales with the inverse square of the coordination
    const EffectiveCouplings three = effective_couplings(K, 3, c);
    CHECK(one.k2 == doctest::Approx(9.0 * three.k2).epsilon(1e-12));

    // locking channel closes at K = 2 z^2 dOmega
    const double k_star = 2.0 * 16.0 * c.d_omega;
    CHECK(effective_couplings(0.99 * k_star, 4, c).k1 > 0.0);
    CHECK(effective_couplings(1.01 * k_star, 4, c).k1 < 0.0);

    CHECK_THROWS_AS(effective_couplings(0.1, 0, c), invalid_params);
    HopfCalibration flat = c;
    flat.gamma = 0.0;
    CHECK_THROWS_AS(effective_couplings(0.1, 4, flat), invalid_state);
}

TEST_CASE("phase diffusion composes the quadrature noise floors") {
    HopfCalibration c = synthetic_calib(2.0, 0.1, 0.05);

    // no amplitude-to-phase conversion
    CHECK(diffusion_constant(c, 0.03, 0.0) ==
          doctest::Approx(0.03 / 4.0).epsilon(1e-12));

    // inverse-square amplitude scaling
    const double base = diffusion_constant(c, 0.03, 0.02);
    HopfCalibration wide = c;
    wide.a_bar = 4.0;
    CHECK(diffusion_constant(wide, 0.03, 0.02) ==
          doctest::Approx(base / 4.0).epsilon(1e-12));

    // shear conversion term
    const double shear = c.d_omega / c.gamma;
    CHECK(base ==
          doctest::Approx((0.03 + shear * shear * 0.02) / 4.0).epsilon(1e-12));

    CHECK_THROWS_AS(diffusion_constant(c, -0.1, 0.0), invalid_params);

    // sideband estimate recomputed from the stored cell
    const SidebandDiffusion d = sideband_diffusions(c);
    const SystemParams& p = c.params;
    const double expected =
        0.5 * (p.gamma + 4.0 * p.g0 * p.g0 * c.photons_at_abar / p.kappa);
    CHECK(d.d_phi_tilde == doctest::Approx(expected).epsilon(1e-12));
    CHECK(d.d_a_tilde == d.d_phi_tilde);
}

TEST_CASE("threshold prediction delimits the synchronization window") {
    const HopfCalibration c = synthetic_calib(2.0, 0.1, 0.05);

    // noiseless limit: any coupling locks, up to the reentrant edge
    const ThresholdPrediction free = predict_threshold(2, c, 0.0);
    REQUIRE(free.status == ThresholdStatus::ok);
    CHECK(free.k_onset == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(free.k_reentry == doctest::Approx(2.0 * 4.0 * c.d_omega).epsilon(1e-12));

    const ThresholdPrediction mid = predict_threshold(2, c, 1e-3);
    REQUIRE(mid.status == ThresholdStatus::ok);
    CHECK(mid.k_onset > 0.0);
    CHECK(mid.k_onset < mid.k_reentry);

    // each root is marginal for the incoherent state
    for (double K : {mid.k_onset, mid.k_reentry}) {
        const EffectiveCouplings ec = effective_couplings(K, 2, c);
        PhaseModelCoefficients pmc;
        pmc.k = K;
        pmc.k1 = ec.k1;
        pmc.d_phi = 1e-3;
        CHECK(std::abs(incoherence_growth_rate(pmc).real()) < 1e-12);
    }

    CHECK(predict_threshold(2, c, 10.0).status ==
          ThresholdStatus::never_synchronizes);

    HopfCalibration red = c;
    red.d_omega = -0.05;
    CHECK(predict_threshold(2, red, 1e-3).status == ThresholdStatus::no_threshold);

    CHECK_THROWS_AS(predict_threshold(0, c, 1e-3), invalid_params);
    CHECK_THROWS_AS(predict_threshold(2, c, -1e-3), invalid_params);
}

TEST_CASE("incoherence growth rate formula") {
    PhaseModelCoefficients c;
    c.k = 0.3;
    c.k1 = 0.08;
    c.d_phi = 0.04;
    c.omega = 1.2;
    const std::complex<double> rate = incoherence_growth_rate(c);
    CHECK(rate.real() == doctest::Approx(0.0).epsilon(1e-15));  // marginal
    CHECK(rate.imag() == doctest::Approx(-(1.2 - 0.15)).epsilon(1e-12));

    c.k1 = 0.0;
    CHECK(incoherence_growth_rate(c).real() == doctest::Approx(-0.04));
}

TEST_CASE("coefficient assembly matches the manual composition") {
    const SystemParams p = cell_params(0.91);
    const HopfCalibration c = calibrate_hopf(p, linspace(0.5, 4.0, 30));
    REQUIRE(c.status == HopfStatus::ok);

    const double K = 0.1;
    const PhaseModelCoefficients pmc = phase_model_coefficients(K, 4, c);
    const EffectiveCouplings ec = effective_couplings(K, 4, c);
    const SidebandDiffusion d = sideband_diffusions(c);
    CHECK(pmc.k == K);
    CHECK(pmc.k1 == ec.k1);
    CHECK(pmc.k2 == ec.k2);
    CHECK(pmc.d_phi ==
          doctest::Approx(diffusion_constant(c, d.d_phi_tilde, d.d_a_tilde)));
    CHECK(pmc.omega == c.omega_at_abar);

    const PhaseModelCoefficients manual =
        phase_model_coefficients(K, 4, c, 0.2, 0.1);
    CHECK(manual.d_phi == doctest::Approx(diffusion_constant(c, 0.2, 0.1)));
}

TEST_CASE("noiseless clustered ensemble stays locked") {
    PhaseModelCoefficients c;
    c.k = 0.2;
    c.k1 = 0.1;
    c.k2 = 0.01;
    c.d_phi = 0.0;
    c.omega = 1.0;
    PhaseEnsembleOptions o;
    o.oscillators = 200;
    o.t_end = 100;
    o.dt = 0.05;
    o.clustered_start = true;
    const PhaseEnsembleSeries s = simulate_phase_ensemble(c, o);
    CHECK(s.r.front() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.r.back() > 0.999);
    for (double r : s.r) {
        CHECK(r >= 0.0);
        CHECK(r <= 1.0);
    }
}

TEST_CASE("free phase diffusion relaxes to the finite-size floor") {
    PhaseModelCoefficients c;
    c.d_phi = 0.05;
    PhaseEnsembleOptions o;
    o.oscillators = 400;
    o.t_end = 200;
    o.dt = 0.05;
    o.clustered_start = true;
    o.record_stride = 20;
    const PhaseEnsembleSeries s = simulate_phase_ensemble(c, o);
    CHECK(s.r.front() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.r.back() < 0.15);  // floor is ~1/sqrt(N) = 0.05
}

TEST_CASE("uniform start sits at the order-parameter floor") {
    PhaseModelCoefficients c;
    c.d_phi = 0.01;
    PhaseEnsembleOptions o;
    o.oscillators = 2000;
    o.t_end = 1;
    o.dt = 0.05;
    o.seed = 3;
    const PhaseEnsembleSeries s = simulate_phase_ensemble(c, o);
    CHECK(s.r.front() < 4.0 / std::sqrt(2000.0));
    CHECK(s.r2.front() < 4.0 / std::sqrt(2000.0));
}

TEST_CASE("stationary order parameter separates across the threshold") {
    PhaseEnsembleOptions o;
    o.oscillators = 1000;
    o.t_end = 400;
    o.dt = 0.05;
    o.record_stride = 20;
    o.seed = 5;

    auto tail_mean = [&](double k1) {
        PhaseModelCoefficients c;
        c.k = 0.1;
        c.k1 = k1;
        c.k2 = 0.005;
        c.d_phi = 0.02;
        c.omega = 1.0;
        const PhaseEnsembleSeries s = simulate_phase_ensemble(c, o);
        double acc = 0;
        int n = 0;
        for (size_t i = 0; i < s.t.size(); ++i)
            if (s.t[i] > 200) {
                acc += s.r[i];
                ++n;
            }
        return acc / n;
    };

    CHECK(tail_mean(0.08) > 0.5);   // K1 > 2 D_phi locks
    CHECK(tail_mean(0.01) < 0.12);  // K1 < 2 D_phi stays incoherent
}

TEST_CASE("order parameter grows at the predicted linear rate") {
    PhaseModelCoefficients c;
    c.k1 = 0.12;
    c.d_phi = 0.02;
    PhaseEnsembleOptions o;
    o.oscillators = 4000;
    o.t_end = 260;
    o.dt = 0.05;
    o.record_stride = 10;
    o.seed = 1;
    const PhaseEnsembleSeries s = simulate_phase_ensemble(c, o);

    // log-linear fit of R(t) through the clean exponential window
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (size_t i = 0; i < s.t.size(); ++i) {
        if (s.r[i] < 0.047 || s.r[i] > 0.3) continue;
        const double y = std::log(s.r[i]);
        sx += s.t[i];
        sy += y;
        sxx += s.t[i] * s.t[i];
        sxy += s.t[i] * y;
        ++n;
    }
    REQUIRE(n > 20);
    const double rate = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double predicted = incoherence_growth_rate(c).real();
    CHECK(predicted == doctest::Approx(0.04).epsilon(1e-12));
    CHECK(std::abs(rate - predicted) / predicted < 0.2);
    CHECK(s.r.back() > 0.8);  // saturates well above the floor
}

TEST_CASE("phase ensemble rejects invalid setups and is reproducible") {
    PhaseModelCoefficients c;
    c.d_phi = 0.01;
    PhaseEnsembleOptions o;
    o.oscillators = 1;
    CHECK_THROWS_AS(simulate_phase_ensemble(c, o), invalid_params);
    o.oscillators = 100;
    o.dt = 0;
    CHECK_THROWS_AS(simulate_phase_ensemble(c, o), invalid_params);
    o.dt = 0.05;
    o.record_stride = 0;
    CHECK_THROWS_AS(simulate_phase_ensemble(c, o), invalid_params);
    o.record_stride = 1;
    c.d_phi = -1;
    CHECK_THROWS_AS(simulate_phase_ensemble(c, o), invalid_params);

    c.d_phi = 0.01;
    o.t_end = 20;
    const PhaseEnsembleSeries a = simulate_phase_ensemble(c, o);
    const PhaseEnsembleSeries b = simulate_phase_ensemble(c, o);
    CHECK(a.r == b.r);
    CHECK(a.psi == b.psi);
    o.seed = 2;
    const PhaseEnsembleSeries d = simulate_phase_ensemble(c, o);
    CHECK(a.r != d.r);
}
