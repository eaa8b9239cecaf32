#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "omarray/lattice.hpp"
#include "omarray/params.hpp"

namespace omarray {

// Semiclassical Langevin dynamics of coupled cells on a finite lattice.
// Per site the amplitudes obey
//
//   d beta_i  = [(-i Omega - Gamma/2) beta_i + i g0 |alpha_i|^2
//                + i (K/z) sum_<ij> beta_j] dt
//                + sqrt(Gamma/2) sqrt(2 n_th + 1) dW_beta
//   d alpha_i = [(i Delta + i g0 (beta_i + beta_i*) - kappa/2) alpha_i
//                - i alpha_L] dt + sqrt(kappa/2) dW_alpha
//
// with independent standard complex Wiener increments per site and field,
// <dW dW*> = dt split equally over the quadratures. The sqrt(2 n_th + 1)
// factor is the classical fluctuation-dissipation weight; the bath-quantum
// reading would use sqrt(2 n_th) instead, and the two agree for n_th >> 1.
// Optical hopping has no place in these equations, so J != 0 is rejected
// rather than silently dropped.

using Complex = std::complex<double>;

struct LatticeState {
    double t = 0;
    std::uint64_t step = 0;  // completed integrator steps, indexes the noise
    std::vector<Complex> alpha;
    std::vector<Complex> beta;

    void validate() const;  // throws invalid_state on non-finite entries
};

struct NoiseSpec {
    std::uint64_t seed = 1;
    std::uint64_t realization = 0;
    bool enabled = true;  // disabled gives the deterministic drift flow
};

// Precomputes couplings for repeated stepping. Stateless across calls
// except for scratch buffers, hence one engine per thread.
class LangevinEngine {
  public:
    LangevinEngine(const SystemParams& p, const Lattice& lat);

    // One stochastic Runge-Kutta step: classical RK4 on the drift with the
    // Wiener increment frozen across substages and applied as a constant
    // forcing. dt must satisfy dt <= 0.02 * 2 pi / Omega and dt * kappa <= 0.2.
    void step(LatticeState& s, double dt, const NoiseSpec& noise) const;

    const Lattice& lattice() const { return lat_; }
    const SystemParams& params() const { return p_; }

    // Fresh state at t = 0: dark cavity, mechanical amplitudes drawn
    // uniformly from the disk |beta| <= radius to break phase symmetry.
    LatticeState initial_state(const NoiseSpec& noise, double radius = 0.1) const;

  private:
    SystemParams p_;
    const Lattice& lat_;
    double kz_;  // K / z, zero when the graph has no edges
    mutable std::vector<Complex> fa_[4], fb_[4];  // substage slopes
    mutable std::vector<Complex> ya_, yb_, xa_, xb_;

    void drift(const std::vector<Complex>& a, const std::vector<Complex>& b,
               std::vector<Complex>& da, std::vector<Complex>& db) const;
};

// Convenience wrapper for single steps in tests and exploratory code.
LatticeState step_srk4(const LatticeState& s, const SystemParams& p,
                       const Lattice& lat, double dt, const NoiseSpec& noise);

struct EnsembleOptions {
    double t_burn = -1;     // < 0 means 50 amplitude relaxation times, 50/Gamma
    double t_measure = -1;  // < 0 means 200 mechanical periods
    double dt = -1;         // < 0 means 1/128 of a mechanical period
    int realizations = 16;
    std::uint64_t seed = 1;
    double seed_radius = 0.1;  // initial |beta| disk radius
    bool noise = true;         // false integrates the deterministic flow only
    bool uniform_start = false;  // all sites start at beta = seed_radius, in phase

    // Sideband-intensity readout: when omega_readout > 0 the per-site
    // integrals integral e^{i omega t} |alpha_i|^2 dt over consecutive
    // windows of one effective period are accumulated alongside the phases.
    double omega_readout = 0;

    int threads = 1;
};

// Per-realization accumulators; kept separate so error bars come from
// realization batching and reductions are reproducible regardless of
// scheduling. Indexing is [realization][distance].
struct EnsembleStats {
    LatticeConfig lattice;
    std::vector<int> distances;

    std::vector<std::vector<Complex>> phase_sum;
    std::vector<std::vector<std::int64_t>> phase_count;

    std::vector<std::vector<Complex>> readout_sum;
    std::vector<std::vector<std::int64_t>> readout_count;
    std::vector<double> readout_power;           // per realization sum |I|^2
    std::vector<std::int64_t> readout_power_count;

    std::vector<char> survived;
    std::vector<std::string> abort_reason;  // empty string when survived
    std::int64_t phase_undefined = 0;       // site samples excluded from stats

    int samples = 0;  // measurement samples per surviving realization
    double t_burn = 0, t_measure = 0, dt = 0;
    double omega_readout = 0;
    std::uint64_t seed = 0;

    int surviving() const;
};

// Runs independent noise realizations, discards the burn-in, then samples
// site phases once per mechanical period and accumulates pair statistics
// for every lattice distance. Throws invalid_state if fewer than 80% of
// realizations stay finite.
EnsembleStats simulate_ensemble(const LatticeConfig& cfg, const SystemParams& p,
                                const EnsembleOptions& opts = {});

struct CorrelationResult {
    std::vector<int> distance;
    std::vector<double> value;       // |<e^{i phi_i} e^{-i phi_j}>| in [0,1]
    std::vector<double> std_error;   // realization-batched, 0 when unavailable
    std::vector<std::int64_t> pair_samples;
    int realizations = 0;
    int sites = 0;
    double t_measure = 0;
    bool error_bars = true;  // false (flagged) with fewer than 2 realizations
};

// Phase correlations C(d) from accumulated statistics. Distances must be a
// subset of those recorded in the stats.
CorrelationResult compute_phase_correlations(const EnsembleStats& stats,
                                             const std::vector<int>& distances);

// Normalized sideband-intensity correlations |<I_i I_j*>| / <|I|^2> at the
// same distances; requires the ensemble to have been run with a readout
// frequency. Proportionality to the mechanical C(d) is the point of the
// diagnostic, not an enforced invariant.
CorrelationResult compute_optical_readout_correlations(const EnsembleStats& stats,
                                                       const std::vector<int>& distances);

struct ThresholdResult {
    double k_c = 0;
    double uncertainty = 0;  // bracket half-width combined with C noise
    double k_lo = 0, k_hi = 0;
    // every ensemble evaluation: coupling, C(d*), standard error
    std::vector<double> k_eval, c_eval, c_err;
};

// Bisects the coupling K between a sub- and a super-critical bracket until
// |k_hi - k_lo| < 0.005 Omega, judging each K by C(criterion_distance)
// against criterion_value. criterion_value = 0 degenerates to k_lo since
// any noise leaves a positive correlation modulus.
ThresholdResult detect_threshold(const LatticeConfig& cfg, const SystemParams& p,
                                 int criterion_distance, double criterion_value,
                                 double k_lo, double k_hi,
                                 const EnsembleOptions& opts = {});

// Deterministic oscillation frequency of the synchronized lattice: noise
// off, all sites started in phase, transient discarded, then a harmonic fit
// to one site's mechanical amplitude. Includes optical spring and the
// coupling-induced shift. Returns 0 if the cell rings down to rest.
double measure_lattice_frequency(const LatticeConfig& cfg, const SystemParams& p,
                                 double t_relax = -1, double t_fit = -1,
                                 double dt = -1);

}  // namespace omarray
