#pragma once

#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Sparse>

#include "omarray/operators.hpp"
#include "omarray/trajectory.hpp"

namespace omarray {

using SparseOp = Eigen::SparseMatrix<Complex>;

// Time evolution of one self-consistent cell under
//   drho/dt = -i[H(<a>,<b>), rho] + kappa D[a] + gamma(n_th+1) D[b] + gamma n_th D[b']
// with the mean fields recomputed from the stage state at every RK4 substage.
//
// The evolver keeps sparse copies of the ladder operators and the effective
// non-Hermitian generator, making one right-hand side O(dim^2). The dense
// apply_liouvillian in operators.hpp is the reference implementation; the two
// are checked against each other in the tests and must never drift apart.
//
// An instance owns scratch buffers and is NOT safe for concurrent use; give
// each worker its own evolver.
class MeanfieldEvolver {
public:
    MeanfieldEvolver(const SystemParams& p, const HilbertSpec& h);

    // Fast right-hand side at given mean fields.
    void rhs(const Matrix& rho, Complex mean_a, Complex mean_b, Matrix& out) const;

    // One RK4 step, mean fields recomputed at every substage.
    void step(Matrix& rho, double dt);
    // One RK4 step with the mean fields held fixed (linear evolution).
    void step_frozen(Matrix& rho, double dt, Complex mean_a, Complex mean_b);

    std::pair<Complex, Complex> means(const Matrix& rho) const; // (<a>, <b>)
    double photon_number(const Matrix& rho) const;
    double phonon_number(const Matrix& rho) const;
    double pair_occupation(const Matrix& rho) const; // <a'a'aa>
    TruncationReport truncation(const Matrix& rho) const;

    const SystemParams& params() const { return p_; }
    const HilbertSpec& hilbert() const { return h_; }

private:
    SystemParams p_;
    HilbertSpec h_;
    SparseOp a_, ad_, b_, bd_;
    SparseOp G_, Gd_; // effective generator -iH0 - (decay)/2 and its adjoint
    Eigen::VectorXd na_diag_, nb_diag_, pair_diag_;
    // RK4 scratch
    mutable Matrix k1_, k2_, k3_, k4_, y_, tmp_;
};

// Plain recorded evolution over [0, t_end]; dt must resolve the mechanical
// period (dt <= 0.02 * 2 pi / omega). Samples are recorded every
// record_stride steps (t=0 included). NaN aborts with a diagnostic.
struct EvolveOptions {
    double t_end = 100.0;
    double dt = 0.05;
    int record_stride = 1;
    double truncation_tol = 1e-6;
    // If set, the mean fields are frozen at this value for the whole run.
    std::optional<std::pair<Complex, Complex>> frozen_means;
};
QuantumTrajectory evolve_meanfield(const SystemParams& p, const HilbertSpec& h,
                                   const DensityMatrix& rho0, const EvolveOptions& opts);
QuantumTrajectory evolve_meanfield(const SystemParams& p, const HilbertSpec& h,
                                   const DensityMatrix& rho0, double t_end, double dt);

// Evolve until the limit-cycle fit converges (relative r drift < r_rel_tol
// between consecutive windows of window_periods mechanical periods each) or
// t_max is reached. The trajectory tail holds the last two windows.
struct SteadyStateOptions {
    double dt = 0.05;
    double window_periods = 20.0;
    double r_rel_tol = 1e-3;
    // A rotating amplitude below this floor that is still shrinking counts as
    // the unlocked fixed point. Without the floor an unlocked cell spends
    // thousands of periods on an exponential tail that never passes the
    // relative drift test.
    double ringdown_floor = 0.01;
    double t_min = 100.0;
    double t_max = 4000.0;
    int record_stride = 4;
    double truncation_tol = 1e-6;
    std::optional<std::pair<Complex, Complex>> frozen_means;
};
struct SteadyStateResult {
    DensityMatrix rho;
    QuantumTrajectory tail;
    LimitCycleFit fit;
    double ac_photon = 0.0; // oscillation amplitude of <a'a> at omega_eff
    double n_photon = 0.0;  // tail-window averages
    double n_phonon = 0.0;
    std::pair<Complex, Complex> means_final{};
    bool converged = false;
    bool truncation_warning = false;
};
SteadyStateResult evolve_to_steady_state(const SystemParams& p, const HilbertSpec& h,
                                         const DensityMatrix& rho0,
                                         const SteadyStateOptions& opts);

// g2(0) = <a'a'aa> / <a'a>^2. Throws undefined_statistics when the photon
// number is below 1e-12.
double compute_g2_zero(const DensityMatrix& rho_ss, const HilbertSpec& h);

// g2(tau) on a uniform grid tau_k = k*dtau, k = 0..n_tau-1, via the quantum
// regression theorem: evolve a rho_ss a' under the Liouvillian with mean
// fields frozen at the supplied steady values.
std::vector<double> compute_g2_tau(const DensityMatrix& rho_ss,
                                   std::pair<Complex, Complex> frozen_means,
                                   const SystemParams& p, const HilbertSpec& h,
                                   int n_tau, double dtau);

// Linewidth of the mechanical correlator <b(t) b'(0)>: quantum-regression
// evolution of rho_ss b', exponential envelope fit over the first few decay
// constants. The rotation rate gives omega_eff.
struct PhaseDiffusionResult {
    double d_phi = 0.0;
    double omega_eff = 0.0;
    double residual = 0.0; // relative rms misfit of the log-linear envelope fit
    bool flagged = false;  // residual > 20%
    std::vector<double> tau;
    std::vector<Complex> correlator;
};
struct PhaseDiffusionOptions {
    double dt = 0.05;
    double t_max = 20000.0;       // hard cap on correlator length
    double decay_constants = 3.0; // fit window in units of 1/D_phi
    double residual_threshold = 0.2;
    int record_stride = 4;
};
PhaseDiffusionResult extract_phase_diffusion(const SystemParams& p, const HilbertSpec& h,
                                             const DensityMatrix& rho_ss,
                                             const PhaseDiffusionOptions& opts = {});

// Brute-force stationary state: builds the Liouvillian superoperator matrix
// (mean fields frozen, default zero), replaces one row by the trace
// condition and solves. Joint dimension capped at 64. Degenerate kernels
// throw multi_stationary_error reporting the estimated dimension.
DensityMatrix steady_state_oracle(const SystemParams& p, const HilbertSpec& h,
                                  Complex mean_a = 0.0, Complex mean_b = 0.0);

// One grid point of a phase-diagram sweep.
struct SweepPoint {
    double axis1 = 0.0, axis2 = 0.0;
    double r = 0.0, omega_eff = 0.0, g2_0 = 0.0;
    double n_photon = 0.0, n_phonon = 0.0, ac_photon = 0.0;
    double d_phi = 0.0; // filled only when diffusion extraction is requested
    bool converged = false;
    bool bistable = false;
    bool truncation_warning = false;
    bool fit_flagged = false;
};

enum class Continuation { none, forward, backward, both };

struct SweepAxis {
    std::string param; // SystemParams field name: delta, g0, alpha_L, kappa, gamma, n_th, J, K
    double min = 0.0, max = 0.0;
    int points = 1;
    Continuation continuation = Continuation::none;

    double value(int i) const {
        return points > 1 ? min + (max - min) * i / static_cast<double>(points - 1) : min;
    }
};

// Assign a SystemParams field by name; throws invalid_params on unknown names.
void set_param(SystemParams& p, const std::string& name, double value);

struct MeanfieldSweepOptions {
    SteadyStateOptions steady{};
    HilbertSpec escalated{20, 20}; // retry space on truncation warning
    bool auto_escalate = true;
    bool compute_diffusion = false;
    PhaseDiffusionOptions diffusion{};
    // J sweeps hold the effective detuning fixed: bare delta = delta_eff - J.
    bool hold_effective_detuning = true;
    Complex seed_displacement{0.1, 0.0}; // initial <b> symmetry breaking
    int workers = 1;
};

// Evaluate the steady state on a 1-D or 2-D parameter grid. axis2.points == 0
// collapses to a 1-D sweep. Warm starts follow the continuation direction of
// axis1 (each axis1 line is then sequential). Continuation::both runs forward
// and backward branches and flags points where they disagree as bistable.
std::vector<SweepPoint> sweep_phase_diagram(const SystemParams& p_base, const HilbertSpec& h,
                                            const SweepAxis& axis1, const SweepAxis& axis2,
                                            const MeanfieldSweepOptions& opts);

} // namespace omarray
