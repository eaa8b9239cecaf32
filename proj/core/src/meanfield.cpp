#include "omarray/meanfield.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <limits>
#include <optional>
#include <sstream>
#include <thread>

#include <Eigen/LU>

#include "omarray/errors.hpp"

namespace omarray {

namespace {

Complex trace_sparse_times(const SparseOp& A, const Matrix& rho) {
    // tr(A rho) = sum_{ij} A(i,j) rho(j,i)
    Complex s = 0.0;
    for (int k = 0; k < A.outerSize(); ++k)
        for (SparseOp::InnerIterator it(A, k); it; ++it) s += it.value() * rho(it.col(), it.row());
    return s;
}

} // namespace

MeanfieldEvolver::MeanfieldEvolver(const SystemParams& p, const HilbertSpec& h) : p_(p), h_(h) {
    p_.validate();
    h_.validate();
    const int D = h.dim();

    const Matrix a_dense = photon_embed(build_annihilation(h.photon_levels), h);
    const Matrix b_dense = phonon_embed(build_annihilation(h.phonon_levels), h);
    a_ = a_dense.sparseView();
    ad_ = Matrix(a_dense.adjoint()).sparseView();
    b_ = b_dense.sparseView();
    bd_ = Matrix(b_dense.adjoint()).sparseView();

    const Matrix H0 = single_cell_hamiltonian(p, h);
    Matrix G = -I * H0;
    G -= 0.5 * p.kappa * (a_dense.adjoint() * a_dense);
    G -= 0.5 * p.gamma * (p.n_th + 1.0) * (b_dense.adjoint() * b_dense);
    if (p.n_th > 0.0) G -= 0.5 * p.gamma * p.n_th * (b_dense * b_dense.adjoint());
    G_ = G.sparseView();
    Gd_ = Matrix(G.adjoint()).sparseView();

    na_diag_.resize(D);
    nb_diag_.resize(D);
    pair_diag_.resize(D);
    const int Nm = h.phonon_levels;
    for (int n = 0; n < h.photon_levels; ++n)
        for (int m = 0; m < Nm; ++m) {
            const int idx = n * Nm + m;
            na_diag_(idx) = n;
            nb_diag_(idx) = m;
            pair_diag_(idx) = static_cast<double>(n) * (n - 1);
        }

    k1_.resize(D, D);
    k2_.resize(D, D);
    k3_.resize(D, D);
    k4_.resize(D, D);
    y_.resize(D, D);
    tmp_.resize(D, D);
}

void MeanfieldEvolver::rhs(const Matrix& rho, Complex mean_a, Complex mean_b, Matrix& out) const {
    out.noalias() = G_ * rho;
    out.noalias() += rho * Gd_;
    if (p_.kappa > 0.0) {
        tmp_.noalias() = a_ * rho;
        out.noalias() += p_.kappa * (tmp_ * ad_);
    }
    if (p_.gamma > 0.0) {
        tmp_.noalias() = b_ * rho;
        out.noalias() += (p_.gamma * (p_.n_th + 1.0)) * (tmp_ * bd_);
        if (p_.n_th > 0.0) {
            tmp_.noalias() = bd_ * rho;
            out.noalias() += (p_.gamma * p_.n_th) * (tmp_ * b_);
        }
    }
    // Mean-field drives: -i[X, rho] with X = -J(ma a' + ma* a) - K(mb b' + mb* b).
    if (p_.J != 0.0 && mean_a != Complex{0.0, 0.0}) {
        const Complex cJ = I * p_.J;
        out.noalias() += (cJ * mean_a) * (ad_ * rho);
        out.noalias() += (cJ * std::conj(mean_a)) * (a_ * rho);
        out.noalias() -= (cJ * mean_a) * (rho * ad_);
        out.noalias() -= (cJ * std::conj(mean_a)) * (rho * a_);
    }
    if (p_.K != 0.0 && mean_b != Complex{0.0, 0.0}) {
        const Complex cK = I * p_.K;
        out.noalias() += (cK * mean_b) * (bd_ * rho);
        out.noalias() += (cK * std::conj(mean_b)) * (b_ * rho);
        out.noalias() -= (cK * mean_b) * (rho * bd_);
        out.noalias() -= (cK * std::conj(mean_b)) * (rho * b_);
    }
}

void MeanfieldEvolver::step(Matrix& rho, double dt) {
    std::pair<Complex, Complex> m = means(rho);
    rhs(rho, m.first, m.second, k1_);
    y_ = rho + (0.5 * dt) * k1_;
    m = means(y_);
    rhs(y_, m.first, m.second, k2_);
    y_ = rho + (0.5 * dt) * k2_;
    m = means(y_);
    rhs(y_, m.first, m.second, k3_);
    y_ = rho + dt * k3_;
    m = means(y_);
    rhs(y_, m.first, m.second, k4_);
    rho += (dt / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
}

void MeanfieldEvolver::step_frozen(Matrix& rho, double dt, Complex mean_a, Complex mean_b) {
    rhs(rho, mean_a, mean_b, k1_);
    y_ = rho + (0.5 * dt) * k1_;
    rhs(y_, mean_a, mean_b, k2_);
    y_ = rho + (0.5 * dt) * k2_;
    rhs(y_, mean_a, mean_b, k3_);
    y_ = rho + dt * k3_;
    rhs(y_, mean_a, mean_b, k4_);
    rho += (dt / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
}

std::pair<Complex, Complex> MeanfieldEvolver::means(const Matrix& rho) const {
    return {trace_sparse_times(a_, rho), trace_sparse_times(b_, rho)};
}

namespace {
double diag_weighted_trace(const Eigen::VectorXd& w, const Matrix& rho) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < w.size(); ++i) s += w(i) * rho(i, i).real();
    return s;
}
} // namespace

double MeanfieldEvolver::photon_number(const Matrix& rho) const {
    return diag_weighted_trace(na_diag_, rho);
}

double MeanfieldEvolver::phonon_number(const Matrix& rho) const {
    return diag_weighted_trace(nb_diag_, rho);
}

double MeanfieldEvolver::pair_occupation(const Matrix& rho) const {
    return diag_weighted_trace(pair_diag_, rho);
}

TruncationReport MeanfieldEvolver::truncation(const Matrix& rho) const {
    return truncation_populations(rho, h_);
}

namespace {

void throw_if_nan(const Matrix& rho, double t) {
    if (!rho.allFinite()) {
        std::ostringstream os;
        os << "meanfield evolution produced NaN/Inf at t = " << t
           << "; reduce dt or check parameters";
        throw invalid_state(os.str());
    }
}

void check_dt(const SystemParams& p, double dt) {
    if (!(dt > 0.0)) throw invalid_params("dt must be positive");
    if (dt > 0.02 * 2.0 * M_PI / p.omega)
        throw invalid_params("dt too large to resolve the mechanical period (need dt <= 0.02*2pi/omega)");
}

} // namespace

QuantumTrajectory evolve_meanfield(const SystemParams& p, const HilbertSpec& h,
                                   const DensityMatrix& rho0, const EvolveOptions& opts) {
    check_dt(p, opts.dt);
    if (opts.record_stride < 1) throw invalid_params("record_stride must be >= 1");
    rho0.check();

    MeanfieldEvolver ev(p, h);
    Matrix rho = rho0.mat();
    const long n_steps = std::lround(opts.t_end / opts.dt);

    QuantumTrajectory traj;
    traj.t.reserve(n_steps / opts.record_stride + 2);
    auto record = [&](double t) {
        const auto [ma, mb] = ev.means(rho);
        traj.t.push_back(t);
        traj.mean_a.push_back(ma);
        traj.mean_b.push_back(mb);
        traj.n_photon.push_back(ev.photon_number(rho));
        traj.n_phonon.push_back(ev.phonon_number(rho));
    };
    record(0.0);
    for (long s = 0; s < n_steps; ++s) {
        if (opts.frozen_means)
            ev.step_frozen(rho, opts.dt, opts.frozen_means->first, opts.frozen_means->second);
        else
            ev.step(rho, opts.dt);
        if ((s + 1) % opts.record_stride == 0) {
            throw_if_nan(rho, (s + 1) * opts.dt);
            record((s + 1) * opts.dt);
        }
    }
    const TruncationReport rep = ev.truncation(rho);
    traj.worst_truncation = rep.worst();
    traj.truncation_warning = rep.exceeded(opts.truncation_tol);
    return traj;
}

QuantumTrajectory evolve_meanfield(const SystemParams& p, const HilbertSpec& h,
                                   const DensityMatrix& rho0, double t_end, double dt) {
    EvolveOptions opts;
    opts.t_end = t_end;
    opts.dt = dt;
    return evolve_meanfield(p, h, rho0, opts);
}

SteadyStateResult evolve_to_steady_state(const SystemParams& p, const HilbertSpec& h,
                                         const DensityMatrix& rho0,
                                         const SteadyStateOptions& opts) {
    check_dt(p, opts.dt);
    rho0.check();
    MeanfieldEvolver ev(p, h);
    Matrix rho = rho0.mat();

    const double dt_sample = opts.dt * opts.record_stride;
    const double window_T = opts.window_periods * 2.0 * M_PI / p.omega;
    const size_t win = static_cast<size_t>(std::floor(window_T / dt_sample)) + 1;

    // Ring of the last two windows of samples.
    std::deque<double> ts;
    std::deque<Complex> mas, mbs;
    std::deque<double> nas, nbs;
    auto push = [&](double t) {
        const auto [ma, mb] = ev.means(rho);
        ts.push_back(t);
        mas.push_back(ma);
        mbs.push_back(mb);
        nas.push_back(ev.photon_number(rho));
        nbs.push_back(ev.phonon_number(rho));
        while (ts.size() > 2 * win) {
            ts.pop_front();
            mas.pop_front();
            mbs.pop_front();
            nas.pop_front();
            nbs.pop_front();
        }
    };

    SteadyStateResult res;
    push(0.0);
    double t = 0.0;
    long step_count = 0;
    double worst_trunc = 0.0;
    LimitCycleFit fit;
    bool done = false;
    bool ringdown = false;
    double r_prev = -1.0;
    while (!done) {
        for (size_t s = 0; s < win && t < opts.t_max; ++s) {
            for (int k = 0; k < opts.record_stride; ++k) {
                if (opts.frozen_means)
                    ev.step_frozen(rho, opts.dt, opts.frozen_means->first,
                                   opts.frozen_means->second);
                else
                    ev.step(rho, opts.dt);
                ++step_count;
            }
            t += dt_sample;
            push(t);
        }
        throw_if_nan(rho, t);
        // Lindblad evolution is trace preserving; RK4 roundoff is not. Pin the
        // trace once per window so multi-thousand-period runs stay normalized.
        rho *= 1.0 / rho.trace().real();
        worst_trunc = std::max(worst_trunc, ev.truncation(rho).worst());

        if (ts.size() >= 2 * win) {
            std::vector<double> tv(ts.begin(), ts.end());
            std::vector<Complex> bv(mbs.begin(), mbs.end());
            fit = fit_limit_cycle(tv, bv, opts.window_periods, p.omega, opts.r_rel_tol);
            if (t >= opts.t_min && fit.r < opts.ringdown_floor && r_prev >= 0.0 &&
                fit.r <= r_prev)
                ringdown = true;
            r_prev = fit.r;
            if (ringdown || (fit.converged() && t >= opts.t_min) || t >= opts.t_max)
                done = true;
        } else if (t >= opts.t_max) {
            done = true;
        }
    }

    res.fit = fit;
    res.converged = fit.converged() || ringdown;
    res.truncation_warning = worst_trunc > opts.truncation_tol;

    res.tail.t.assign(ts.begin(), ts.end());
    res.tail.mean_a.assign(mas.begin(), mas.end());
    res.tail.mean_b.assign(mbs.begin(), mbs.end());
    res.tail.n_photon.assign(nas.begin(), nas.end());
    res.tail.n_phonon.assign(nbs.begin(), nbs.end());
    res.tail.worst_truncation = worst_trunc;
    res.tail.truncation_warning = res.truncation_warning;

    res.n_photon = 0.0;
    res.n_phonon = 0.0;
    for (size_t i = ts.size() - std::min(ts.size(), win); i < ts.size(); ++i) {
        res.n_photon += nas[i];
        res.n_phonon += nbs[i];
    }
    const double cnt = static_cast<double>(std::min(ts.size(), win));
    res.n_photon /= cnt;
    res.n_phonon /= cnt;

    if (res.fit.omega_eff > 0.0) {
        std::vector<double> tv(ts.end() - std::min(ts.size(), win), ts.end());
        std::vector<double> nv(nas.end() - std::min(ts.size(), win), nas.end());
        res.ac_photon = real_oscillation_amplitude(tv, nv, res.fit.omega_eff);
    }

    res.means_final = ev.means(rho);
    res.rho = DensityMatrix(std::move(rho));
    return res;
}

double compute_g2_zero(const DensityMatrix& rho_ss, const HilbertSpec& h) {
    const Matrix& rho = rho_ss.mat();
    if (rho.rows() != h.dim()) throw invalid_params("compute_g2_zero: dimension mismatch");
    const int Nm = h.phonon_levels;
    double n = 0.0, pairs = 0.0;
    for (int nn = 0; nn < h.photon_levels; ++nn)
        for (int m = 0; m < Nm; ++m) {
            const double pop = rho(nn * Nm + m, nn * Nm + m).real();
            n += nn * pop;
            pairs += static_cast<double>(nn) * (nn - 1) * pop;
        }
    if (n < 1e-12)
        throw undefined_statistics("compute_g2_zero: photon number below 1e-12, g2 undefined");
    return pairs / (n * n);
}

std::vector<double> compute_g2_tau(const DensityMatrix& rho_ss,
                                   std::pair<Complex, Complex> frozen_means,
                                   const SystemParams& p, const HilbertSpec& h, int n_tau,
                                   double dtau) {
    if (n_tau < 1) throw invalid_params("compute_g2_tau: need n_tau >= 1");
    if (!(dtau > 0.0)) throw invalid_params("compute_g2_tau: dtau must be positive");
    MeanfieldEvolver ev(p, h);
    const Matrix& rho = rho_ss.mat();
    const double n_ss = ev.photon_number(rho);
    if (n_ss < 1e-12)
        throw undefined_statistics("compute_g2_tau: photon number below 1e-12, g2 undefined");

    // Quantum regression: sigma(0) = a rho a', g2(tau) = tr(a'a sigma(tau)) / n^2.
    // sigma has trace n_ss, not 1; the evolution is linear so that is fine.
    const Matrix a_dense = photon_embed(build_annihilation(h.photon_levels), h);
    Matrix sigma = a_dense * rho * a_dense.adjoint();

    // Integrate with a step that lands exactly on the tau grid.
    const double dt_cap = 0.02 * 2.0 * M_PI / p.omega;
    const int sub = std::max(1, static_cast<int>(std::ceil(dtau / dt_cap)));
    const double dt = dtau / sub;

    std::vector<double> g2(n_tau);
    g2[0] = ev.photon_number(sigma) / (n_ss * n_ss);
    for (int k = 1; k < n_tau; ++k) {
        for (int s = 0; s < sub; ++s)
            ev.step_frozen(sigma, dt, frozen_means.first, frozen_means.second);
        if (!sigma.allFinite()) throw error("compute_g2_tau: evolution produced NaN/Inf");
        g2[k] = ev.photon_number(sigma) / (n_ss * n_ss);
    }
    return g2;
}

PhaseDiffusionResult extract_phase_diffusion(const SystemParams& p, const HilbertSpec& h,
                                             const DensityMatrix& rho_ss,
                                             const PhaseDiffusionOptions& opts) {
    check_dt(p, opts.dt);
    MeanfieldEvolver ev(p, h);
    const Matrix& rho = rho_ss.mat();
    const auto means_ss = ev.means(rho);

    // sigma(0) = rho b'; f(tau) = tr(b sigma) so f(0) = <b b'>_ss.
    const Matrix b_dense = phonon_embed(build_annihilation(h.phonon_levels), h);
    Matrix sigma = rho * b_dense.adjoint();
    const SparseOp b_sp = b_dense.sparseView();

    PhaseDiffusionResult res;
    const double f0 = std::abs(trace_sparse_times(b_sp, sigma));
    if (f0 < 1e-12) throw undefined_statistics("extract_phase_diffusion: <b b'> vanishes");

    const double dt_sample = opts.dt * opts.record_stride;
    res.tau.push_back(0.0);
    res.correlator.push_back(trace_sparse_times(b_sp, sigma));

    // March until the envelope has dropped by the requested number of decay
    // constants (or t_max); envelope checked against f0.
    const double target = std::exp(-opts.decay_constants);
    double t = 0.0;
    while (t < opts.t_max) {
        for (int s = 0; s < opts.record_stride; ++s)
            ev.step_frozen(sigma, opts.dt, means_ss.first, means_ss.second);
        t += dt_sample;
        const Complex f = trace_sparse_times(b_sp, sigma);
        if (!std::isfinite(f.real()) || !std::isfinite(f.imag()))
            throw error("extract_phase_diffusion: evolution produced NaN/Inf");
        res.tau.push_back(t);
        res.correlator.push_back(f);
        if (std::abs(f) < target * f0) break;
    }

    // Log-linear envelope fit over tau where |f| >= f0 e^{-decay_constants}.
    // The rotation rate comes from the unwrapped phase slope.
    size_t n_fit = res.tau.size();
    std::vector<double> lv(n_fit), ph(n_fit);
    double prev_arg = std::arg(res.correlator[0]);
    double acc = prev_arg;
    for (size_t k = 0; k < n_fit; ++k) {
        lv[k] = std::log(std::max(std::abs(res.correlator[k]), 1e-300));
        double a = std::arg(res.correlator[k]);
        if (k > 0) {
            double d = a - prev_arg;
            while (d > M_PI) d -= 2.0 * M_PI;
            while (d < -M_PI) d += 2.0 * M_PI;
            acc += d;
            prev_arg = a;
        }
        ph[k] = acc;
    }
    auto line_fit = [&](const std::vector<double>& ys, double& slope, double& icept) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double n = static_cast<double>(n_fit);
        for (size_t k = 0; k < n_fit; ++k) {
            sx += res.tau[k];
            sy += ys[k];
            sxx += res.tau[k] * res.tau[k];
            sxy += res.tau[k] * ys[k];
        }
        const double det = n * sxx - sx * sx;
        slope = (n * sxy - sx * sy) / det;
        icept = (sy * sxx - sx * sxy) / det;
    };
    double slope, icept;
    line_fit(lv, slope, icept);
    res.d_phi = -slope;
    double ph_slope, ph_icept;
    line_fit(ph, ph_slope, ph_icept);
    res.omega_eff = -ph_slope; // correlator rotates as e^{-i omega_eff tau}

    // Relative envelope misfit.
    double ss = 0.0;
    for (size_t k = 0; k < n_fit; ++k) {
        const double model = std::exp(icept + slope * res.tau[k]);
        ss += (std::abs(res.correlator[k]) - model) * (std::abs(res.correlator[k]) - model);
    }
    res.residual = std::sqrt(ss / static_cast<double>(n_fit)) / f0;
    res.flagged = res.residual > opts.residual_threshold;
    return res;
}

namespace {

// Adds coeff * (B^T kron A) to L, i.e. the matrix of rho -> A rho B in the
// column-major vec convention vec(rho)[c*D+r] = rho(r,c).
void add_superop(Matrix& L, Complex coeff, const Matrix& A, const Matrix& B) {
    const int D = static_cast<int>(A.rows());
    for (int c = 0; c < D; ++c)
        for (int cp = 0; cp < D; ++cp) {
            const Complex f = coeff * B(cp, c);
            if (f == Complex{0.0, 0.0}) continue;
            L.block(c * D, cp * D, D, D) += f * A;
        }
}

} // namespace

DensityMatrix steady_state_oracle(const SystemParams& p, const HilbertSpec& h, Complex mean_a,
                                  Complex mean_b) {
    p.validate();
    h.validate();
    const int D = h.dim();
    if (D > 64)
        throw invalid_params("steady_state_oracle: joint dimension capped at 64 (superoperator cost)");

    const Matrix Id = Matrix::Identity(D, D);
    const Matrix H = meanfield_hamiltonian(p, h, mean_a, mean_b);
    const Matrix a = photon_embed(build_annihilation(h.photon_levels), h);
    const Matrix b = phonon_embed(build_annihilation(h.phonon_levels), h);

    Matrix L = Matrix::Zero(D * D, D * D);
    add_superop(L, -I, H, Id);
    add_superop(L, I, Id, H);
    auto add_dissipator = [&](double rate, const Matrix& c) {
        if (rate <= 0.0) return;
        const Matrix cdc = c.adjoint() * c;
        add_superop(L, rate, c, c.adjoint());
        add_superop(L, -0.5 * rate, cdc, Id);
        add_superop(L, -0.5 * rate, Id, cdc);
    };
    add_dissipator(p.kappa, a);
    add_dissipator(p.gamma * (p.n_th + 1.0), b);
    add_dissipator(p.gamma * p.n_th, b.adjoint());

    // Replace the first row with the trace condition tr(rho) = 1.
    L.row(0).setZero();
    for (int j = 0; j < D; ++j) L(0, j * D + j) = 1.0;
    Vector rhs = Vector::Zero(D * D);
    rhs(0) = 1.0;

    // In-place LU keeps peak memory at one superoperator copy.
    Eigen::PartialPivLU<Eigen::Ref<Matrix>> lu(L);
    // Degeneracy scan on the U diagonal before solving.
    const auto& diag = lu.matrixLU().diagonal();
    const double dmax = diag.cwiseAbs().maxCoeff();
    int tiny = 0;
    for (int i = 0; i < diag.size(); ++i)
        if (std::abs(diag(i)) < 1e-10 * dmax) ++tiny;
    if (tiny > 0) {
        std::ostringstream os;
        os << "steady_state_oracle: stationary subspace appears " << (tiny + 1)
           << "-dimensional (" << tiny << " vanishing pivots); steady state not unique";
        throw multi_stationary_error(os.str());
    }
    Vector sol = lu.solve(rhs);

    Matrix rho = Eigen::Map<Matrix>(sol.data(), D, D);
    rho = 0.5 * (rho + rho.adjoint()).eval();
    rho /= rho.trace().real();

    // Residual check against the dense reference Liouvillian.
    const double res = apply_liouvillian(rho, H, p, h).cwiseAbs().maxCoeff();
    const double scale = std::max({p.kappa, p.gamma, std::abs(p.delta), p.omega});
    if (res > 1e-9 * std::max(1.0, scale)) {
        std::ostringstream os;
        os << "steady_state_oracle: fixed-point residual " << res << " too large";
        throw error(os.str());
    }
    return DensityMatrix(std::move(rho));
}

void set_param(SystemParams& p, const std::string& name, double value) {
    if (name == "delta") p.delta = value;
    else if (name == "omega") p.omega = value;
    else if (name == "g0") p.g0 = value;
    else if (name == "alpha_L") p.alpha_L = value;
    else if (name == "kappa") p.kappa = value;
    else if (name == "gamma") p.gamma = value;
    else if (name == "n_th") p.n_th = value;
    else if (name == "J") p.J = value;
    else if (name == "K") p.K = value;
    else throw invalid_params("unknown parameter name: " + name);
}

namespace {

SweepPoint eval_meanfield_point(SystemParams p, const HilbertSpec& h,
                                const MeanfieldSweepOptions& opts,
                                const std::optional<DensityMatrix>& warm,
                                DensityMatrix* final_state) {
    SweepPoint pt;
    HilbertSpec space = h;
    SteadyStateOptions sopt = opts.steady;
    PhaseDiffusionOptions dopt = opts.diffusion;
    int halvings = 0;
    for (int attempt = 0;; ++attempt) {
        DensityMatrix rho0 = warm && warm->dim() == space.dim()
                                 ? *warm
                                 : DensityMatrix::coherent_product(0.0, opts.seed_displacement, space);
        std::optional<SteadyStateResult> evolved;
        while (!evolved) {
            try {
                evolved = evolve_to_steady_state(p, space, rho0, sopt);
            } catch (const invalid_state&) {
                // fixed-step RK4 outran its stability region; a stiffer
                // spectrum (large dimensions or detuning) needs a finer step
                if (halvings == 3) throw;
                ++halvings;
                sopt.dt *= 0.5;
                dopt.dt *= 0.5;
            }
        }
        SteadyStateResult ss = std::move(*evolved);
        if (ss.truncation_warning && opts.auto_escalate && attempt == 0 &&
            (space.photon_levels < opts.escalated.photon_levels ||
             space.phonon_levels < opts.escalated.phonon_levels)) {
            space = opts.escalated;
            continue;
        }
        pt.r = ss.fit.r;
        pt.omega_eff = ss.fit.omega_eff;
        pt.n_photon = ss.n_photon;
        pt.n_phonon = ss.n_phonon;
        pt.ac_photon = ss.ac_photon;
        pt.converged = ss.converged;
        pt.truncation_warning = ss.truncation_warning;
        pt.fit_flagged = ss.fit.flagged;
        try {
            pt.g2_0 = compute_g2_zero(ss.rho, space);
        } catch (const undefined_statistics&) {
            pt.g2_0 = std::numeric_limits<double>::quiet_NaN();
        }
        if (opts.compute_diffusion) {
            try {
                pt.d_phi = extract_phase_diffusion(p, space, ss.rho, dopt).d_phi;
            } catch (const error&) {
                pt.d_phi = std::numeric_limits<double>::quiet_NaN();
            }
        }
        if (final_state) *final_state = std::move(ss.rho);
        return pt;
    }
}

} // namespace

std::vector<SweepPoint> sweep_phase_diagram(const SystemParams& p_base, const HilbertSpec& h,
                                            const SweepAxis& axis1, const SweepAxis& axis2,
                                            const MeanfieldSweepOptions& opts) {
    if (axis1.points < 1) throw invalid_params("sweep_phase_diagram: axis1 needs at least 1 point");
    const int n2 = std::max(1, axis2.points);
    if (axis2.points > 0 && axis2.continuation != Continuation::none)
        throw invalid_params("sweep_phase_diagram: continuation allowed only on axis1");

    // Validate axis names up front.
    {
        SystemParams probe = p_base;
        set_param(probe, axis1.param, axis1.min);
        if (axis2.points > 0) set_param(probe, axis2.param, axis2.min);
    }

    auto param_at = [&](int i1, int i2) {
        SystemParams p = p_base;
        set_param(p, axis1.param, axis1.value(i1));
        if (axis2.points > 0) set_param(p, axis2.param, axis2.value(i2));
        // Sweeping J at fixed effective detuning: the configured delta is
        // interpreted as delta_eff and shifted per point.
        if (opts.hold_effective_detuning && (p.J != 0.0))
            p.delta = adapt_detuning(p.delta, p.J);
        return p;
    };

    std::vector<SweepPoint> grid(static_cast<size_t>(axis1.points) * n2);
    auto run_line = [&](int i2, bool backward, std::vector<SweepPoint>& line) {
        line.resize(axis1.points);
        std::optional<DensityMatrix> warm;
        const bool use_warm = axis1.continuation != Continuation::none;
        for (int k = 0; k < axis1.points; ++k) {
            const int i1 = backward ? axis1.points - 1 - k : k;
            DensityMatrix fin;
            SweepPoint pt = eval_meanfield_point(param_at(i1, i2), h, opts,
                                                 use_warm ? warm : std::nullopt, &fin);
            pt.axis1 = axis1.value(i1);
            pt.axis2 = axis2.points > 0 ? axis2.value(i2) : 0.0;
            line[i1] = pt;
            if (use_warm) warm = std::move(fin);
        }
    };

    // Lines over axis2 are independent; run them on a small worker pool.
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    const int workers = std::max(1, std::min(opts.workers, n2));
    std::vector<std::exception_ptr> errors(workers);
    auto work = [&](int wid) {
        try {
            for (int i2 = next.fetch_add(1); i2 < n2; i2 = next.fetch_add(1)) {
                std::vector<SweepPoint> fwd;
                run_line(i2, axis1.continuation == Continuation::backward, fwd);
                if (axis1.continuation == Continuation::both) {
                    std::vector<SweepPoint> bwd;
                    run_line(i2, true, bwd);
                    for (int i1 = 0; i1 < axis1.points; ++i1) {
                        const double scale =
                            std::max({fwd[i1].r, bwd[i1].r, 0.01});
                        if (std::abs(fwd[i1].r - bwd[i1].r) > 0.1 * scale) {
                            fwd[i1].bistable = true;
                        }
                    }
                }
                for (int i1 = 0; i1 < axis1.points; ++i1)
                    grid[static_cast<size_t>(i1) * n2 + i2] = fwd[i1];
            }
        } catch (...) {
            errors[wid] = std::current_exception();
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& th : pool) th.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return grid;
}

} // namespace omarray
