#include "omarray/langevin.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

#include "omarray/errors.hpp"
#include "omarray/rng.hpp"
#include "omarray/trajectory.hpp"

namespace omarray {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;
constexpr double kPhaseFloor = 1e-6;  // below this |beta| the phase is undefined

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

void check_dt(double dt, const SystemParams& p) {
    if (!(dt > 0)) throw invalid_params("time step must be positive");
    const double period = kTwoPi / p.omega;
    if (dt > 0.02 * period || dt * p.kappa > 0.2) {
        std::ostringstream msg;
        msg << "time step " << dt << " too coarse: need dt <= " << 0.02 * period
            << " (2% of a mechanical period) and dt * kappa <= 0.2";
        throw invalid_params(msg.str());
    }
}

}  // namespace

void LatticeState::validate() const {
    if (alpha.size() != beta.size())
        throw invalid_state("lattice state field sizes disagree");
    for (size_t i = 0; i < alpha.size(); ++i) {
        if (!finite(alpha[i]) || !finite(beta[i])) {
            std::ostringstream msg;
            msg << "non-finite amplitude at site " << i << ", t = " << t
                << ", step " << step;
            throw invalid_state(msg.str());
        }
    }
}

LangevinEngine::LangevinEngine(const SystemParams& p, const Lattice& lat)
    : p_(p), lat_(lat) {
    p_.validate();
    if (p_.J != 0.0)
        throw invalid_params(
            "optical hopping J does not enter the lattice Langevin equations; "
            "set J = 0 or use the mean-field engine");
    const int z = lat_.coordination();
    kz_ = z > 0 ? p_.K / static_cast<double>(z) : 0.0;
    const size_t ns = static_cast<size_t>(lat_.sites());
    for (int k = 0; k < 4; ++k) {
        fa_[k].resize(ns);
        fb_[k].resize(ns);
    }
    ya_.resize(ns);
    yb_.resize(ns);
    xa_.resize(ns);
    xb_.resize(ns);
}

void LangevinEngine::drift(const std::vector<Complex>& a, const std::vector<Complex>& b,
                           std::vector<Complex>& da, std::vector<Complex>& db) const {
    const Complex i_unit(0.0, 1.0);
    const int ns = lat_.sites();
    const Complex drive(0.0, -p_.alpha_L);  // -i alpha_L
    const Complex cb(-p_.gamma / 2.0, -p_.omega);  // -i Omega - Gamma/2

    Complex beta_total(0.0, 0.0);
    const bool dense = lat_.config().topology == Topology::all_to_all;
    if (dense)
        for (int i = 0; i < ns; ++i) beta_total += b[i];

    const auto& off = lat_.offsets();
    const auto& nbr = lat_.neighbors();
    for (int i = 0; i < ns; ++i) {
        Complex nb_sum(0.0, 0.0);
        if (dense) {
            nb_sum = beta_total - b[i];
        } else {
            for (int k = off[i]; k < off[i + 1]; ++k) nb_sum += b[nbr[k]];
        }
        const double x = 2.0 * b[i].real();  // beta + beta*
        db[i] = cb * b[i] + i_unit * (p_.g0 * std::norm(a[i]) + kz_ * nb_sum);
        da[i] = Complex(-p_.kappa / 2.0, p_.delta + p_.g0 * x) * a[i] + drive;
    }
}

void LangevinEngine::step(LatticeState& s, double dt, const NoiseSpec& noise) const {
    check_dt(dt, p_);
    const int ns = lat_.sites();
    if (static_cast<int>(s.alpha.size()) != ns || static_cast<int>(s.beta.size()) != ns)
        throw invalid_params("state size does not match the lattice");

    // Wiener increment for this step, frozen across the four substages and
    // applied as a constant forcing of strength dW/dt.
    const double amp_b =
        std::sqrt(p_.gamma / 2.0) * std::sqrt(2.0 * p_.n_th + 1.0) / std::sqrt(dt);
    const double amp_a = std::sqrt(p_.kappa / 2.0) / std::sqrt(dt);
    if (noise.enabled && (amp_a > 0.0 || amp_b > 0.0)) {
        for (int i = 0; i < ns; ++i) {
            xb_[i] = amp_b * cgauss(noise.seed, noise.realization, s.step, i, 0);
            xa_[i] = amp_a * cgauss(noise.seed, noise.realization, s.step, i, 1);
        }
    } else {
        std::fill(xa_.begin(), xa_.end(), Complex(0, 0));
        std::fill(xb_.begin(), xb_.end(), Complex(0, 0));
    }

    auto stage = [&](const std::vector<Complex>& a, const std::vector<Complex>& b, int k) {
        drift(a, b, fa_[k], fb_[k]);
        for (int i = 0; i < ns; ++i) {
            fa_[k][i] += xa_[i];
            fb_[k][i] += xb_[i];
        }
    };

    stage(s.alpha, s.beta, 0);
    for (int i = 0; i < ns; ++i) {
        ya_[i] = s.alpha[i] + 0.5 * dt * fa_[0][i];
        yb_[i] = s.beta[i] + 0.5 * dt * fb_[0][i];
    }
    stage(ya_, yb_, 1);
    for (int i = 0; i < ns; ++i) {
        ya_[i] = s.alpha[i] + 0.5 * dt * fa_[1][i];
        yb_[i] = s.beta[i] + 0.5 * dt * fb_[1][i];
    }
    stage(ya_, yb_, 2);
    for (int i = 0; i < ns; ++i) {
        ya_[i] = s.alpha[i] + dt * fa_[2][i];
        yb_[i] = s.beta[i] + dt * fb_[2][i];
    }
    stage(ya_, yb_, 3);

    const double w = dt / 6.0;
    for (int i = 0; i < ns; ++i) {
        s.alpha[i] += w * (fa_[0][i] + 2.0 * fa_[1][i] + 2.0 * fa_[2][i] + fa_[3][i]);
        s.beta[i] += w * (fb_[0][i] + 2.0 * fb_[1][i] + 2.0 * fb_[2][i] + fb_[3][i]);
    }
    s.t += dt;
    s.step += 1;
    s.validate();
}

LatticeState LangevinEngine::initial_state(const NoiseSpec& noise, double radius) const {
    const int ns = lat_.sites();
    LatticeState s;
    s.alpha.assign(ns, Complex(0, 0));
    s.beta.resize(ns);
    for (int i = 0; i < ns; ++i) {
        // field 2 is reserved for seeding; per-step noise uses fields 0 and 1
        const UniformPair u = uniform_pair(noise.seed, noise.realization, 0, i, 2);
        const double r = radius * std::sqrt(u.u1);  // uniform over the disk
        const double ang = kTwoPi * u.u2;
        s.beta[i] = Complex(r * std::cos(ang), r * std::sin(ang));
    }
    return s;
}

LatticeState step_srk4(const LatticeState& s, const SystemParams& p,
                       const Lattice& lat, double dt, const NoiseSpec& noise) {
    LangevinEngine engine(p, lat);
    LatticeState out = s;
    engine.step(out, dt, noise);
    return out;
}

int EnsembleStats::surviving() const {
    int n = 0;
    for (char c : survived) n += c != 0;
    return n;
}

namespace {

struct ResolvedSchedule {
    double dt = 0;
    int steps_per_period = 0;
    int burn_periods = 0;
    int measure_periods = 0;
};

ResolvedSchedule resolve_schedule(const SystemParams& p, const EnsembleOptions& opts) {
    const double period = kTwoPi / p.omega;
    double dt = opts.dt;
    if (dt <= 0) {
        dt = period / 128.0;
        if (p.kappa > 0) dt = std::min(dt, 0.1 / p.kappa);
    }
    check_dt(dt, p);

    double t_burn = opts.t_burn;
    if (t_burn < 0) {
        if (p.gamma <= 0)
            throw invalid_params(
                "no default burn-in without mechanical damping; set t_burn explicitly");
        t_burn = 50.0 / p.gamma;
    }
    const double t_measure = opts.t_measure < 0 ? 200.0 * period : opts.t_measure;

    ResolvedSchedule sch;
    sch.steps_per_period = static_cast<int>(std::ceil(period / dt));
    sch.dt = period / sch.steps_per_period;
    sch.burn_periods = static_cast<int>(std::ceil(t_burn / period));
    sch.measure_periods = static_cast<int>(std::ceil(t_measure / period));
    if (sch.measure_periods < 1)
        throw invalid_params("measurement window shorter than one mechanical period");
    return sch;
}

// One realization: burn in, then sample phases once per period and
// accumulate ordered-pair phase products per distance. Readout integrals
// run on their own window clock when requested.
void run_realization(const LangevinEngine& engine,
                     const std::vector<std::vector<std::pair<int, int>>>& pairs,
                     const ResolvedSchedule& sch, const EnsembleOptions& opts,
                     std::uint64_t realization, std::vector<Complex>& phase_sum,
                     std::vector<std::int64_t>& phase_count,
                     std::vector<Complex>& readout_sum,
                     std::vector<std::int64_t>& readout_count, double& readout_power,
                     std::int64_t& readout_power_count, std::int64_t& phase_undefined) {
    const Lattice& lat = engine.lattice();
    const int ns = lat.sites();
    const bool dense = lat.config().topology == Topology::all_to_all;
    NoiseSpec noise{opts.seed, realization, opts.noise};
    LatticeState s = engine.initial_state(noise, opts.seed_radius);
    if (opts.uniform_start)
        std::fill(s.beta.begin(), s.beta.end(), Complex(opts.seed_radius, 0));

    for (int k = 0; k < sch.burn_periods * sch.steps_per_period; ++k)
        engine.step(s, sch.dt, noise);

    const bool readout = opts.omega_readout > 0;
    std::vector<Complex> sideband;
    int window_steps = 0, window_pos = 0;
    Complex rot(1, 0), rot_step(1, 0);
    if (readout) {
        window_steps = std::max(
            1, static_cast<int>(std::lround(kTwoPi / opts.omega_readout / sch.dt)));
        if (window_steps > sch.measure_periods * sch.steps_per_period)
            throw invalid_params(
                "measurement window shorter than one readout period");
        sideband.assign(ns, Complex(0, 0));
        rot_step = std::exp(Complex(0, opts.omega_readout * sch.dt));
    }

    std::vector<Complex> phasor(ns);
    std::vector<char> valid(ns);

    for (int period = 0; period < sch.measure_periods; ++period) {
        for (int k = 0; k < sch.steps_per_period; ++k) {
            if (readout) {
                if (window_pos == 0) rot = std::exp(Complex(0, opts.omega_readout * s.t));
                for (int i = 0; i < ns; ++i)
                    sideband[i] += rot * std::norm(s.alpha[i]) * sch.dt;
                rot *= rot_step;
                if (++window_pos == window_steps) {
                    // window complete: ordered-pair products and mean power
                    for (size_t di = 0; di < pairs.size(); ++di) {
                        Complex sum(0, 0);
                        for (const auto& pr : pairs[di])
                            sum += sideband[pr.first] * std::conj(sideband[pr.second]);
                        readout_sum[di] += 2.0 * sum.real();
                        readout_count[di] += 2 * static_cast<std::int64_t>(pairs[di].size());
                    }
                    for (int i = 0; i < ns; ++i) readout_power += std::norm(sideband[i]);
                    readout_power_count += ns;
                    std::fill(sideband.begin(), sideband.end(), Complex(0, 0));
                    window_pos = 0;
                }
            }
            engine.step(s, sch.dt, noise);
        }

        // once-per-period phase sample
        int n_valid = 0;
        Complex phasor_total(0, 0);
        for (int i = 0; i < ns; ++i) {
            const double mag = std::abs(s.beta[i]);
            valid[i] = mag > kPhaseFloor;
            if (valid[i]) {
                phasor[i] = s.beta[i] / mag;
                phasor_total += phasor[i];
                ++n_valid;
            } else {
                ++phase_undefined;
            }
        }

        // d = 0 self pairs are exact by construction
        phase_sum[0] += static_cast<double>(n_valid);
        phase_count[0] += n_valid;

        if (dense && pairs.size() > 1) {
            // sum over ordered distinct pairs collapses to |sum of phasors|^2
            phase_sum[1] += std::norm(phasor_total) - static_cast<double>(n_valid);
            phase_count[1] += static_cast<std::int64_t>(n_valid) * (n_valid - 1);
        } else {
            for (size_t di = 1; di < pairs.size(); ++di) {
                Complex sum(0, 0);
                std::int64_t cnt = 0;
                for (const auto& pr : pairs[di]) {
                    if (!valid[pr.first] || !valid[pr.second]) continue;
                    sum += phasor[pr.first] * std::conj(phasor[pr.second]);
                    cnt += 2;
                }
                phase_sum[di] += 2.0 * sum.real();
                phase_count[di] += cnt;
            }
        }
    }
}

}  // namespace

EnsembleStats simulate_ensemble(const LatticeConfig& cfg, const SystemParams& p,
                                const EnsembleOptions& opts) {
    cfg.validate();
    if (opts.realizations < 1) throw invalid_params("need at least one realization");
    Lattice lat(cfg);
    LangevinEngine probe(p, lat);  // validates params once up front
    const ResolvedSchedule sch = resolve_schedule(p, opts);

    const int n_dist = lat.max_distance() + 1;
    std::vector<std::vector<std::pair<int, int>>> pairs(n_dist);
    for (int d = 0; d < n_dist; ++d) pairs[d] = lat.pairs_at_distance(d);

    EnsembleStats st;
    st.lattice = cfg;
    st.distances.resize(n_dist);
    for (int d = 0; d < n_dist; ++d) st.distances[d] = d;
    const int nr = opts.realizations;
    st.phase_sum.assign(nr, std::vector<Complex>(n_dist, Complex(0, 0)));
    st.phase_count.assign(nr, std::vector<std::int64_t>(n_dist, 0));
    const bool readout = opts.omega_readout > 0;
    if (readout) {
        st.readout_sum.assign(nr, std::vector<Complex>(n_dist, Complex(0, 0)));
        st.readout_count.assign(nr, std::vector<std::int64_t>(n_dist, 0));
        st.readout_power.assign(nr, 0.0);
        st.readout_power_count.assign(nr, 0);
    }
    st.survived.assign(nr, 1);
    st.abort_reason.assign(nr, "");
    st.samples = sch.measure_periods;
    st.t_burn = sch.burn_periods * sch.steps_per_period * sch.dt;
    st.t_measure = sch.measure_periods * sch.steps_per_period * sch.dt;
    st.dt = sch.dt;
    st.omega_readout = opts.omega_readout;
    st.seed = opts.seed;

    std::vector<std::int64_t> undefined(nr, 0);
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&]() {
        LangevinEngine engine(p, lat);  // scratch buffers are per thread
        std::vector<Complex> none_c;
        std::vector<std::int64_t> none_i;
        for (;;) {
            const int r = next.fetch_add(1);
            if (r >= nr) return;
            double power_dummy = 0;
            std::int64_t power_count_dummy = 0;
            try {
                run_realization(engine, pairs, sch, opts, static_cast<std::uint64_t>(r),
                                st.phase_sum[r], st.phase_count[r],
                                readout ? st.readout_sum[r] : none_c,
                                readout ? st.readout_count[r] : none_i,
                                readout ? st.readout_power[r] : power_dummy,
                                readout ? st.readout_power_count[r] : power_count_dummy,
                                undefined[r]);
            } catch (const invalid_state& e) {
                st.survived[r] = 0;
                st.abort_reason[r] = e.what();
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };

    const int n_threads = std::max(1, std::min(opts.threads, nr));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    for (std::int64_t u : undefined) st.phase_undefined += u;

    const int alive = st.surviving();
    if (alive * 5 < nr * 4) {
        std::ostringstream msg;
        msg << "only " << alive << " of " << nr
            << " realizations stayed finite; first abort: ";
        for (int r = 0; r < nr; ++r)
            if (!st.survived[r]) {
                msg << st.abort_reason[r];
                break;
            }
        throw invalid_state(msg.str());
    }
    return st;
}

namespace {

// Batched mean over realizations: value is the modulus of the grand mean,
// error the scatter of per-realization means.
void batched_modulus(const std::vector<Complex>& means, double& value, double& err) {
    const size_t n = means.size();
    Complex grand(0, 0);
    for (const Complex& m : means) grand += m;
    grand /= static_cast<double>(n);
    value = std::abs(grand);
    if (n < 2) {
        err = 0;
        return;
    }
    double var = 0;
    for (const Complex& m : means) var += std::norm(m - grand);
    err = std::sqrt(var / (static_cast<double>(n) * (static_cast<double>(n) - 1)));
}

}  // namespace

CorrelationResult compute_phase_correlations(const EnsembleStats& stats,
                                             const std::vector<int>& distances) {
    CorrelationResult out;
    out.realizations = stats.surviving();
    out.sites = stats.lattice.sites();
    out.t_measure = stats.t_measure;
    out.error_bars = out.realizations >= 2;
    if (out.realizations < 1) throw invalid_params("no surviving realizations");

    for (int d : distances) {
        const auto it = std::find(stats.distances.begin(), stats.distances.end(), d);
        if (it == stats.distances.end()) {
            std::ostringstream msg;
            msg << "distance " << d << " was not recorded for this lattice";
            throw invalid_params(msg.str());
        }
        const size_t di = static_cast<size_t>(it - stats.distances.begin());

        std::vector<Complex> means;
        std::int64_t total = 0;
        for (size_t r = 0; r < stats.phase_sum.size(); ++r) {
            if (!stats.survived[r] || stats.phase_count[r][di] == 0) continue;
            means.push_back(stats.phase_sum[r][di] /
                            static_cast<double>(stats.phase_count[r][di]));
            total += stats.phase_count[r][di];
        }
        if (means.empty()) {
            std::ostringstream msg;
            msg << "no phase-defined pair samples at distance " << d;
            throw invalid_params(msg.str());
        }
        double value = 0, err = 0;
        batched_modulus(means, value, err);
        out.distance.push_back(d);
        out.value.push_back(std::min(value, 1.0));
        out.std_error.push_back(err);
        out.pair_samples.push_back(total);
    }
    return out;
}

CorrelationResult compute_optical_readout_correlations(const EnsembleStats& stats,
                                                       const std::vector<int>& distances) {
    if (stats.omega_readout <= 0)
        throw invalid_params("ensemble was run without sideband readout");
    CorrelationResult out;
    out.realizations = stats.surviving();
    out.sites = stats.lattice.sites();
    out.t_measure = stats.t_measure;
    out.error_bars = out.realizations >= 2;
    if (out.realizations < 1) throw invalid_params("no surviving realizations");

    for (int d : distances) {
        const auto it = std::find(stats.distances.begin(), stats.distances.end(), d);
        if (it == stats.distances.end()) {
            std::ostringstream msg;
            msg << "distance " << d << " was not recorded for this lattice";
            throw invalid_params(msg.str());
        }
        const size_t di = static_cast<size_t>(it - stats.distances.begin());

        // normalize each realization by its own mean sideband power so the
        // batch scatter reflects the correlator, not slow power drift
        std::vector<Complex> means;
        std::int64_t total = 0;
        for (size_t r = 0; r < stats.readout_sum.size(); ++r) {
            if (!stats.survived[r] || stats.readout_count[r][di] == 0) continue;
            if (stats.readout_power_count[r] == 0) continue;
            const double power =
                stats.readout_power[r] / static_cast<double>(stats.readout_power_count[r]);
            if (power <= 0) continue;
            const Complex mean = stats.readout_sum[r][di] /
                                 static_cast<double>(stats.readout_count[r][di]);
            means.push_back(mean / power);
            total += stats.readout_count[r][di];
        }
        if (means.empty()) {
            std::ostringstream msg;
            msg << "no readout pair samples at distance " << d;
            throw invalid_params(msg.str());
        }
        double value = 0, err = 0;
        batched_modulus(means, value, err);
        out.distance.push_back(d);
        out.value.push_back(value);
        out.std_error.push_back(err);
        out.pair_samples.push_back(total);
    }
    return out;
}

ThresholdResult detect_threshold(const LatticeConfig& cfg, const SystemParams& p,
                                 int criterion_distance, double criterion_value,
                                 double k_lo, double k_hi, const EnsembleOptions& opts) {
    if (!(k_lo < k_hi)) throw invalid_params("threshold bracket must satisfy k_lo < k_hi");
    if (criterion_value < 0) throw invalid_params("criterion value must be non-negative");

    ThresholdResult res;
    res.k_lo = k_lo;
    res.k_hi = k_hi;
    if (criterion_value == 0) {
        // any noise leaves a positive correlation modulus
        res.k_c = k_lo;
        return res;
    }

    auto evaluate = [&](double k) {
        SystemParams pk = p;
        pk.K = k;
        const EnsembleStats stats = simulate_ensemble(cfg, pk, opts);
        const CorrelationResult corr =
            compute_phase_correlations(stats, {criterion_distance});
        res.k_eval.push_back(k);
        res.c_eval.push_back(corr.value[0]);
        res.c_err.push_back(corr.std_error[0]);
        return std::make_pair(corr.value[0], corr.std_error[0]);
    };

    const auto lo = evaluate(k_lo);
    if (lo.first >= criterion_value) {
        std::ostringstream msg;
        msg << "bracket invalid: C(" << criterion_distance << ") = " << lo.first
            << " at K = " << k_lo << " already exceeds " << criterion_value;
        throw invalid_params(msg.str());
    }
    const auto hi = evaluate(k_hi);
    if (hi.first < criterion_value) {
        std::ostringstream msg;
        msg << "bracket invalid: C(" << criterion_distance << ") = " << hi.first
            << " at K = " << k_hi << " stays below " << criterion_value;
        throw invalid_params(msg.str());
    }

    double c_lo = lo.first, e_lo = lo.second;
    double c_hi = hi.first, e_hi = hi.second;
    double a = k_lo, b = k_hi;
    while (b - a >= 0.005 * p.omega) {
        const double mid = 0.5 * (a + b);
        const auto m = evaluate(mid);
        if (m.first >= criterion_value) {
            b = mid;
            c_hi = m.first;
            e_hi = m.second;
        } else {
            a = mid;
            c_lo = m.first;
            e_lo = m.second;
        }
    }

    res.k_lo = a;
    res.k_hi = b;
    res.k_c = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double slope = (c_hi - c_lo) / (b - a);
    const double noise = slope != 0.0 ? 0.5 * (e_lo + e_hi) / std::abs(slope) : b - a;
    res.uncertainty = std::hypot(half, noise);
    return res;
}

double measure_lattice_frequency(const LatticeConfig& cfg, const SystemParams& p,
                                 double t_relax, double t_fit, double dt) {
    cfg.validate();
    Lattice lat(cfg);
    LangevinEngine engine(p, lat);
    const double period = kTwoPi / p.omega;
    if (dt <= 0) {
        dt = period / 128.0;
        if (p.kappa > 0) dt = std::min(dt, 0.1 / p.kappa);
    }
    check_dt(dt, p);
    if (t_relax < 0) {
        if (p.gamma <= 0) throw invalid_params("set t_relax explicitly when Gamma = 0");
        t_relax = 50.0 / p.gamma;
    }
    if (t_fit < 0) t_fit = 50.0 * period;

    NoiseSpec noise{0, 0, false};
    LatticeState s;
    const int ns = lat.sites();
    s.alpha.assign(ns, Complex(0, 0));
    s.beta.assign(ns, Complex(0.1, 0.0));  // synchronized start

    const long relax_steps = std::lround(std::ceil(t_relax / dt));
    for (long k = 0; k < relax_steps; ++k) engine.step(s, dt, noise);

    const long fit_steps = std::lround(std::ceil(t_fit / dt));
    std::vector<double> t(fit_steps);
    std::vector<Complex> y(fit_steps);
    const double inv_ns = 1.0 / static_cast<double>(ns);
    for (long k = 0; k < fit_steps; ++k) {
        Complex mean(0, 0);
        for (int i = 0; i < ns; ++i) mean += s.beta[i];
        t[k] = s.t;
        y[k] = mean * inv_ns;
        engine.step(s, dt, noise);
    }

    const HarmonicFit fit = fit_complex_harmonic(t.data(), y.data(), y.size());
    if (std::abs(fit.amp) < 1e-6 * std::max(1.0, std::abs(fit.offset))) return 0.0;
    return fit.omega;
}

}  // namespace omarray
