#include "omarray/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "omarray/errors.hpp"
#include "omarray/hopf.hpp"

namespace omarray {

namespace fs = std::filesystem;
using nlohmann::json;

int RunManifest::done_count() const {
    int n = 0;
    for (const auto& p : points) n += p.done();
    return n;
}

int RunManifest::failed_count() const {
    int n = 0;
    for (const auto& p : points) n += p.failed();
    return n;
}

std::string engine_version() { return "omarray-core 0.1.0"; }

namespace {

std::string now_utc() {
    std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string continuation_name(Continuation c) {
    switch (c) {
        case Continuation::none: return "none";
        case Continuation::forward: return "forward";
        case Continuation::backward: return "backward";
        case Continuation::both: return "both";
    }
    return "none";
}

std::string topology_name(Topology t) {
    switch (t) {
        case Topology::square: return "square";
        case Topology::hexagonal: return "hexagonal";
        case Topology::all_to_all: return "all_to_all";
    }
    return "square";
}

json axis_json(const SweepAxis& ax) {
    return json{{"param", ax.param},
                {"min", ax.min},
                {"max", ax.max},
                {"points", ax.points},
                {"continuation", continuation_name(ax.continuation)}};
}

json spec_json_object(const SweepSpec& s, bool for_hash) {
    json j;
    j["engine"] = engine_name(s.engine);
    if (!for_hash) {
        j["out"] = s.out;
        j["inferred"] = s.inferred;
    }
    j["params"] = json{{"delta", s.params.delta}, {"omega", s.params.omega},
                       {"g0", s.params.g0},       {"alpha_L", s.params.alpha_L},
                       {"kappa", s.params.kappa}, {"gamma", s.params.gamma},
                       {"n_th", s.params.n_th},   {"J", s.params.J},
                       {"K", s.params.K},         {"z", s.params.z}};
    j["axis1"] = axis_json(s.axis1);
    j["axis2"] = axis_json(s.axis2);
    j["hilbert"] = json{{"photon_levels", s.hilbert.photon_levels},
                        {"phonon_levels", s.hilbert.phonon_levels}};
    j["lattice"] = json{{"topology", topology_name(s.lattice.topology)},
                        {"n", s.lattice.n},
                        {"boundary", s.lattice.boundary == Boundary::periodic ? "periodic" : "open"}};
    j["run"] = json{{"seed", s.ensemble.seed},
                    {"realizations", s.ensemble.realizations},
                    {"t_burn", s.ensemble.t_burn},
                    {"t_measure", s.ensemble.t_measure},
                    {"dt", s.ensemble.dt},
                    {"threads", s.ensemble.threads},
                    {"omega_readout", s.ensemble.omega_readout},
                    {"seed_radius", s.ensemble.seed_radius},
                    {"noise", s.ensemble.noise},
                    {"uniform_start", s.ensemble.uniform_start}};
    j["meanfield"] = json{{"dt", s.meanfield.steady.dt},
                          {"t_min", s.meanfield.steady.t_min},
                          {"t_max", s.meanfield.steady.t_max},
                          {"window_periods", s.meanfield.steady.window_periods},
                          {"r_rel_tol", s.meanfield.steady.r_rel_tol},
                          {"record_stride", s.meanfield.steady.record_stride},
                          {"truncation_tol", s.meanfield.steady.truncation_tol},
                          {"auto_escalate", s.meanfield.auto_escalate},
                          {"escalated_photon_levels", s.meanfield.escalated.photon_levels},
                          {"escalated_phonon_levels", s.meanfield.escalated.phonon_levels},
                          {"compute_diffusion", s.meanfield.compute_diffusion},
                          {"diffusion_dt", s.meanfield.diffusion.dt},
                          {"diffusion_t_max", s.meanfield.diffusion.t_max},
                          {"diffusion_decay_constants", s.meanfield.diffusion.decay_constants},
                          {"hold_effective_detuning", s.meanfield.hold_effective_detuning},
                          {"seed_displacement", s.meanfield.seed_displacement.real()}};
    j["phase"] = json{{"oscillators", s.phase.ensemble.oscillators},
                      {"t_end", s.phase.ensemble.t_end},
                      {"dt", s.phase.ensemble.dt},
                      {"record_stride", s.phase.ensemble.record_stride},
                      {"clustered_start", s.phase.ensemble.clustered_start},
                      {"seed", s.phase.ensemble.seed},
                      {"a_min", s.phase.a_min},
                      {"a_max", s.phase.a_max},
                      {"a_points", s.phase.a_points},
                      {"tail_fraction", s.phase.tail_fraction}};
    j["threshold"] = json{{"criterion_distance", s.threshold.criterion_distance},
                          {"criterion_value", s.threshold.criterion_value},
                          {"k_lo", s.threshold.k_lo},
                          {"k_hi", s.threshold.k_hi}};
    j["distances"] = s.distances;
    return j;
}

std::string format_value(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void write_atomic(const fs::path& path, const std::string& text) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw io_error("cannot open " + tmp.string() + " for writing");
        out << text;
        out.flush();
        if (!out) throw io_error("short write to " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw io_error("cannot replace " + path.string() + ": " + ec.message());
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot read " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

SystemParams apply_axes(const SweepSpec& spec, double v1, bool has2, double v2) {
    SystemParams p = spec.params;
    if (!spec.axis1.param.empty()) set_param(p, spec.axis1.param, v1);
    if (has2) set_param(p, spec.axis2.param, v2);
    return p;
}

std::vector<double> meanfield_row(const SweepPoint& sp) {
    return {sp.r,
            sp.omega_eff,
            sp.n_photon,
            sp.n_phonon,
            sp.ac_photon,
            sp.g2_0,
            sp.d_phi,
            sp.converged ? 1.0 : 0.0,
            sp.bistable ? 1.0 : 0.0,
            sp.truncation_warning ? 1.0 : 0.0,
            sp.fit_flagged ? 1.0 : 0.0};
}

std::vector<double> eval_meanfield(const SweepSpec& spec, double v1, bool has2, double v2) {
    // A 1x1 grid through the full evaluator keeps the per-point behavior
    // (escalation, detuning adaptation, seeding) identical to chained runs.
    SweepAxis a1{spec.axis1.param.empty() ? std::string("K") : spec.axis1.param,
                 spec.axis1.param.empty() ? spec.params.K : v1,
                 spec.axis1.param.empty() ? spec.params.K : v1, 1, Continuation::none};
    SweepAxis a2{"", 0.0, 0.0, 0, Continuation::none};
    if (has2) a2 = SweepAxis{spec.axis2.param, v2, v2, 1, Continuation::none};
    MeanfieldSweepOptions mo = spec.meanfield;
    mo.workers = 1;
    auto pts = sweep_phase_diagram(spec.params, spec.hilbert, a1, a2, mo);
    return meanfield_row(pts.at(0));
}

std::vector<double> eval_lattice(const SweepSpec& spec, double v1, bool has2, double v2) {
    SystemParams p = apply_axes(spec, v1, has2, v2);
    EnsembleStats st = simulate_ensemble(spec.lattice, p, spec.ensemble);
    CorrelationResult c = compute_phase_correlations(st, spec.distances);
    std::vector<double> row;
    for (size_t i = 0; i < c.value.size(); ++i) {
        row.push_back(c.value[i]);
        row.push_back(c.std_error[i]);
    }
    if (spec.ensemble.omega_readout > 0) {
        CorrelationResult ro = compute_optical_readout_correlations(st, spec.distances);
        for (size_t i = 0; i < ro.value.size(); ++i) {
            row.push_back(ro.value[i]);
            row.push_back(ro.std_error[i]);
        }
    }
    row.push_back(st.surviving());
    row.push_back(st.samples);
    row.push_back(static_cast<double>(st.phase_undefined));
    return row;
}

std::vector<double> eval_phase_model(const SweepSpec& spec, double v1, bool has2, double v2) {
    SystemParams p = apply_axes(spec, v1, has2, v2);
    std::vector<double> grid(spec.phase.a_points);
    for (int i = 0; i < spec.phase.a_points; ++i)
        grid[i] = spec.phase.a_min +
                  (spec.phase.a_max - spec.phase.a_min) * i / double(spec.phase.a_points - 1);
    HopfCalibration calib = calibrate_hopf(p, grid);
    PhaseModelCoefficients c = phase_model_coefficients(p.K, p.z, calib);
    PhaseEnsembleSeries series = simulate_phase_ensemble(c, spec.phase.ensemble);
    const size_t len = series.r.size();
    size_t start = static_cast<size_t>(std::floor(len * (1.0 - spec.phase.tail_fraction)));
    if (start >= len) start = len - 1;
    double mean = 0.0;
    for (size_t i = start; i < len; ++i) mean += series.r[i];
    mean /= double(len - start);
    double var = 0.0;
    for (size_t i = start; i < len; ++i) var += (series.r[i] - mean) * (series.r[i] - mean);
    var /= double(len - start);
    return {c.k1, c.k2,   c.d_phi,           calib.omega_at_abar, calib.a_bar,
            mean, std::sqrt(var), series.r.back()};
}

std::vector<double> eval_threshold(const SweepSpec& spec, double v1, bool has2, double v2) {
    SystemParams p = apply_axes(spec, v1, has2, v2);
    ThresholdResult tr =
        detect_threshold(spec.lattice, p, spec.threshold.criterion_distance,
                         spec.threshold.criterion_value, spec.threshold.k_lo,
                         spec.threshold.k_hi, spec.ensemble);
    return {tr.k_c, tr.uncertainty, tr.k_lo, tr.k_hi, static_cast<double>(tr.k_eval.size())};
}

}  // namespace

std::string spec_to_json(const SweepSpec& spec) { return spec_json_object(spec, false).dump(2); }

std::string spec_hash(const SweepSpec& spec) {
    const std::string canon = spec_json_object(spec, true).dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : canon) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::vector<std::string> csv_columns(const SweepSpec& spec) {
    std::vector<std::string> cols;
    cols.push_back(spec.axis1.param.empty() ? "point" : spec.axis1.param);
    if (spec.axis2.points > 0) cols.push_back(spec.axis2.param);
    switch (spec.engine) {
        case Engine::meanfield:
            for (const char* c : {"r", "omega_eff", "n_photon", "n_phonon", "ac_photon",
                                  "g2_0", "d_phi", "converged", "bistable",
                                  "truncation_warning", "fit_flagged"})
                cols.push_back(c);
            break;
        case Engine::lattice:
            for (int d : spec.distances) {
                cols.push_back("c" + std::to_string(d));
                cols.push_back("c" + std::to_string(d) + "_err");
            }
            if (spec.ensemble.omega_readout > 0)
                for (int d : spec.distances) {
                    cols.push_back("copt" + std::to_string(d));
                    cols.push_back("copt" + std::to_string(d) + "_err");
                }
            for (const char* c : {"surviving", "samples", "phase_undefined"}) cols.push_back(c);
            break;
        case Engine::phase_model:
            for (const char* c : {"k1", "k2", "d_phi", "omega_bar", "a_bar", "r_tail",
                                  "r_tail_std", "r_final"})
                cols.push_back(c);
            break;
        case Engine::threshold:
            for (const char* c : {"k_c", "uncertainty", "k_lo", "k_hi", "evaluations"})
                cols.push_back(c);
            break;
    }
    return cols;
}

std::string manifest_to_json(const RunManifest& m) {
    json j;
    j["format"] = "omarray-manifest-1";
    j["hash"] = m.hash;
    j["engine"] = m.engine;
    j["version"] = m.version;
    j["seed"] = m.seed;
    j["started_utc"] = m.started_utc;
    j["finished_utc"] = m.finished_utc;
    j["spec"] = json::parse(m.spec_json);
    j["columns"] = m.columns;
    json pts = json::array();
    for (const auto& p : m.points) {
        json vals = json::array();
        for (double v : p.values) {
            if (std::isfinite(v))
                vals.push_back(v);
            else
                vals.push_back(nullptr);  // JSON has no NaN; null round-trips to NaN
        }
        pts.push_back(json{{"index", p.index},
                           {"axis1", p.axis1},
                           {"axis2", p.axis2},
                           {"status", p.status},
                           {"values", std::move(vals)}});
    }
    j["points"] = std::move(pts);
    return j.dump(2);
}

RunManifest manifest_from_json(const std::string& text) {
    try {
        json j = json::parse(text);
        if (j.at("format").get<std::string>() != "omarray-manifest-1")
            throw io_error("manifest: unknown format tag");
        RunManifest m;
        m.hash = j.at("hash").get<std::string>();
        m.engine = j.at("engine").get<std::string>();
        m.version = j.at("version").get<std::string>();
        m.seed = j.at("seed").get<std::uint64_t>();
        m.started_utc = j.at("started_utc").get<std::string>();
        m.finished_utc = j.at("finished_utc").get<std::string>();
        m.spec_json = j.at("spec").dump(2);
        m.columns = j.at("columns").get<std::vector<std::string>>();
        for (const auto& pj : j.at("points")) {
            PointRecord p;
            p.index = pj.at("index").get<int>();
            p.axis1 = pj.at("axis1").get<double>();
            p.axis2 = pj.at("axis2").get<double>();
            p.status = pj.at("status").get<std::string>();
            for (const auto& v : pj.at("values"))
                p.values.push_back(v.is_null() ? std::numeric_limits<double>::quiet_NaN()
                                               : v.get<double>());
            m.points.push_back(std::move(p));
        }
        return m;
    } catch (const json::exception& e) {
        throw io_error(std::string("manifest: ") + e.what());
    }
}

std::string results_csv(const RunManifest& m) {
    std::ostringstream o;
    o << "# sweep results\n";
    o << "# manifest_hash: " << m.hash << "\n";
    o << "# engine: " << m.engine << "\n";
    o << "# seed: " << m.seed << "\n";
    o << "# points: " << m.done_count() << " done, " << m.failed_count() << " failed, "
      << (m.points.size() - m.done_count() - m.failed_count()) << " pending\n";
    for (size_t i = 0; i < m.columns.size(); ++i)
        o << m.columns[i] << (i + 1 < m.columns.size() ? "," : "\n");
    for (const auto& p : m.points) {
        if (!p.done()) continue;
        for (size_t i = 0; i < p.values.size(); ++i)
            o << format_value(p.values[i]) << (i + 1 < p.values.size() ? "," : "\n");
    }
    return o.str();
}

RunManifest execute(const SweepSpec& spec, const ExecuteOptions& opts) {
    spec.validate();
    if (opts.workers < 1) throw invalid_params("execute: workers must be at least 1");

    const int n1 = spec.axis1.points;
    const int n2 = std::max(1, spec.axis2.points);
    const int total = n1 * n2;
    const bool has2 = spec.axis2.points > 0;

    RunManifest m;
    m.hash = spec_hash(spec);
    m.engine = engine_name(spec.engine);
    m.version = engine_version();
    m.seed = spec.ensemble.seed;
    m.spec_json = spec_to_json(spec);
    m.columns = csv_columns(spec);
    m.started_utc = now_utc();
    m.points.resize(total);
    for (int i1 = 0; i1 < n1; ++i1)
        for (int i2 = 0; i2 < n2; ++i2) {
            PointRecord& pr = m.points[static_cast<size_t>(i1) * n2 + i2];
            pr.index = i1 * n2 + i2;
            pr.axis1 = spec.axis1.param.empty() ? i1 : spec.axis1.value(i1);
            pr.axis2 = has2 ? spec.axis2.value(i2) : 0.0;
        }

    std::error_code ec;
    fs::create_directories(spec.out, ec);
    if (ec) throw io_error("cannot create output directory " + spec.out + ": " + ec.message());
    const fs::path manifest_path = fs::path(spec.out) / "manifest.json";
    const fs::path csv_path = fs::path(spec.out) / "results.csv";

    if (opts.resume && fs::exists(manifest_path)) {
        try {
            RunManifest old = manifest_from_json(read_file(manifest_path));
            if (old.hash == m.hash && old.points.size() == m.points.size() &&
                old.columns == m.columns)
                for (int i = 0; i < total; ++i)
                    if (old.points[i].done()) m.points[i] = old.points[i];
        } catch (const error&) {
            // an unreadable or foreign manifest never blocks a fresh run
        }
    }

    std::mutex mu;
    auto flush_locked = [&]() {
        write_atomic(manifest_path, manifest_to_json(m));
        write_atomic(csv_path, results_csv(m));
    };

    auto fill_row = [&](PointRecord& pr, const std::vector<double>& row) {
        pr.values.clear();
        pr.values.push_back(pr.axis1);
        if (has2) pr.values.push_back(pr.axis2);
        pr.values.insert(pr.values.end(), row.begin(), row.end());
        pr.status = "done";
    };

    if (spec.axis1.continuation != Continuation::none) {
        // Warm-start chains are resumed only as a whole: later points consume
        // earlier states, so a partial chain cannot be continued point-wise.
        bool all_done = true;
        for (const auto& p : m.points) all_done = all_done && p.done();
        if (!all_done) {
            MeanfieldSweepOptions mo = spec.meanfield;
            mo.workers = opts.workers;
            try {
                auto grid = sweep_phase_diagram(spec.params, spec.hilbert, spec.axis1,
                                                spec.axis2, mo);
                for (int i = 0; i < total; ++i) fill_row(m.points[i], meanfield_row(grid[i]));
            } catch (const std::exception& e) {
                for (auto& p : m.points) p.status = std::string("failed: ") + e.what();
            }
        }
        std::lock_guard<std::mutex> lock(mu);
        m.finished_utc = now_utc();
        flush_locked();
        return m;
    }

    std::atomic<int> next{0};
    auto work = [&]() {
        for (int i = next.fetch_add(1); i < total; i = next.fetch_add(1)) {
            if (m.points[i].done()) continue;  // filled during resume, before workers started
            const int i1 = i / n2, i2 = i % n2;
            const double v1 = spec.axis1.value(i1);
            const double v2 = has2 ? spec.axis2.value(i2) : 0.0;
            std::vector<double> row;
            std::string failure;
            try {
                switch (spec.engine) {
                    case Engine::meanfield: row = eval_meanfield(spec, v1, has2, v2); break;
                    case Engine::lattice: row = eval_lattice(spec, v1, has2, v2); break;
                    case Engine::phase_model: row = eval_phase_model(spec, v1, has2, v2); break;
                    case Engine::threshold: row = eval_threshold(spec, v1, has2, v2); break;
                }
            } catch (const std::exception& e) {
                failure = std::string("failed: ") + e.what();
            }
            std::lock_guard<std::mutex> lock(mu);
            if (failure.empty())
                fill_row(m.points[i], row);
            else
                m.points[i].status = failure;
            flush_locked();
            if (!opts.quiet)
                std::fprintf(stderr, "[%s] point %d/%d %s\n", m.engine.c_str(), i + 1, total,
                             m.points[i].status.c_str());
        }
    };

    const int workers = std::max(1, std::min(opts.workers, total));
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }

    std::lock_guard<std::mutex> lock(mu);
    m.finished_utc = now_utc();
    flush_locked();
    return m;
}

}  // namespace omarray
