#include "omarray/config.hpp"

#include <cctype>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "omarray/errors.hpp"

namespace omarray {

std::string engine_name(Engine e) {
    switch (e) {
        case Engine::meanfield: return "meanfield";
        case Engine::lattice: return "lattice";
        case Engine::phase_model: return "phase-model";
        case Engine::threshold: return "threshold";
    }
    throw invalid_params("engine_name: unhandled engine value");
}

Engine engine_from_name(const std::string& name) {
    if (name == "meanfield") return Engine::meanfield;
    if (name == "lattice") return Engine::lattice;
    if (name == "phase-model") return Engine::phase_model;
    if (name == "threshold") return Engine::threshold;
    throw config_error("unknown engine \"" + name +
                       "\" (expected meanfield, lattice, phase-model or threshold)");
}

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
    size_t used = 0;
    double out;
    try {
        out = std::stod(v, &used);
    } catch (const std::exception&) {
        throw config_error("key \"" + key + "\": cannot parse \"" + v + "\" as a number");
    }
    if (used != v.size())
        throw config_error("key \"" + key + "\": trailing characters in \"" + v + "\"");
    return out;
}

int to_int(const std::string& key, const std::string& v) {
    double d = to_double(key, v);
    int i = static_cast<int>(d);
    if (static_cast<double>(i) != d)
        throw config_error("key \"" + key + "\": expected an integer, got \"" + v + "\"");
    return i;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
    try {
        size_t used = 0;
        std::uint64_t out = std::stoull(v, &used);
        if (used != v.size()) throw std::invalid_argument("");
        return out;
    } catch (const std::exception&) {
        throw config_error("key \"" + key + "\": cannot parse \"" + v + "\" as an unsigned integer");
    }
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
    if (v == "false" || v == "no" || v == "off" || v == "0") return false;
    throw config_error("key \"" + key + "\": expected a boolean, got \"" + v + "\"");
}

std::vector<int> to_int_list(const std::string& key, const std::string& v) {
    std::vector<int> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty())
            throw config_error("key \"" + key + "\": empty entry in list \"" + v + "\"");
        out.push_back(to_int(key, item));
    }
    if (out.empty()) throw config_error("key \"" + key + "\": empty list");
    return out;
}

Continuation continuation_from(const std::string& v) {
    if (v == "none") return Continuation::none;
    if (v == "forward") return Continuation::forward;
    if (v == "backward") return Continuation::backward;
    if (v == "both") return Continuation::both;
    throw config_error("unknown continuation \"" + v +
                       "\" (expected none, forward, backward or both)");
}

Topology topology_from(const std::string& v) {
    if (v == "square") return Topology::square;
    if (v == "hexagonal") return Topology::hexagonal;
    if (v == "all_to_all") return Topology::all_to_all;
    throw config_error("unknown topology \"" + v +
                       "\" (expected square, hexagonal or all_to_all)");
}

Boundary boundary_from(const std::string& v) {
    if (v == "periodic") return Boundary::periodic;
    if (v == "open") return Boundary::open;
    throw config_error("unknown boundary \"" + v + "\" (expected periodic or open)");
}

void apply_axis(SweepAxis& ax, const std::string& key, const std::string& v,
                const std::string& section) {
    if (key == "param") ax.param = v;
    else if (key == "min") ax.min = to_double(key, v);
    else if (key == "max") ax.max = to_double(key, v);
    else if (key == "points") ax.points = to_int(key, v);
    else if (key == "continuation") ax.continuation = continuation_from(v);
    else throw config_error("[" + section + "] unknown key \"" + key + "\"");
}

// One key inside one section. Messages carry no line numbers; the caller
// adds them.
void apply(SweepSpec& s, const std::string& section, const std::string& key,
           const std::string& v) {
    if (section == "sweep") {
        if (key == "engine") s.engine = engine_from_name(v);
        else if (key == "out") s.out = v;
        else if (key == "distances") s.distances = to_int_list(key, v);
        else throw config_error("[sweep] unknown key \"" + key + "\"");
    } else if (section == "params") {
        if (key == "z") s.params.z = to_int(key, v);
        else {
            double val = to_double(key, v);
            try {
                set_param(s.params, key, val);
            } catch (const invalid_params&) {
                throw config_error("[params] unknown key \"" + key + "\"");
            }
        }
    } else if (section == "axis1") {
        apply_axis(s.axis1, key, v, section);
    } else if (section == "axis2") {
        apply_axis(s.axis2, key, v, section);
    } else if (section == "hilbert") {
        if (key == "photon_levels") s.hilbert.photon_levels = to_int(key, v);
        else if (key == "phonon_levels") s.hilbert.phonon_levels = to_int(key, v);
        else throw config_error("[hilbert] unknown key \"" + key + "\"");
    } else if (section == "lattice") {
        if (key == "topology") s.lattice.topology = topology_from(v);
        else if (key == "n") s.lattice.n = to_int(key, v);
        else if (key == "boundary") s.lattice.boundary = boundary_from(v);
        else throw config_error("[lattice] unknown key \"" + key + "\"");
    } else if (section == "run") {
        if (key == "seed") s.ensemble.seed = s.phase.ensemble.seed = to_u64(key, v);
        else if (key == "realizations") s.ensemble.realizations = to_int(key, v);
        else if (key == "t_burn") s.ensemble.t_burn = to_double(key, v);
        else if (key == "t_measure") s.ensemble.t_measure = to_double(key, v);
        else if (key == "dt") s.ensemble.dt = to_double(key, v);
        else if (key == "threads") s.ensemble.threads = to_int(key, v);
        else if (key == "omega_readout") s.ensemble.omega_readout = to_double(key, v);
        else if (key == "seed_radius") s.ensemble.seed_radius = to_double(key, v);
        else if (key == "noise") s.ensemble.noise = to_bool(key, v);
        else if (key == "uniform_start") s.ensemble.uniform_start = to_bool(key, v);
        else throw config_error("[run] unknown key \"" + key + "\"");
    } else if (section == "meanfield") {
        auto& mf = s.meanfield;
        if (key == "dt") mf.steady.dt = to_double(key, v);
        else if (key == "t_min") mf.steady.t_min = to_double(key, v);
        else if (key == "t_max") mf.steady.t_max = to_double(key, v);
        else if (key == "window_periods") mf.steady.window_periods = to_double(key, v);
        else if (key == "r_rel_tol") mf.steady.r_rel_tol = to_double(key, v);
        else if (key == "ringdown_floor") mf.steady.ringdown_floor = to_double(key, v);
        else if (key == "record_stride") mf.steady.record_stride = to_int(key, v);
        else if (key == "truncation_tol") mf.steady.truncation_tol = to_double(key, v);
        else if (key == "auto_escalate") mf.auto_escalate = to_bool(key, v);
        else if (key == "escalated_photon_levels") mf.escalated.photon_levels = to_int(key, v);
        else if (key == "escalated_phonon_levels") mf.escalated.phonon_levels = to_int(key, v);
        else if (key == "compute_diffusion") mf.compute_diffusion = to_bool(key, v);
        else if (key == "diffusion_dt") mf.diffusion.dt = to_double(key, v);
        else if (key == "diffusion_t_max") mf.diffusion.t_max = to_double(key, v);
        else if (key == "diffusion_decay_constants") mf.diffusion.decay_constants = to_double(key, v);
        else if (key == "hold_effective_detuning") mf.hold_effective_detuning = to_bool(key, v);
        else if (key == "seed_displacement") mf.seed_displacement = Complex(to_double(key, v), 0.0);
        else throw config_error("[meanfield] unknown key \"" + key + "\"");
    } else if (section == "phase") {
        auto& ph = s.phase;
        if (key == "oscillators") ph.ensemble.oscillators = to_int(key, v);
        else if (key == "t_end") ph.ensemble.t_end = to_double(key, v);
        else if (key == "dt") ph.ensemble.dt = to_double(key, v);
        else if (key == "record_stride") ph.ensemble.record_stride = to_int(key, v);
        else if (key == "clustered_start") ph.ensemble.clustered_start = to_bool(key, v);
        else if (key == "a_min") ph.a_min = to_double(key, v);
        else if (key == "a_max") ph.a_max = to_double(key, v);
        else if (key == "a_points") ph.a_points = to_int(key, v);
        else if (key == "tail_fraction") ph.tail_fraction = to_double(key, v);
        else throw config_error("[phase] unknown key \"" + key + "\"");
    } else if (section == "threshold") {
        auto& th = s.threshold;
        if (key == "criterion_distance") th.criterion_distance = to_int(key, v);
        else if (key == "criterion_value") th.criterion_value = to_double(key, v);
        else if (key == "k_lo") th.k_lo = to_double(key, v);
        else if (key == "k_hi") th.k_hi = to_double(key, v);
        else throw config_error("[threshold] unknown key \"" + key + "\"");
    } else {
        throw config_error("unknown section [" + section + "]");
    }
}

}  // namespace

void SweepSpec::validate() const {
    try {
        params.validate();
    } catch (const invalid_params& e) {
        throw config_error(std::string("[params] ") + e.what());
    }
    if (out.empty()) throw config_error("[sweep] out must not be empty");

    if (axis1.points < 1) throw config_error("[axis1] points must be at least 1");
    if (axis2.points < 0) throw config_error("[axis2] points must not be negative");
    if (!axis2.param.empty() && axis2.points == 0)
        throw config_error("[axis2] points is required alongside param");
    auto probe_axis = [&](const SweepAxis& ax, const char* which) {
        SystemParams p = params;
        try {
            set_param(p, ax.param, ax.min);
        } catch (const invalid_params&) {
            throw config_error(std::string("[") + which + "] no parameter named \"" +
                               ax.param + "\"");
        }
    };
    if (!axis1.param.empty()) probe_axis(axis1, "axis1");
    if (axis2.points > 0) {
        if (axis1.param.empty())
            throw config_error("[axis2] requires a non-empty [axis1]");
        if (axis2.param.empty())
            throw config_error("[axis2] param is required when points > 0");
        probe_axis(axis2, "axis2");
        if (axis2.continuation != Continuation::none)
            throw config_error("[axis2] continuation is allowed only on a 1-D sweep");
        if (axis1.continuation != Continuation::none)
            throw config_error("[axis1] continuation is allowed only on a 1-D sweep");
    }
    if (axis1.continuation != Continuation::none && engine != Engine::meanfield)
        throw config_error(
            "[axis1] continuation requires the meanfield engine; the stochastic "
            "engines have no warm starts");

    if (engine == Engine::meanfield) {
        try {
            hilbert.validate();
            meanfield.escalated.validate();
        } catch (const invalid_params& e) {
            throw config_error(std::string("[hilbert] ") + e.what());
        }
    }
    if (engine == Engine::lattice || engine == Engine::threshold) {
        try {
            lattice.validate();
        } catch (const invalid_params& e) {
            throw config_error(std::string("[lattice] ") + e.what());
        }
        if (distances.empty()) throw config_error("[sweep] distances must not be empty");
        for (int d : distances)
            if (d < 0) throw config_error("[sweep] distances must be non-negative");
    }
    if (engine == Engine::threshold) {
        if (threshold.criterion_distance < 0)
            throw config_error("[threshold] criterion_distance must be non-negative");
        if (threshold.criterion_value < 0)
            throw config_error("[threshold] criterion_value must be non-negative");
        if (!(threshold.k_lo < threshold.k_hi))
            throw config_error("[threshold] need k_lo < k_hi");
    }
    if (engine == Engine::phase_model) {
        if (phase.a_points < 2) throw config_error("[phase] a_points must be at least 2");
        if (!(phase.a_min > 0) || !(phase.a_max > phase.a_min))
            throw config_error("[phase] need 0 < a_min < a_max");
        if (!(phase.tail_fraction > 0) || phase.tail_fraction > 1)
            throw config_error("[phase] tail_fraction must be in (0, 1]");
    }
}

SweepSpec parse_config(const std::string& text) {
    SweepSpec spec;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line = 0;
    auto fail = [&](const std::string& what) -> void {
        throw config_error("line " + std::to_string(line) + ": " + what);
    };
    while (std::getline(in, raw)) {
        ++line;
        size_t hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        std::string s = trim(raw);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') fail("unterminated section header \"" + s + "\"");
            section = trim(s.substr(1, s.size() - 2));
            if (section.empty()) fail("empty section header");
            continue;
        }
        size_t eq = s.find('=');
        if (eq == std::string::npos) fail("expected key = value, got \"" + s + "\"");
        std::string key = trim(s.substr(0, eq));
        std::string value = trim(s.substr(eq + 1));
        if (key.empty()) fail("missing key before '='");
        if (value.empty()) fail("key \"" + key + "\" has no value");
        if (section.empty()) fail("key \"" + key + "\" outside any section");
        try {
            apply(spec, section, key, value);
        } catch (const config_error& e) {
            fail(e.what());
        }
    }
    spec.validate();
    return spec;
}

SweepSpec load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot read config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace omarray
