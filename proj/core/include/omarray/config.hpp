#pragma once

#include <string>
#include <vector>

#include "omarray/langevin.hpp"
#include "omarray/lattice.hpp"
#include "omarray/meanfield.hpp"
#include "omarray/params.hpp"
#include "omarray/phase_ensemble.hpp"

namespace omarray {

// Which engine a sweep drives. The meanfield engine evolves the quantum
// density matrix of the self-consistent cell, lattice runs the stochastic
// amplitude dynamics on a finite graph, phase_model integrates the reduced
// phase ensemble with coefficients calibrated from the cell, and threshold
// bisects the coupling against a correlation criterion per grid point.
enum class Engine { meanfield, lattice, phase_model, threshold };

// Engine names as they appear in config files and manifests. phase_model
// is spelled "phase-model" there.
std::string engine_name(Engine e);
Engine engine_from_name(const std::string& name);

// Settings specific to the phase_model engine: the ensemble itself plus the
// amplitude grid handed to the limit-cycle calibration.
struct PhaseEngineSettings {
    PhaseEnsembleOptions ensemble{};
    double a_min = 0.05;
    double a_max = 6.0;
    int a_points = 80;
    double tail_fraction = 0.25;  // trailing share of the series averaged into r_tail
};

// Settings specific to the threshold engine; the coupling bracket is
// validated by the detector itself.
struct ThresholdSettings {
    int criterion_distance = 1;
    double criterion_value = 0.1;
    double k_lo = 0.0;
    double k_hi = 0.5;
};

// A fully resolved sweep: one engine, a base parameter set, and one or two
// axes over parameter names. axis2.points == 0 means a 1-D sweep. Axis
// parameters must name SystemParams fields; continuation requires a 1-D
// sweep on the meanfield engine, since only the density-matrix evolution
// supports warm starts.
struct SweepSpec {
    Engine engine = Engine::meanfield;
    SystemParams params{};
    SweepAxis axis1{};
    SweepAxis axis2{"", 0.0, 0.0, 0};  // points == 0: no second axis
    HilbertSpec hilbert{};
    LatticeConfig lattice{};
    EnsembleOptions ensemble{};
    MeanfieldSweepOptions meanfield{};
    PhaseEngineSettings phase{};
    ThresholdSettings threshold{};
    std::vector<int> distances{0, 1, 2, 4};  // C(d) columns for the lattice engine
    std::string out = "sweep-out";

    // Parameters the source material leaves open; carried verbatim into the
    // manifest so a dataset states what was chosen rather than given.
    std::vector<std::string> inferred;

    int points() const { return axis1.points * std::max(1, axis2.points); }
    void validate() const;
};

// Parses the INI-style sweep grammar:
//
//   [section]
//   key = value     # trailing comments allowed
//
// Sections: sweep, params, axis1, axis2, hilbert, lattice, run, meanfield,
// phase, threshold. Keys and sections outside the grammar are hard errors
// naming the offender with its line number, as are malformed values.
// Omitted keys keep the documented defaults of SweepSpec. The returned spec
// has been validated.
SweepSpec parse_config(const std::string& text);

// Reads the file and parses its contents; file problems throw io_error.
SweepSpec load_config_file(const std::string& path);

}  // namespace omarray
