#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "omarray/sweep.hpp"

namespace omarray {

struct RecipeOptions {
    double scale = 1.0;  // shrinks grids, lattice sizes and realization counts together
    std::uint64_t seed = 1;
    std::string out;  // defaults to runs/<name>
    int workers = 1;
    bool quiet = true;
};

struct RecipeResult {
    std::string name;
    std::string out_dir;
    std::vector<std::string> files;      // figure CSV first, then per-sweep results
    std::vector<RunManifest> manifests;  // one per sub-sweep, same order as files
    int failed_points = 0;
};

// Pre-registered figure datasets. Each recipe pins the published parameter
// set, executes one sweep per plotted line into <out>/<line>/, and emits a
// figure-keyed CSV <out>/<name>.csv whose comment header lists the source
// manifest hashes and every parameter the source left open ("inferred").
//
//   fig2a   g2(0) over the bare detuning and the optical hopping
//   fig2b   g2(0) along the constant-photon-number line, strong and weak drive
//   fig3a   mechanical coherence r over detuning and mechanical coupling
//   fig3d   r and the oscillating photon component against the coupling
//   fig4a   lattice phase correlations C(d) for a set of couplings
//   fig4b   C at the far distance against coupling for three coordination numbers
//   fig4c   coupling threshold against the quantum parameter g0/kappa
//   figS1b  mechanical phase diffusion against detuning, bare and coupled
//   figS2a  C at the far distance against coupling for growing lattice sizes
//   figS2b  C at the far distance, periodic against open boundaries
//
// The scale knob trades fidelity for runtime: lattice edges, realization
// counts and grid resolutions shrink together, and distances follow the
// lattice so the far-distance columns stay meaningful. Unknown names throw
// invalid_params.
RecipeResult run_figure_recipe(const std::string& name, const RecipeOptions& opts = {});

std::vector<std::string> recipe_names();

}  // namespace omarray
