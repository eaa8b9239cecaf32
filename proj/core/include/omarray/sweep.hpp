#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "omarray/config.hpp"

namespace omarray {

// One grid point of an executed sweep. values lines up with the manifest's
// column list (axis columns included); it is empty while the point is
// pending and when it failed.
struct PointRecord {
    int index = 0;  // axis1-major: index = i1 * max(1, axis2.points) + i2
    double axis1 = 0.0;
    double axis2 = 0.0;
    std::string status = "pending";  // "pending" | "done" | "failed: <reason>"
    std::vector<double> values;

    bool done() const { return status == "done"; }
    bool failed() const { return status.rfind("failed", 0) == 0; }
};

// The run record written next to every dataset. Every emitted data file
// carries the manifest hash in its comment header, so a CSV is traceable to
// exactly one manifest and hence one resolved configuration.
struct RunManifest {
    std::string hash;       // content hash of the resolved spec
    std::string engine;
    std::string version;    // library version at run time
    std::uint64_t seed = 0;
    std::string started_utc;
    std::string finished_utc;
    std::string spec_json;  // full resolved configuration, canonical JSON
    std::vector<std::string> columns;
    std::vector<PointRecord> points;

    int done_count() const;
    int failed_count() const;
};

// Version string recorded in manifests.
std::string engine_version();

// Canonical JSON serialization of a resolved spec. Key order is sorted, so
// equal specs serialize identically regardless of config-file spelling.
std::string spec_to_json(const SweepSpec& spec);

// FNV-1a hash (16 hex digits) over the canonical serialization, with the
// output directory and the inferred-parameter notes excluded: neither
// changes the numbers a run produces.
std::string spec_hash(const SweepSpec& spec);

// CSV column names for a spec, axis columns first. Stable per engine:
//   meanfield   r, omega_eff, n_photon, n_phonon, ac_photon, g2_0, d_phi,
//               converged, bistable, truncation_warning, fit_flagged
//   lattice     c{d}, c{d}_err per requested distance, then copt{d},
//               copt{d}_err per distance when a readout frequency is set,
//               then surviving, samples, phase_undefined
//   phase-model k1, k2, d_phi, omega_bar, a_bar, r_tail, r_tail_std, r_final
//   threshold   k_c, uncertainty, k_lo, k_hi, evaluations
std::vector<std::string> csv_columns(const SweepSpec& spec);

struct ExecuteOptions {
    int workers = 1;
    bool resume = true;  // reuse completed points from a manifest with the same hash
    bool quiet = true;   // per-point progress lines on stderr when false
};

// Runs every grid point and writes <out>/manifest.json plus
// <out>/results.csv, refreshing both after every completed point with an
// atomic write-then-rename. Points are independent tasks on a small worker
// pool; warm-start continuation sweeps instead delegate to the meanfield
// grid evaluator as whole lines, since later points consume earlier states.
//
// Re-running with an unchanged spec skips points already marked done in the
// existing manifest (whole sweeps only for continuation runs) and emits
// identical files. Per-point engine failures are recorded in the manifest
// and do not stop the remaining points.
RunManifest execute(const SweepSpec& spec, const ExecuteOptions& opts = {});

// Serialization used by execute; exposed for tests and tooling.
std::string manifest_to_json(const RunManifest& m);
RunManifest manifest_from_json(const std::string& text);
std::string results_csv(const RunManifest& m);

}  // namespace omarray
