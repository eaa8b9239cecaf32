#pragma once

#include <utility>
#include <vector>

namespace omarray {

// Finite coupling graphs for the semiclassical lattice dynamics. Three
// topologies are supported:
//
//   square      n x n grid, nearest neighbours along both axes, z = 4
//   hexagonal   n x n grid with the two (+1,+1)/(-1,-1) diagonals added,
//               the standard triangular embedding, z = 6
//   all_to_all  n sites, every pair coupled, z = n - 1 (the classical
//               counterpart of the mean-field ansatz)
//
// Boundaries are periodic or open for the grid topologies and meaningless
// for all_to_all. Periodic grids require even n so that the wraparound
// distance d = n/2 is unambiguous.

enum class Topology { square, hexagonal, all_to_all };
enum class Boundary { periodic, open };

struct LatticeConfig {
    Topology topology = Topology::square;
    int n = 10;  // linear size for grids, total sites for all_to_all
    Boundary boundary = Boundary::periodic;

    int sites() const;
    int coordination() const;  // z as defined by the topology
    void validate() const;
};

// Immutable adjacency built once from a config. Neighbour lists are stored
// in compressed form: the neighbours of site i are
// neighbors()[offsets()[i] .. offsets()[i+1]).
class Lattice {
  public:
    explicit Lattice(const LatticeConfig& cfg);

    const LatticeConfig& config() const { return cfg_; }
    int sites() const { return cfg_.sites(); }
    int coordination() const { return cfg_.coordination(); }

    const std::vector<int>& offsets() const { return offsets_; }
    const std::vector<int>& neighbors() const { return neighbors_; }

    int degree(int site) const { return offsets_[site + 1] - offsets_[site]; }

    // Unordered site pairs at separation d. The metric is axis-aligned
    // distance on the square lattice (pairs offset by d along one axis,
    // wrapped when periodic), graph distance on the hexagonal lattice, and
    // hop count (0 or 1) on the all-to-all graph. d = 0 gives self pairs.
    std::vector<std::pair<int, int>> pairs_at_distance(int d) const;

    // Largest separation with at least one pair.
    int max_distance() const;

  private:
    LatticeConfig cfg_;
    std::vector<int> offsets_;
    std::vector<int> neighbors_;
    // graph distances are computed on demand and kept for reuse
    mutable std::vector<std::vector<std::pair<int, int>>> pair_cache_;
    mutable bool pair_cache_ready_ = false;
    void build_pair_cache() const;
};

}  // namespace omarray
