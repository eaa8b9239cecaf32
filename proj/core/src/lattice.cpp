#include "omarray/lattice.hpp"

#include <algorithm>
#include <queue>
#include <sstream>

#include "omarray/errors.hpp"

namespace omarray {

int LatticeConfig::sites() const {
    return topology == Topology::all_to_all ? n : n * n;
}

int LatticeConfig::coordination() const {
    switch (topology) {
        case Topology::square: return 4;
        case Topology::hexagonal: return 6;
        case Topology::all_to_all: return sites() - 1;
    }
    return 0;
}

void LatticeConfig::validate() const {
    if (n < 1) throw invalid_params("lattice size must be positive");
    const bool grid = topology != Topology::all_to_all;
    if (grid && boundary == Boundary::periodic && n % 2 != 0) {
        std::ostringstream msg;
        msg << "periodic lattices need even linear size so the wraparound "
               "distance n/2 is well defined, got n = " << n;
        throw invalid_params(msg.str());
    }
}

namespace {

int wrap(int x, int n) { return (x % n + n) % n; }

// grid offsets defining each topology's neighbour stencil
const std::pair<int, int> kSquareSteps[4] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
const std::pair<int, int> kHexSteps[6] = {{1, 0},  {-1, 0}, {0, 1},
                                          {0, -1}, {1, 1},  {-1, -1}};

}  // namespace

Lattice::Lattice(const LatticeConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    const int ns = cfg_.sites();
    offsets_.assign(ns + 1, 0);

    if (cfg_.topology == Topology::all_to_all) {
        neighbors_.reserve(static_cast<size_t>(ns) * (ns - 1));
        for (int i = 0; i < ns; ++i) {
            offsets_[i] = static_cast<int>(neighbors_.size());
            for (int j = 0; j < ns; ++j)
                if (j != i) neighbors_.push_back(j);
        }
        offsets_[ns] = static_cast<int>(neighbors_.size());
        return;
    }

    const int n = cfg_.n;
    const auto* steps = cfg_.topology == Topology::square ? kSquareSteps : kHexSteps;
    const int n_steps = cfg_.topology == Topology::square ? 4 : 6;
    const bool periodic = cfg_.boundary == Boundary::periodic;

    for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) {
            const int i = y * n + x;
            offsets_[i] = static_cast<int>(neighbors_.size());
            for (int s = 0; s < n_steps; ++s) {
                int nx = x + steps[s].first;
                int ny = y + steps[s].second;
                if (periodic) {
                    nx = wrap(nx, n);
                    ny = wrap(ny, n);
                } else if (nx < 0 || nx >= n || ny < 0 || ny >= n) {
                    continue;
                }
                const int j = ny * n + nx;
                if (j != i) neighbors_.push_back(j);
            }
        }
    }
    offsets_[ns] = static_cast<int>(neighbors_.size());
}

void Lattice::build_pair_cache() const {
    if (pair_cache_ready_) return;
    const int ns = cfg_.sites();
    pair_cache_.clear();

    auto put = [this](int d, int i, int j) {
        if (d >= static_cast<int>(pair_cache_.size())) pair_cache_.resize(d + 1);
        pair_cache_[d].emplace_back(std::min(i, j), std::max(i, j));
    };

    for (int i = 0; i < ns; ++i) put(0, i, i);

    if (cfg_.topology == Topology::all_to_all) {
        for (int i = 0; i < ns; ++i)
            for (int j = i + 1; j < ns; ++j) put(1, i, j);
        pair_cache_ready_ = true;
        return;
    }

    if (cfg_.topology == Topology::square) {
        // pairs separated by d along a single axis; periodic separation is
        // the shorter way around
        const int n = cfg_.n;
        const bool periodic = cfg_.boundary == Boundary::periodic;
        const int d_max = periodic ? n / 2 : n - 1;
        for (int d = 1; d <= d_max; ++d) {
            for (int y = 0; y < n; ++y) {
                for (int x = 0; x < n; ++x) {
                    const int i = y * n + x;
                    if (periodic || x + d < n) put(d, i, y * n + wrap(x + d, n));
                    if (periodic || y + d < n) put(d, i, wrap(y + d, n) * n + x);
                }
            }
        }
        for (auto& v : pair_cache_) {
            std::sort(v.begin(), v.end());
            v.erase(std::unique(v.begin(), v.end()), v.end());
        }
        pair_cache_ready_ = true;
        return;
    }

    // hexagonal: breadth-first graph distance from every site
    std::vector<int> dist(ns);
    for (int src = 0; src < ns; ++src) {
        std::fill(dist.begin(), dist.end(), -1);
        dist[src] = 0;
        std::queue<int> q;
        q.push(src);
        while (!q.empty()) {
            const int u = q.front();
            q.pop();
            for (int k = offsets_[u]; k < offsets_[u + 1]; ++k) {
                const int v = neighbors_[k];
                if (dist[v] < 0) {
                    dist[v] = dist[u] + 1;
                    q.push(v);
                }
            }
        }
        for (int j = src + 1; j < ns; ++j)
            if (dist[j] > 0) put(dist[j], src, j);
    }
    pair_cache_ready_ = true;
}

std::vector<std::pair<int, int>> Lattice::pairs_at_distance(int d) const {
    if (d < 0) throw invalid_params("pair distance must be non-negative");
    build_pair_cache();
    if (d >= static_cast<int>(pair_cache_.size())) return {};
    return pair_cache_[d];
}

int Lattice::max_distance() const {
    build_pair_cache();
    return static_cast<int>(pair_cache_.size()) - 1;
}

}  // namespace omarray
