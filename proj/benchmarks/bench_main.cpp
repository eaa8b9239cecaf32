#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "omarray/langevin.hpp"
#include "omarray/lattice.hpp"
#include "omarray/meanfield.hpp"
#include "omarray/operators.hpp"
#include "omarray/wigner.hpp"

using namespace omarray;

namespace {

SystemParams oscillator_params() {
    SystemParams p;
    p.delta = 0.81;
    p.g0 = 0.3;
    p.alpha_L = 0.33;
    p.kappa = 0.3;
    p.gamma = 0.074;
    return p;
}

Matrix random_density(int dim) {
    std::mt19937 rng(99);
    std::normal_distribution<double> g;
    Matrix A(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) A(i, j) = Complex(g(rng), g(rng));
    Matrix rho = A * A.adjoint();
    rho /= rho.trace().real();
    return rho;
}

}  // namespace

// Sparse Lindblad right-hand side at fixed mean fields; the O(dim^2) kernel
// every master-equation step is built from.
static void BM_MeanfieldRhs(benchmark::State& state) {
    const int levels = static_cast<int>(state.range(0));
    const HilbertSpec h{levels, levels};
    MeanfieldEvolver ev(oscillator_params(), h);
    const Matrix rho = random_density(h.dim());
    Matrix out;
    ev.rhs(rho, Complex(0.5, 0.1), Complex(1.0, -0.3), out);
    for (auto _ : state) {
        ev.rhs(rho, Complex(0.5, 0.1), Complex(1.0, -0.3), out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_MeanfieldRhs)->Arg(8)->Arg(12)->Arg(20);

// Full self-consistent RK4 step (mean fields recomputed per substage).
static void BM_MeanfieldStep(benchmark::State& state) {
    const int levels = static_cast<int>(state.range(0));
    const HilbertSpec h{levels, levels};
    MeanfieldEvolver ev(oscillator_params(), h);
    Matrix rho = DensityMatrix::coherent_product(0.3, 0.5, h).mat();
    for (auto _ : state) {
        ev.step(rho, 0.01);
        benchmark::DoNotOptimize(rho.data());
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_MeanfieldStep)->Arg(8)->Arg(12)->Arg(20);

// One stochastic lattice step; items = site updates per second.
static void BM_LangevinStep(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    SystemParams p;
    p.delta = 0.34 - 0.03 * 0.03;
    p.g0 = 0.03;
    p.alpha_L = 11.0;
    p.kappa = 0.3;
    p.gamma = 0.074;
    p.K = 0.1;
    p.z = 4;
    const Lattice lat(LatticeConfig{Topology::square, n, Boundary::periodic});
    LangevinEngine engine(p, lat);
    NoiseSpec noise;
    LatticeState s = engine.initial_state(noise);
    const double dt = 2.0 * M_PI / 128.0;
    for (auto _ : state) {
        engine.step(s, dt, noise);
        benchmark::DoNotOptimize(s.beta.data());
    }
    state.SetItemsProcessed(state.iterations() * lat.config().sites());
}
BENCHMARK(BM_LangevinStep)->Arg(10)->Arg(30);

// Single Wigner evaluation through the displaced-parity form.
static void BM_WignerPoint(benchmark::State& state) {
    const int levels = static_cast<int>(state.range(0));
    const HilbertSpec h{2, levels};
    DensityMatrix joint = DensityMatrix::coherent_product(0.0, 1.2, h);
    const Matrix rho_b = partial_trace_mechanical(joint.mat(), h);
    for (auto _ : state) {
        Complex w = wigner_point(rho_b, Complex(0.8, -0.4));
        benchmark::DoNotOptimize(w);
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_WignerPoint)->Arg(14)->Arg(24);

BENCHMARK_MAIN();
