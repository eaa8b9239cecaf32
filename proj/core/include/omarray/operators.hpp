#pragma once

#include <complex>
#include <utility>

#include <Eigen/Dense>

#include "omarray/params.hpp"

namespace omarray {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

constexpr Complex I{0.0, 1.0};

// Bosonic annihilation operator on a truncated Fock space:
// a|n> = sqrt(n)|n-1>, entries a(n-1, n) = sqrt(n).
Matrix build_annihilation(int levels);

Matrix kron(const Matrix& A, const Matrix& B);

// Embed a single-subsystem operator into the joint space. The photon index
// is the slow tensor factor: joint index = n_ph * phonon_levels + n_m.
Matrix photon_embed(const Matrix& op, const HilbertSpec& h);
Matrix phonon_embed(const Matrix& op, const HilbertSpec& h);

// H = -delta a'a + omega b'b - g0 (b + b') a'a + alpha_L (a + a'), Hermitian by
// construction (exactly, not just to rounding).
Matrix single_cell_hamiltonian(const SystemParams& p, const HilbertSpec& h);

// Single-cell Hamiltonian plus the mean-field hopping drives
// -J (a' mean_a + a conj(mean_a)) - K (b' mean_b + b conj(mean_b)).
Matrix meanfield_hamiltonian(const SystemParams& p, const HilbertSpec& h,
                             Complex mean_a, Complex mean_b);

// Reference Lindblad right-hand side (dense, no shortcuts):
//   drho/dt = -i[H,rho] + kappa D[a] + gamma (n_th+1) D[b] + gamma n_th D[b']
// with D[c]rho = c rho c' - (c'c rho + rho c'c)/2. The cavity bath is at zero
// temperature; the mechanical bath carries n_th.
Matrix apply_liouvillian(const Matrix& rho, const Matrix& H,
                         const SystemParams& p, const HilbertSpec& h);

Complex expectation(const Matrix& op, const Matrix& rho);

// Reduced density matrices of the two subsystems.
Matrix partial_trace_mechanical(const Matrix& rho, const HilbertSpec& h); // keeps phonons
Matrix partial_trace_optical(const Matrix& rho, const HilbertSpec& h);    // keeps photons

// Normalized truncated coherent state |alpha>. The truncation error is the
// caller's concern; use enough levels that |alpha|^2 sits well inside.
Vector coherent_state(Complex alpha, int levels);

double trace_distance(const Matrix& rho1, const Matrix& rho2);

// Population sitting in the highest retained Fock level of each subsystem.
// If either exceeds ~1e-6 the truncation is suspect and results should be
// re-run with a larger space.
struct TruncationReport {
    double top_photon = 0.0;
    double top_phonon = 0.0;
    double worst() const { return top_photon > top_phonon ? top_photon : top_phonon; }
    bool exceeded(double tol = 1e-6) const { return worst() > tol; }
};
TruncationReport truncation_populations(const Matrix& rho, const HilbertSpec& h);

// Density matrix with enforced invariants. Construction (or an explicit
// check() on a mutated matrix) verifies Hermiticity to 1e-10, unit trace to
// 1e-8 and eigenvalues above -1e-8; violations throw invalid_state.
class DensityMatrix {
public:
    DensityMatrix() = default;
    explicit DensityMatrix(Matrix rho, bool validate_now = true);

    const Matrix& mat() const { return rho_; }
    Matrix& mat() { return rho_; }
    int dim() const { return static_cast<int>(rho_.rows()); }

    void check(double herm_tol = 1e-10, double trace_tol = 1e-8,
               double eig_tol = 1e-8) const;

    static DensityMatrix vacuum(const HilbertSpec& h);
    // Product of coherent states |alpha> (photons) x |beta> (phonons).
    static DensityMatrix coherent_product(Complex alpha, Complex beta, const HilbertSpec& h);

private:
    Matrix rho_;
};

} // namespace omarray
