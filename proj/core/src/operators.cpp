#include "omarray/operators.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "omarray/errors.hpp"

namespace omarray {

Matrix build_annihilation(int levels) {
    if (levels < 2) throw invalid_params("build_annihilation: need at least 2 levels");
    Matrix a = Matrix::Zero(levels, levels);
    for (int n = 1; n < levels; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

Matrix kron(const Matrix& A, const Matrix& B) {
    const Eigen::Index ar = A.rows(), ac = A.cols(), br = B.rows(), bc = B.cols();
    Matrix out(ar * br, ac * bc);
    for (Eigen::Index i = 0; i < ar; ++i)
        for (Eigen::Index j = 0; j < ac; ++j)
            out.block(i * br, j * bc, br, bc) = A(i, j) * B;
    return out;
}

Matrix photon_embed(const Matrix& op, const HilbertSpec& h) {
    h.validate();
    if (op.rows() != h.photon_levels || op.cols() != h.photon_levels)
        throw invalid_params("photon_embed: operator size does not match photon_levels");
    return kron(op, Matrix::Identity(h.phonon_levels, h.phonon_levels));
}

Matrix phonon_embed(const Matrix& op, const HilbertSpec& h) {
    h.validate();
    if (op.rows() != h.phonon_levels || op.cols() != h.phonon_levels)
        throw invalid_params("phonon_embed: operator size does not match phonon_levels");
    return kron(Matrix::Identity(h.photon_levels, h.photon_levels), op);
}

Matrix single_cell_hamiltonian(const SystemParams& p, const HilbertSpec& h) {
    p.validate();
    h.validate();
    const Matrix a = build_annihilation(h.photon_levels);
    const Matrix b = build_annihilation(h.phonon_levels);
    const Matrix na = photon_embed((a.adjoint() * a).eval(), h);
    const Matrix nb = phonon_embed((b.adjoint() * b).eval(), h);
    const Matrix x_b = phonon_embed((b + b.adjoint()).eval(), h);
    const Matrix x_a = photon_embed((a + a.adjoint()).eval(), h);
    Matrix H = -p.delta * na + p.omega * nb - p.g0 * x_b * na + p.alpha_L * x_a;
    // x_b and na commute so H is Hermitian; symmetrize anyway to kill rounding.
    H = 0.5 * (H + H.adjoint()).eval();
    return H;
}

Matrix meanfield_hamiltonian(const SystemParams& p, const HilbertSpec& h,
                             Complex mean_a, Complex mean_b) {
    Matrix H = single_cell_hamiltonian(p, h);
    const Matrix a = photon_embed(build_annihilation(h.photon_levels), h);
    const Matrix b = phonon_embed(build_annihilation(h.phonon_levels), h);
    H -= p.J * (mean_a * a.adjoint() + std::conj(mean_a) * a);
    H -= p.K * (mean_b * b.adjoint() + std::conj(mean_b) * b);
    return H;
}

namespace {

// c rho c' - (c'c rho + rho c'c)/2, with c'c passed in to avoid recomputing.
Matrix dissipator(const Matrix& c, const Matrix& cdc, const Matrix& rho) {
    return c * rho * c.adjoint() - 0.5 * (cdc * rho + rho * cdc);
}

} // namespace

Matrix apply_liouvillian(const Matrix& rho, const Matrix& H,
                         const SystemParams& p, const HilbertSpec& h) {
    if (rho.rows() != h.dim() || rho.cols() != h.dim() || H.rows() != h.dim())
        throw invalid_params("apply_liouvillian: dimension mismatch");
    const Matrix a = photon_embed(build_annihilation(h.photon_levels), h);
    const Matrix b = phonon_embed(build_annihilation(h.phonon_levels), h);
    Matrix out = -I * (H * rho - rho * H);
    if (p.kappa > 0.0) out += p.kappa * dissipator(a, (a.adjoint() * a).eval(), rho);
    if (p.gamma > 0.0) {
        out += p.gamma * (p.n_th + 1.0) * dissipator(b, (b.adjoint() * b).eval(), rho);
        if (p.n_th > 0.0)
            out += p.gamma * p.n_th * dissipator(b.adjoint().eval(), (b * b.adjoint()).eval(), rho);
    }
    return out;
}

Complex expectation(const Matrix& op, const Matrix& rho) {
    if (op.rows() != rho.rows() || op.cols() != rho.cols())
        throw invalid_params("expectation: dimension mismatch");
    return (op * rho).trace();
}

Matrix partial_trace_mechanical(const Matrix& rho, const HilbertSpec& h) {
    if (rho.rows() != h.dim()) throw invalid_params("partial_trace_mechanical: dimension mismatch");
    const int Nm = h.phonon_levels;
    Matrix out = Matrix::Zero(Nm, Nm);
    for (int n = 0; n < h.photon_levels; ++n)
        out += rho.block(n * Nm, n * Nm, Nm, Nm);
    return out;
}

Matrix partial_trace_optical(const Matrix& rho, const HilbertSpec& h) {
    if (rho.rows() != h.dim()) throw invalid_params("partial_trace_optical: dimension mismatch");
    const int Nm = h.phonon_levels;
    Matrix out = Matrix::Zero(h.photon_levels, h.photon_levels);
    for (int n = 0; n < h.photon_levels; ++n)
        for (int m = 0; m < h.photon_levels; ++m) {
            Complex s = 0.0;
            for (int k = 0; k < Nm; ++k) s += rho(n * Nm + k, m * Nm + k);
            out(n, m) = s;
        }
    return out;
}

Vector coherent_state(Complex alpha, int levels) {
    if (levels < 2) throw invalid_params("coherent_state: need at least 2 levels");
    Vector v(levels);
    // c_n = alpha^n / sqrt(n!), built by recurrence, then normalized so the
    // truncated vector is a unit vector.
    v(0) = 1.0;
    for (int n = 1; n < levels; ++n) v(n) = v(n - 1) * alpha / std::sqrt(static_cast<double>(n));
    v /= v.norm();
    return v;
}

double trace_distance(const Matrix& rho1, const Matrix& rho2) {
    if (rho1.rows() != rho2.rows() || rho1.cols() != rho2.cols())
        throw invalid_params("trace_distance: dimension mismatch");
    Matrix diff = rho1 - rho2;
    diff = 0.5 * (diff + diff.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> es(diff, Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

TruncationReport truncation_populations(const Matrix& rho, const HilbertSpec& h) {
    if (rho.rows() != h.dim()) throw invalid_params("truncation_populations: dimension mismatch");
    const int Nm = h.phonon_levels;
    TruncationReport rep;
    for (int m = 0; m < Nm; ++m)
        rep.top_photon += rho((h.photon_levels - 1) * Nm + m, (h.photon_levels - 1) * Nm + m).real();
    for (int n = 0; n < h.photon_levels; ++n)
        rep.top_phonon += rho(n * Nm + (Nm - 1), n * Nm + (Nm - 1)).real();
    return rep;
}

DensityMatrix::DensityMatrix(Matrix rho, bool validate_now) : rho_(std::move(rho)) {
    if (validate_now) check();
}

void DensityMatrix::check(double herm_tol, double trace_tol, double eig_tol) const {
    if (rho_.rows() == 0 || rho_.rows() != rho_.cols())
        throw invalid_state("DensityMatrix: empty or non-square");
    const double herm = (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
    if (herm > herm_tol) {
        std::ostringstream os;
        os << "DensityMatrix: not Hermitian, max |rho - rho'| = " << herm;
        throw invalid_state(os.str());
    }
    const double tr_err = std::abs(rho_.trace() - Complex{1.0, 0.0});
    if (tr_err > trace_tol) {
        std::ostringstream os;
        os << "DensityMatrix: trace off by " << tr_err;
        throw invalid_state(os.str());
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho_ + rho_.adjoint()), Eigen::EigenvaluesOnly);
    const double min_eig = es.eigenvalues().minCoeff();
    if (min_eig < -eig_tol) {
        std::ostringstream os;
        os << "DensityMatrix: negative eigenvalue " << min_eig;
        throw invalid_state(os.str());
    }
}

DensityMatrix DensityMatrix::vacuum(const HilbertSpec& h) {
    h.validate();
    Matrix rho = Matrix::Zero(h.dim(), h.dim());
    rho(0, 0) = 1.0;
    return DensityMatrix(std::move(rho), false);
}

DensityMatrix DensityMatrix::coherent_product(Complex alpha, Complex beta, const HilbertSpec& h) {
    h.validate();
    const Vector va = coherent_state(alpha, h.photon_levels);
    const Vector vb = coherent_state(beta, h.phonon_levels);
    Vector joint(h.dim());
    for (int n = 0; n < h.photon_levels; ++n)
        joint.segment(n * h.phonon_levels, h.phonon_levels) = va(n) * vb;
    Matrix rho = joint * joint.adjoint();
    return DensityMatrix(std::move(rho), false);
}

} // namespace omarray
