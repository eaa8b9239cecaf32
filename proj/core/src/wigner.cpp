#include "omarray/wigner.hpp"

#include <cmath>
#include <sstream>

#include "omarray/errors.hpp"

namespace omarray {

namespace {

// Laguerre table lag(k, n) = L_n^{(k)}(u) for 0 <= k, n < N.
void laguerre_table(double u, int N, Eigen::MatrixXd& lag) {
    lag.resize(N, N);
    for (int k = 0; k < N; ++k) {
        lag(k, 0) = 1.0;
        if (N > 1) lag(k, 1) = 1.0 + k - u;
        for (int n = 1; n + 1 < N; ++n)
            lag(k, n + 1) = ((2.0 * n + 1.0 + k - u) * lag(k, n) - (n + k) * lag(k, n - 1)) /
                            (n + 1.0);
    }
}

// tr[rho D(beta) P] with closed-form displacement matrix elements,
//   <m|D|n> = sqrt(n!/m!) beta^{m-n} e^{-|beta|^2/2} L_n^{(m-n)}(|beta|^2)  (m >= n)
// and the m < n case by symmetry. No truncated operator products involved.
Complex displaced_parity_trace(const Matrix& rho, Complex beta, Eigen::MatrixXd& lag) {
    const int N = static_cast<int>(rho.rows());
    const double u = std::norm(beta);
    laguerre_table(u, N, lag);

    Complex total = 0.0;
    for (int n = 0; n < N; ++n) {
        const double parity_n = (n % 2 == 0) ? 1.0 : -1.0;
        total += rho(n, n) * parity_n * lag(0, n);
        Complex F = 1.0; // prod_{j=n+1}^{m} beta/sqrt(j)
        for (int m = n + 1; m < N; ++m) {
            F *= beta / std::sqrt(static_cast<double>(m));
            const int d = m - n;
            const double sgn_d = (d % 2 == 0) ? 1.0 : -1.0;
            const double parity_m = (m % 2 == 0) ? 1.0 : -1.0;
            const double L = lag(d, n);
            total += rho(n, m) * parity_n * F * L;               // <m|D|n>
            total += rho(m, n) * parity_m * sgn_d * std::conj(F) * L; // <n|D|m>
        }
    }
    return total * std::exp(-0.5 * u);
}

} // namespace

Complex wigner_point(const Matrix& rho, Complex alpha) {
    if (rho.rows() != rho.cols() || rho.rows() < 1)
        throw invalid_params("wigner_point: rho must be square");
    Eigen::MatrixXd lag;
    return displaced_parity_trace(rho, 2.0 * alpha, lag) / M_PI;
}

WignerGrid compute_wigner(const Matrix& rho, const std::vector<double>& x_axis,
                          const std::vector<double>& p_axis) {
    if (rho.rows() != rho.cols() || rho.rows() < 1)
        throw invalid_params("compute_wigner: rho must be square");
    if (x_axis.size() < 2 || p_axis.size() < 2)
        throw invalid_params("compute_wigner: axes need at least 2 points");

    WignerGrid grid;
    grid.x = x_axis;
    grid.p = p_axis;
    grid.w.resize(x_axis.size(), p_axis.size());
    Eigen::MatrixXd lag;
    for (size_t i = 0; i < x_axis.size(); ++i)
        for (size_t j = 0; j < p_axis.size(); ++j) {
            // alpha = (x + i p)/sqrt(2), so D(2 alpha) = D(sqrt(2)(x + i p)).
            const Complex beta = M_SQRT2 * Complex(x_axis[i], p_axis[j]);
            const Complex w = displaced_parity_trace(rho, beta, lag) / M_PI;
            grid.w(i, j) = w.real();
            grid.max_imag = std::max(grid.max_imag, std::abs(w.imag()));
        }
    return grid;
}

double WignerGrid::integral() const {
    if (x.size() < 2 || p.size() < 2) return 0.0;
    const double dx = x[1] - x[0];
    const double dp = p[1] - p[0];
    return w.sum() * dx * dp;
}

WignerGrid compute_wigner_checked(const Matrix& rho, double half_width, int n, double norm_tol) {
    if (n < 8) throw invalid_params("compute_wigner_checked: need at least 8 grid points");
    std::vector<double> ax(n);
    for (int i = 0; i < n; ++i)
        ax[i] = -half_width + 2.0 * half_width * i / static_cast<double>(n - 1);
    WignerGrid grid = compute_wigner(rho, ax, ax);
    const double norm = grid.integral();
    if (std::abs(norm - 1.0) > norm_tol) {
        std::ostringstream os;
        os << "compute_wigner_checked: grid integral " << norm
           << " outside tolerance; grid too small for the state";
        throw error(os.str());
    }
    return grid;
}

} // namespace omarray
