#pragma once

#include <vector>

#include "omarray/operators.hpp"

namespace omarray {

// Wigner function of a single-mode density matrix on a rectangular grid in
// the (x, p) quadrature plane, x = sqrt(2) Re<b>, p = sqrt(2) Im<b>.
// Computed from the Fock representation through the displaced-parity form
//   W(alpha) = (2/pi) tr[rho D(2 alpha) P],  alpha = (x + i p)/sqrt(2),
// whose matrix elements are closed-form (associated Laguerre), so no
// truncated operator products enter. For Hermitian rho the values are real;
// max_imag records the largest imaginary part actually seen.
struct WignerGrid {
    std::vector<double> x; // quadrature axes
    std::vector<double> p;
    Eigen::MatrixXd w;     // w(i,j) = W(x[i], p[j])
    double max_imag = 0.0;

    // Grid integral of W (Riemann sum); 1 within 2% when the grid holds the state.
    double integral() const;
};

// Single evaluation point, alpha in annihilation-operator units (<b>).
Complex wigner_point(const Matrix& rho, Complex alpha);

WignerGrid compute_wigner(const Matrix& rho, const std::vector<double>& x_axis,
                          const std::vector<double>& p_axis);

// Convenience: symmetric n x n grid spanning [-half_width, half_width]^2;
// throws when the grid fails the normalization invariant.
WignerGrid compute_wigner_checked(const Matrix& rho, double half_width, int n,
                                  double norm_tol = 0.02);

} // namespace omarray
