#pragma once

#include "cnls/model.hpp"

namespace cnls {

/// Extreme eigenvalues of a symmetric operator.
struct SpectrumSummary {
  double lowest = 0;
  double nearest_zero = 0;  // eigenvalue of smallest magnitude, with its sign
};

/// Eigenvalues of the radial Schrödinger operator -Δ + V on the free nodes, self-adjoint in the
/// weighted inner product. Dense tridiagonal QR; O(M²).
SpectrumSummary schrodinger_spectrum(const Grid& g, const Field<double>& potential);

/// Smallest singular value of the Hessian of Φ at u, in the weighted norm: shift-invert Lanczos
/// with full reorthogonalization.
double smallest_singular_value(const SystemParams<double>& p, const Grid& g,
                               const State<double>& u, int krylov_dim = 60);

}  // namespace cnls
