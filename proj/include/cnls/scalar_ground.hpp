#pragma once

// The positive radial solution U of -Δu + u = u³ and its rescalings U_j.

#include "cnls/model.hpp"
#include "cnls/spectrum.hpp"

namespace cnls {

struct ScalarGround {
  Grid grid;
  Field<double> U;
  int dim = 1;
  double peak = 0;           // U(0)
  double l4_integral = 0;    // ∫U⁴ dx over R^n
  double residual_norm = 0;  // discrete ‖-ΔU + U - U³‖
  double nehari_defect = 0;  // |‖U‖² - ∫U⁴| / ‖U‖²
  bool closed_form = false;  // n = 1: U = √2 sech r sampled on the grid
  double basin_amplitude = 0;  // A of the A·sech(r) guess Newton converged from
  int newton_iters = 0;
};

/// Initial amplitudes tried, in order, for n = 2, 3.
inline constexpr double kGroundAmplitudes[] = {1.5, 2.0, 3.0, 4.5};

/// n = 1 samples the closed form; n = 2, 3 run Newton from A·sech(r).
ScalarGround solve_scalar_ground(const Grid& grid);

/// √(λ/μ) U(√λ r) resampled by monotone cubic interpolation and then Newton-polished onto the
/// discrete solution of -Δu + λu = μu³ on the same grid.
Field<double> scale_ground(const ScalarGround& g, double lambda, double mu,
                           double max_scaled_spacing = 0.2);

/// σ_λ = (λ^{2-n/2} ∫U⁴)^{1/4}, the best constant of ‖φ‖_λ² ≥ σ_λ² ‖φ‖_{L⁴}².
double sigma_lambda(const ScalarGround& g, double lambda);

/// The extremal σ_λ⁻¹ √λ U(√λ r), normalized to ‖·‖_{L⁴} = 1.
Field<double> sigma_minimizer(const ScalarGround& g, double lambda);

/// Spectrum of -Δ + λ - 3μU_j² on radial functions.
SpectrumSummary linearized_spectrum(const ScalarGround& g, double lambda, double mu);

/// Signed eigenvalue of smallest magnitude of the linearization at U_j.
double nondegeneracy_estimate(const ScalarGround& g, double lambda, double mu);

/// Shape-preserving piecewise cubic (Fritsch–Carlson) through (x_i, y_i); zero slope at x_0
/// (even extension) and zero beyond the last node.
class MonotoneCubic {
 public:
  MonotoneCubic(Field<double> x, Field<double> y);
  double operator()(double t) const;

 private:
  Field<double> x_, y_, d_;
};

}  // namespace cnls
