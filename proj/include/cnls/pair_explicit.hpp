#pragma once

// The synchronized solution (a₁U₁, a₂U₂) of the two-component system with common λ.

#include <utility>

#include "cnls/model.hpp"
#include "cnls/scalar_ground.hpp"

namespace cnls {

struct CouplingCoeffs {
  double a1 = 0;
  double a2 = 0;
};

/// a_k = √(μ_k(μ_j - β) / (μ_kμ_j - β²)), k ≠ j. Requires β > max(μ₁, μ₂).
CouplingCoeffs coupling_coeffs(double mu1, double mu2, double beta);

/// ρ = max{(β-μ₁), (β-μ₂)} / (β² - μ₁μ₂). No window check; callers decide admissibility.
double pair_rho(double mu1, double mu2, double beta);

/// Two-component parameters (λ, λ), (μ₁, μ₂), β.
SystemParams<double> pair_params(int n, double lambda, double mu1, double mu2, double beta);

struct PairSolution {
  Grid grid;
  double lambda = 0;
  double mu1 = 0, mu2 = 0;
  double beta = 0;
  double a1 = 0, a2 = 0;
  Field<double> u0, v0;
  double rho = 0;
  double residual_norm = 0;  // discrete residual of the pair system
  double energy = 0;         // Φ(u⁰, v⁰)
  double norm = 0;           // ‖(u⁰, v⁰)‖

  State<double> state() const;
  SystemParams<double> params() const { return pair_params(grid.n, lambda, mu1, mu2, beta); }
};

/// u⁰ = a₁U₁, v⁰ = a₂U₂ with U_k = scale_ground(λ, μ_k).
PairSolution pair_solution(const ScalarGround& g, double lambda, double mu1, double mu2,
                           double beta);

/// Q(t) = ‖(t₁,t₂)‖² / (μ₁∫t₁⁴ + μ₂∫t₂⁴ + 2β∫t₁²t₂²)^{1/2}, minimized by (u⁰, v⁰).
double pair_quotient_check(const PairSolution& ps, const Field<double>& t1,
                           const Field<double>& t2);

}  // namespace cnls
