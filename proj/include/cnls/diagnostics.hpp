#pragma once

// Necessary conditions and classification checks on candidate bound states.

#include <string>
#include <vector>

#include "cnls/model.hpp"

namespace cnls {

/// Relative floor below which a negative value counts as discretization noise.
inline constexpr double kPositivityNoise = 1e-8;

struct PositivityReport {
  Positivity overall = Positivity::ZeroComponent;
  std::vector<Positivity> components;
  std::vector<double> min_values;  // over free nodes
  std::vector<double> max_abs;
};

/// Sign classification per component over the free nodes (the Dirichlet node is excluded).
/// A component is zero if its sup norm is below 1e-12·max(1, max_k ‖u_k‖_∞), sign-changing if
/// its minimum is below -1e-8·‖u_j‖_∞, positive if every free value is > 0, else nonnegative.
PositivityReport classify_positivity(const Grid& g, const State<double>& u);

struct ObstructionValue {
  int j = 0;  // zero-based
  int k = 0;
  double value = 0;
};

/// Pairwise integral identities obtained by multiplying equation j by u_k, equation k by u_j,
/// integrating and subtracting:
///   (μ_j-β_jk)∫u_j³u_k + (β_jk-μ_k)∫u_ju_k³ + Σ_{i≠j,k}(β_ji-β_ki)∫u_i²u_ju_k - (λ_j-λ_k)∫u_ju_k.
/// Throws NotCritical when ‖gradient(u)‖ exceeds `residual_tol`.
std::vector<ObstructionValue> obstruction_identities(const SystemParams<double>& p, const Grid& g,
                                                     const State<double>& u,
                                                     double residual_tol = 1e-6);

/// Coefficients of the identity for (j, k): {∫u_j³u_k, ∫u_ju_k³, Σ_i ∫u_i²u_ju_k, ∫u_ju_k}.
struct ObstructionCoefficients {
  double cubic_j = 0;
  double cubic_k = 0;
  std::vector<double> mixed;  // indexed by i, zero for i ∈ {j, k}
  double linear = 0;
};
ObstructionCoefficients obstruction_coefficients(const SystemParams<double>& p, int j, int k);

/// Parameter-only screening for positive solutions. For every single component s (index
/// ≥ 2m) and every j ≠ s with μ_s < β_js the system is flagged as admitting no positive solution;
/// independently, when all coefficients of one identity share a strict sign (and λ_j = λ_k) no
/// positive state can satisfy it.
struct Admissibility {
  bool positive_excluded = false;
  std::vector<std::string> flags;
};
Admissibility positivity_admissibility(const SystemParams<double>& p, int m);

struct RankedCandidate {
  int index = 0;
  double energy = 0;
  double residual = 0;
  bool ground_state_candidate = false;
};

/// Ranks approximately critical candidates by Φ (stable for ties). The lowest one is only a
/// ground-state *candidate* among those supplied.
std::vector<RankedCandidate> energy_comparison(const SystemParams<double>& p, const Grid& g,
                                               const std::vector<State<double>>& candidates,
                                               double residual_tol = 1e-6);

}  // namespace cnls
