#pragma once

// Natural continuation in ε from the unperturbed critical point z.

#include <optional>
#include <string>
#include <vector>

#include "cnls/model.hpp"
#include "cnls/newton.hpp"
#include "cnls/scalar_ground.hpp"

namespace cnls {

/// z = ((u⁰_1, v⁰_1), ..., (u⁰_m, v⁰_m), U_{2m+1}, ..., U_N) on the ground-state grid.
State<double> build_unperturbed(const SystemParams<double>& p, const BlockStructure<double>& b,
                                const ScalarGround& g);

struct ContinuationOptions {
  double tol = kNewtonTol;
  int max_iter = kNewtonMaxIter;
  int max_halvings = 12;      // below nominal_step / 2^max_halvings the path is abandoned
  int easy_iterations = 4;    // a step converging within this many iterations counts as easy
};

struct ContinuationPath {
  std::vector<double> eps_values;
  std::vector<SolveReport> reports;
  std::optional<double> eps0_estimate;
  std::vector<double> distance_to_z;  // ‖u_ε - z‖ in the energy norm
  State<double> z;
  bool reached_target = false;
  std::string stop_reason;
};

/// Couplings follow b.tilde_beta scaled by ε; every step warm-starts Newton from the previous
/// state. The step is halved on failure and doubled (up to eps_target/steps) after three easy
/// successes in a row. eps0_estimate records the first unrecoverable failure or, when all rescaled
/// couplings are ≥ 0, the first step that is not classified positive.
ContinuationPath continue_in_eps(const SystemParams<double>& p_template,
                                 const BlockStructure<double>& b, const ScalarGround& g,
                                 double eps_target, int steps, const ContinuationOptions& opts = {});

/// Smallest singular value of the discrete Hessian at u.
double nondegeneracy_at(const SystemParams<double>& p, const Grid& g, const State<double>& u);

/// ‖u - v‖ in the norm Σ_j ‖·‖_j of `p`.
double energy_distance(const SystemParams<double>& p, const Grid& g, const State<double>& u,
                       const State<double>& v);

}  // namespace cnls
