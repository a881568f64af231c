#pragma once

#include <Eigen/Sparse>

#include "cnls/model.hpp"

namespace cnls {

inline constexpr double kNewtonTol = 1e-10;
inline constexpr int kNewtonMaxIter = 50;

/// Hessian of the discrete energy in the weighted (weak) form, over the free nodes.
/// Unknown (i, j) ↦ i·N + j, so the matrix is banded with half-bandwidth 2N - 1.
Eigen::SparseMatrix<double> weak_hessian(const SystemParams<double>& p, const Grid& g,
                                         const State<double>& u);

/// Newton iteration on gradient(p, ·) with a sparse LU solve of the Hessian per step.
/// With `damped`, each step is halved (at most 10 times) until the residual decreases.
/// The returned report carries the failure status instead of throwing.
SolveReport newton_solve(const SystemParams<double>& p, const Grid& g, const State<double>& u_init,
                         double tol = kNewtonTol, int max_iter = kNewtonMaxIter,
                         bool damped = false);

/// Fills energy, norms and positivity of `report.state` for params `p`.
void summarize(const SystemParams<double>& p, const Grid& g, SolveReport& report);

/// Throws NoConvergence / SingularJacobian for a failed report.
void require_converged(const SolveReport& report, const std::string& context);

}  // namespace cnls
