#include "cnls/newton.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/SparseLU>

#include "cnls/diagnostics.hpp"
#include "cnls/functional.hpp"

namespace cnls {

Eigen::SparseMatrix<double> weak_hessian(const SystemParams<double>& p, const Grid& g,
                                         const State<double>& u) {
  check_shapes(p, g, u);
  const int N = p.size();
  const Eigen::Index M = g.interior();
  const Eigen::Index dim = M * N;
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(M) * N * (N + 3));
  auto idx = [N](Eigen::Index i, int j) { return i * N + j; };

  for (Eigen::Index i = 0; i < M; ++i) {
    const double w = g.weights(i);
    for (int j = 0; j < N; ++j) {
      double diag = g.edge(i) + (i > 0 ? g.edge(i - 1) : 0.0);
      const double uj = u(i, j);
      diag += w * (p.lambda(j) - 3.0 * p.mu(j) * uj * uj);
      for (int k = 0; k < N; ++k) {
        if (k == j || p.beta(j, k) == 0.0) continue;
        const double uk = u(i, k);
        diag -= w * p.beta(j, k) * uk * uk;
        triplets.emplace_back(idx(i, j), idx(i, k), -2.0 * w * p.beta(j, k) * uj * uk);
      }
      triplets.emplace_back(idx(i, j), idx(i, j), diag);
      if (i + 1 < M) {
        triplets.emplace_back(idx(i, j), idx(i + 1, j), -g.edge(i));
        triplets.emplace_back(idx(i + 1, j), idx(i, j), -g.edge(i));
      }
    }
  }
  Eigen::SparseMatrix<double> H(dim, dim);
  H.setFromTriplets(triplets.begin(), triplets.end());
  return H;
}

namespace {

// Size of the rounding error in gradient(u): the residual cannot be resolved below this.
double roundoff_floor(const SystemParams<double>& p, const Grid& g, const State<double>& u) {
  const int N = p.size();
  const Eigen::Index M = g.interior();
  State<double> a = State<double>::Zero(g.size(), N);
  for (Eigen::Index i = 0; i < M; ++i) {
    const double left = i > 0 ? g.edge(i - 1) : 0.0;
    for (int j = 0; j < N; ++j) {
      double s = (g.edge(i) + left) * std::abs(u(i, j));
      if (i + 1 < M) s += g.edge(i) * std::abs(u(i + 1, j));
      if (i > 0) s += left * std::abs(u(i - 1, j));
      const double uj = std::abs(u(i, j));
      double pointwise = p.lambda(j) * uj + p.mu(j) * uj * uj * uj;
      for (int k = 0; k < N; ++k)
        if (k != j) pointwise += std::abs(p.beta(j, k)) * u(i, k) * u(i, k) * uj;
      a(i, j) = s / g.weights(i) + pointwise;
    }
  }
  return 8.0 * std::numeric_limits<double>::epsilon() * l2_norm(g, a);
}

}  // namespace

void summarize(const SystemParams<double>& p, const Grid& g, SolveReport& report) {
  const auto n = norms(p, g, report.state);
  report.component_norms = n.per_component;
  report.energy = energy_value(p, g, report.state);
  const auto pos = classify_positivity(g, report.state);
  report.positivity = pos.overall;
  report.component_positivity = pos.components;
  if (pos.overall == Positivity::ZeroComponent) report.flags.emplace_back("zero_component");
}

SolveReport newton_solve(const SystemParams<double>& p, const Grid& g, const State<double>& u_init,
                         double tol, int max_iter, bool damped) {
  p.validate();
  check_shapes(p, g, u_init);
  require(tol > 0 && max_iter >= 0, ErrorKind::InvalidArgument, "tol must be positive");
  const int N = p.size();
  const Eigen::Index M = g.interior();

  SolveReport report;
  report.state = u_init;
  report.state.row(M).setZero();

  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  bool pattern_ready = false;
  for (int it = 0;; ++it) {
    const State<double> G = gradient(p, g, report.state);
    const double r = l2_norm(g, G);
    report.residual_history.push_back(r);
    report.residual_norm = r;
    report.newton_iters = it;
    if (!std::isfinite(r)) {
      report.status = SolveStatus::NoConvergence;
      report.flags.emplace_back("diverged");
      break;
    }
    if (r <= tol) {
      report.status = SolveStatus::Converged;
      break;
    }
    if (it > 0 && r <= roundoff_floor(p, g, report.state)) {
      report.status = SolveStatus::Converged;
      report.flags.emplace_back("roundoff_floor");
      break;
    }
    if (it >= max_iter) {
      report.status = SolveStatus::NoConvergence;
      break;
    }

    const Eigen::SparseMatrix<double> H = weak_hessian(p, g, report.state);
    Eigen::VectorXd rhs(M * N);
    for (Eigen::Index i = 0; i < M; ++i)
      for (int j = 0; j < N; ++j) rhs(i * N + j) = -g.weights(i) * G(i, j);
    if (!pattern_ready) {
      lu.analyzePattern(H);
      pattern_ready = true;
    }
    lu.factorize(H);
    if (lu.info() != Eigen::Success) {
      report.status = SolveStatus::SingularJacobian;
      break;
    }
    const Eigen::VectorXd delta = lu.solve(rhs);
    if (lu.info() != Eigen::Success || !delta.allFinite()) {
      report.status = SolveStatus::SingularJacobian;
      break;
    }
    State<double> step = State<double>::Zero(g.size(), N);
    for (Eigen::Index i = 0; i < M; ++i)
      for (int j = 0; j < N; ++j) step(i, j) = delta(i * N + j);
    if (damped) {
      double t = 1.0;
      for (int k = 0; k < 10; ++k, t *= 0.5) {
        const double trial = residual_norm(p, g, State<double>(report.state + t * step));
        if (std::isfinite(trial) && trial < (1.0 - 1e-4 * t) * r) break;
      }
      step *= t;
    }
    report.state += step;
  }
  summarize(p, g, report);
  if (report.status != SolveStatus::Converged) report.flags.push_back(to_string(report.status));
  return report;
}

void require_converged(const SolveReport& report, const std::string& context) {
  switch (report.status) {
    case SolveStatus::Converged: return;
    case SolveStatus::NoConvergence:
      throw Error(ErrorKind::NoConvergence, context + ": residual " +
                                                std::to_string(report.residual_norm) + " after " +
                                                std::to_string(report.newton_iters) + " iterations");
    case SolveStatus::SingularJacobian:
      throw Error(ErrorKind::SingularJacobian, context + ": Hessian factorization broke down");
  }
}

}  // namespace cnls
