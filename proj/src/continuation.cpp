#include "cnls/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "cnls/diagnostics.hpp"
#include "cnls/functional.hpp"
#include "cnls/pair_explicit.hpp"
#include "cnls/spectrum.hpp"

namespace cnls {

State<double> build_unperturbed(const SystemParams<double>& p, const BlockStructure<double>& b,
                                const ScalarGround& g) {
  p.validate();
  require(p.n == g.dim, ErrorKind::GridMismatch, "params and ground-state dimensions differ");
  require(b.N == p.size(), ErrorKind::InvalidArgument, "block structure size differs from N");
  State<double> z(g.grid.size(), p.size());
  for (int k = 0; k < b.m; ++k) {
    require(p.lambda(2 * k) == p.lambda(2 * k + 1), ErrorKind::PairLambdaMismatch,
            "pair " + std::to_string(k + 1) + " has lambda_{2k-1} != lambda_{2k}");
    const PairSolution ps =
        pair_solution(g, p.lambda(2 * k), p.mu(2 * k), p.mu(2 * k + 1), b.pair_beta(k));
    z.col(2 * k) = ps.u0;
    z.col(2 * k + 1) = ps.v0;
  }
  for (int s = 2 * b.m; s < p.size(); ++s) z.col(s) = scale_ground(g, p.lambda(s), p.mu(s));
  return z;
}

double energy_distance(const SystemParams<double>& p, const Grid& g, const State<double>& u,
                       const State<double>& v) {
  return std::sqrt(norms(p, g, State<double>(u - v)).total_sq);
}

double nondegeneracy_at(const SystemParams<double>& p, const Grid& g, const State<double>& u) {
  return smallest_singular_value(p, g, u);
}

namespace {

void annotate(const SystemParams<double>& p, int m, SolveReport& rep) {
  const Admissibility adm = positivity_admissibility(p, m);
  rep.flags.insert(rep.flags.end(), adm.flags.begin(), adm.flags.end());
  if (adm.positive_excluded && rep.positivity == Positivity::Positive)
    rep.flags.emplace_back("positive_despite_obstruction");
}

bool all_cross_nonnegative(const BlockStructure<double>& b) {
  return (b.tilde_beta.array() >= 0).all() && (b.tilde_beta_singles.array() >= 0).all();
}

}  // namespace

ContinuationPath continue_in_eps(const SystemParams<double>& p_template,
                                 const BlockStructure<double>& b, const ScalarGround& g,
                                 double eps_target, int steps, const ContinuationOptions& opts) {
  require(std::isfinite(eps_target) && eps_target >= 0, ErrorKind::InvalidArgument,
          "eps_target must be finite and nonnegative");
  require(steps >= 1, ErrorKind::InvalidArgument, "steps must be positive");
  require(opts.max_halvings >= 0 && opts.max_halvings <= 30, ErrorKind::InvalidArgument,
          "max_halvings must lie in [0, 30]");
  const Grid& grid = g.grid;

  ContinuationPath path;
  path.z = build_unperturbed(p_template, b, g);
  const SystemParams<double> p0 = with_blocks(p_template, at_eps(b, 0.0));

  SolveReport first = newton_solve(p0, grid, path.z, opts.tol, opts.max_iter);
  if (!first.converged())
    throw Error(ErrorKind::ImmediateFailure,
                "Newton failed at eps = 0 (residual " + std::to_string(first.residual_norm) + ")");
  first.eps = 0.0;
  annotate(p0, b.m, first);
  path.eps_values.push_back(0.0);
  path.distance_to_z.push_back(energy_distance(p0, grid, first.state, path.z));
  State<double> current = first.state;
  path.reports.push_back(std::move(first));

  const bool check_positivity = all_cross_nonnegative(b);
  // Progress is counted in ticks of eps_target / (steps · 2^max_halvings) so that every ε on the
  // path is an exact fraction of eps_target.
  const std::int64_t nominal = std::int64_t{1} << opts.max_halvings;
  const std::int64_t total = nominal * steps;
  std::int64_t step = nominal;
  std::int64_t done = 0;
  int easy_streak = 0;
  if (eps_target == 0) done = total;
  while (done < total) {
    const std::int64_t ticks = std::min(done + step, total);
    const double next = eps_target * (static_cast<double>(ticks) / static_cast<double>(total));
    const SystemParams<double> p = with_blocks(p_template, at_eps(b, next));
    SolveReport rep = newton_solve(p, grid, current, opts.tol, opts.max_iter);
    rep.eps = next;
    const bool nontrivial = rep.positivity != Positivity::ZeroComponent;
    if (!rep.converged() || !nontrivial) {
      easy_streak = 0;
      if (step == 1) {
        if (!path.eps0_estimate) path.eps0_estimate = next;
        path.stop_reason = rep.converged() ? "collapsed to a semitrivial state"
                                           : "Newton failed: " + to_string(rep.status);
        return path;
      }
      step /= 2;
      continue;
    }
    annotate(p, b.m, rep);
    if (check_positivity && rep.positivity != Positivity::Positive && !path.eps0_estimate)
      path.eps0_estimate = next;

    done = ticks;
    current = rep.state;
    path.eps_values.push_back(next);
    path.distance_to_z.push_back(energy_distance(p, grid, current, path.z));
    if (rep.newton_iters <= opts.easy_iterations) {
      if (++easy_streak >= 3 && step < nominal) {
        step *= 2;
        easy_streak = 0;
      }
    } else {
      easy_streak = 0;
    }
    path.reports.push_back(std::move(rep));
  }
  path.reached_target = true;
  path.stop_reason = "reached eps_target";
  return path;
}

}  // namespace cnls
