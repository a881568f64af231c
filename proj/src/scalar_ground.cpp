#include "cnls/scalar_ground.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "cnls/diagnostics.hpp"
#include "cnls/functional.hpp"
#include "cnls/newton.hpp"

namespace cnls {

MonotoneCubic::MonotoneCubic(Field<double> x, Field<double> y)
    : x_(std::move(x)), y_(std::move(y)), d_(Field<double>::Zero(x_.size())) {
  const Eigen::Index n = x_.size();
  require(n >= 2 && y_.size() == n, ErrorKind::InvalidArgument, "need matching samples");
  Field<double> h(n - 1), delta(n - 1);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    h(i) = x_(i + 1) - x_(i);
    delta(i) = (y_(i + 1) - y_(i)) / h(i);
  }
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    if (delta(i - 1) * delta(i) <= 0) continue;
    const double w1 = 2 * h(i) + h(i - 1), w2 = h(i) + 2 * h(i - 1);
    d_(i) = (w1 + w2) / (w1 / delta(i - 1) + w2 / delta(i));
  }
  d_(0) = 0.0;
  double end = ((2 * h(n - 2) + (n > 2 ? h(n - 3) : 0.0)) * delta(n - 2) -
                h(n - 2) * (n > 2 ? delta(n - 3) : 0.0)) /
               (h(n - 2) + (n > 2 ? h(n - 3) : 0.0));
  if (end * delta(n - 2) <= 0) end = 0;
  else if (n > 2 && delta(n - 2) * delta(n - 3) <= 0 && std::abs(end) > 3 * std::abs(delta(n - 2)))
    end = 3 * delta(n - 2);
  d_(n - 1) = end;
}

double MonotoneCubic::operator()(double t) const {
  const Eigen::Index n = x_.size();
  if (t <= x_(0)) return y_(0);
  if (t > x_(n - 1)) return 0.0;
  const auto* it = std::upper_bound(x_.data(), x_.data() + n, t);
  Eigen::Index i = std::clamp<Eigen::Index>((it - x_.data()) - 1, 0, n - 2);
  const double h = x_(i + 1) - x_(i);
  const double s = (t - x_(i)) / h;
  const double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * y_(i) + (s3 - 2 * s2 + s) * h * d_(i) +
         (-2 * s3 + 3 * s2) * y_(i + 1) + (s3 - s2) * h * d_(i + 1);
}

namespace {

bool strictly_positive(const Grid& grid, const Field<double>& u) {
  return (u.head(grid.interior()).array() > 0).all();
}

void finish(ScalarGround& out) {
  const Grid& g = out.grid;
  out.peak = out.U(0);
  out.l4_integral = integral_sq_sq(g, out.U, out.U);
  const auto p = scalar_params(g.n, 1.0, 1.0);
  out.residual_norm = residual_norm(p, g, State<double>(out.U));
  double norm2;
  if (out.closed_form) {
    // U' = -√2 sech r tanh r in closed form.
    const Eigen::Index M = g.interior();
    const Eigen::ArrayXd r = g.nodes.head(M).array();
    const Eigen::ArrayXd dU = -std::sqrt(2.0) * r.tanh() / r.cosh();
    norm2 = ((dU.square() + out.U.head(M).array().square()) * g.weights.head(M).array()).sum();
  } else {
    norm2 = norm_sq(g, out.U, 1.0);
  }
  out.nehari_defect = std::abs(norm2 - out.l4_integral) / norm2;
}

}  // namespace

ScalarGround solve_scalar_ground(const Grid& grid) {
  ScalarGround out;
  out.grid = grid;
  out.dim = grid.n;
  const Eigen::Index M = grid.interior();
  if (grid.n == 1) {
    out.closed_form = true;
    out.U = (std::sqrt(2.0) / grid.nodes.array().cosh()).matrix();
    out.U(M) = 0.0;
    finish(out);
    return out;
  }

  const auto p = scalar_params(grid.n, 1.0, 1.0);
  bool wrong_branch = false;
  for (double A : kGroundAmplitudes) {
    State<double> guess = (A / grid.nodes.array().cosh()).matrix();
    guess(M, 0) = 0.0;
    const SolveReport rep = newton_solve(p, grid, guess, kNewtonTol, kNewtonMaxIter, true);
    if (!rep.converged()) continue;
    const Field<double> U = rep.state.col(0);
    if (U(0) <= 1e-3 || !strictly_positive(grid, U)) {
      wrong_branch = true;
      continue;
    }
    out.U = U;
    out.basin_amplitude = A;
    out.newton_iters = rep.newton_iters;
    finish(out);
    return out;
  }
  if (wrong_branch)
    throw Error(ErrorKind::SignChange, "Newton converged only to non-positive profiles");
  throw Error(ErrorKind::NoConvergence, "Newton failed from every initial amplitude");
}

Field<double> scale_ground(const ScalarGround& g, double lambda, double mu,
                           double max_scaled_spacing) {
  require(std::isfinite(lambda) && lambda > 0 && std::isfinite(mu) && mu > 0,
          ErrorKind::InvalidArgument, "lambda and mu must be positive");
  const Grid& grid = g.grid;
  const double root = std::sqrt(lambda);
  require(root * grid.max_spacing() <= max_scaled_spacing, ErrorKind::GridTooCoarse,
          "sqrt(lambda) * max spacing = " + std::to_string(root * grid.max_spacing()));

  const MonotoneCubic profile(grid.nodes, g.U);
  const double amp = std::sqrt(lambda / mu);
  State<double> guess(grid.size(), 1);
  for (Eigen::Index i = 0; i < grid.size(); ++i) guess(i, 0) = amp * profile(root * grid.nodes(i));
  guess(grid.interior(), 0) = 0.0;

  const SolveReport rep = newton_solve(scalar_params(grid.n, lambda, mu), grid, guess);
  require_converged(rep, "scale_ground");
  require(strictly_positive(grid, rep.state.col(0)), ErrorKind::SignChange,
          "rescaled profile lost positivity");
  return rep.state.col(0);
}

double sigma_lambda(const ScalarGround& g, double lambda) {
  require(std::isfinite(lambda) && lambda > 0, ErrorKind::InvalidArgument,
          "lambda must be positive");
  return std::pow(std::pow(lambda, 2.0 - g.dim / 2.0) * g.l4_integral, 0.25);
}

Field<double> sigma_minimizer(const ScalarGround& g, double lambda) {
  return scale_ground(g, lambda, 1.0) / sigma_lambda(g, lambda);
}

SpectrumSummary linearized_spectrum(const ScalarGround& g, double lambda, double mu) {
  const Field<double> Uj = scale_ground(g, lambda, mu);
  const Field<double> V = (lambda - 3.0 * mu * Uj.array().square()).matrix();
  return schrodinger_spectrum(g.grid, V);
}

double nondegeneracy_estimate(const ScalarGround& g, double lambda, double mu) {
  return linearized_spectrum(g, lambda, mu).nearest_zero;
}

}  // namespace cnls
