#include "cnls/pair_explicit.hpp"

#include <cmath>

#include "cnls/functional.hpp"

namespace cnls {

CouplingCoeffs coupling_coeffs(double mu1, double mu2, double beta) {
  require(std::isfinite(mu1) && mu1 > 0 && std::isfinite(mu2) && mu2 > 0 && std::isfinite(beta),
          ErrorKind::InvalidArgument, "mu must be positive and beta finite");
  require(beta > std::max(mu1, mu2), ErrorKind::OutOfWindow,
          "beta = " + std::to_string(beta) + " must exceed max(mu1, mu2)");
  const double det = mu1 * mu2 - beta * beta;
  return {std::sqrt(mu1 * (mu2 - beta) / det), std::sqrt(mu2 * (mu1 - beta) / det)};
}

double pair_rho(double mu1, double mu2, double beta) {
  const double det = beta * beta - mu1 * mu2;
  return std::max((beta - mu1) / det, (beta - mu2) / det);
}

SystemParams<double> pair_params(int n, double lambda, double mu1, double mu2, double beta) {
  SystemParams<double> p;
  p.n = n;
  p.lambda = Eigen::Vector2d(lambda, lambda);
  p.mu = Eigen::Vector2d(mu1, mu2);
  p.beta = Eigen::Matrix2d{{0.0, beta}, {beta, 0.0}};
  return p;
}

State<double> PairSolution::state() const {
  State<double> s(u0.size(), 2);
  s.col(0) = u0;
  s.col(1) = v0;
  return s;
}

PairSolution pair_solution(const ScalarGround& g, double lambda, double mu1, double mu2,
                           double beta) {
  const auto [a1, a2] = coupling_coeffs(mu1, mu2, beta);
  PairSolution ps;
  ps.grid = g.grid;
  ps.lambda = lambda;
  ps.mu1 = mu1;
  ps.mu2 = mu2;
  ps.beta = beta;
  ps.a1 = a1;
  ps.a2 = a2;
  // With a common λ the discrete U₂ is exactly √(μ₁/μ₂)·U₁.
  const Field<double> U1 = scale_ground(g, lambda, mu1);
  ps.u0 = a1 * U1;
  ps.v0 = a2 * std::sqrt(mu1 / mu2) * U1;
  ps.rho = pair_rho(mu1, mu2, beta);
  const auto p = ps.params();
  const State<double> s = ps.state();
  ps.residual_norm = residual_norm(p, ps.grid, s);
  ps.energy = energy_value(p, ps.grid, s);
  ps.norm = std::sqrt(norms(p, ps.grid, s).total_sq);
  return ps;
}

double pair_quotient_check(const PairSolution& ps, const Field<double>& t1,
                           const Field<double>& t2) {
  const Grid& g = ps.grid;
  require(t1.size() == g.size() && t2.size() == g.size(), ErrorKind::GridMismatch,
          "trial is not sampled on the pair grid");
  const double numer = norm_sq(g, t1, ps.lambda) + norm_sq(g, t2, ps.lambda);
  const double quartic = ps.mu1 * integral_sq_sq(g, t1, t1) + ps.mu2 * integral_sq_sq(g, t2, t2) +
                         2.0 * ps.beta * integral_sq_sq(g, t1, t2);
  require(quartic > 0, ErrorKind::ZeroDenominator, "quartic form vanishes on the trial pair");
  return numer / std::sqrt(quartic);
}

}  // namespace cnls
