#include "cnls/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cnls/functional.hpp"

namespace cnls {

PositivityReport classify_positivity(const Grid& g, const State<double>& u) {
  require(u.rows() == g.size(), ErrorKind::GridMismatch, "state is not sampled on this grid");
  const Eigen::Index M = g.interior();
  PositivityReport out;
  const double global_max = u.topRows(M).cwiseAbs().maxCoeff();
  const double zero_floor = 1e-12 * std::max(1.0, global_max);
  bool any_sign = false, any_zero = false, all_positive = true;
  for (Eigen::Index j = 0; j < u.cols(); ++j) {
    const auto col = u.col(j).head(M);
    const double amax = col.cwiseAbs().maxCoeff();
    const double vmin = col.minCoeff();
    out.min_values.push_back(vmin);
    out.max_abs.push_back(amax);
    Positivity c;
    if (amax <= zero_floor)
      c = Positivity::ZeroComponent;
    else if (vmin < -kPositivityNoise * amax)
      c = Positivity::SignChanging;
    else if (vmin > 0)
      c = Positivity::Positive;
    else
      c = Positivity::Nonnegative;
    out.components.push_back(c);
    any_sign = any_sign || c == Positivity::SignChanging;
    any_zero = any_zero || c == Positivity::ZeroComponent;
    all_positive = all_positive && c == Positivity::Positive;
  }
  if (any_sign)
    out.overall = Positivity::SignChanging;
  else if (any_zero)
    out.overall = Positivity::ZeroComponent;
  else if (all_positive)
    out.overall = Positivity::Positive;
  else
    out.overall = Positivity::Nonnegative;
  return out;
}

namespace {

double integral_product(const Grid& g, const Eigen::ArrayXd& f) {
  const Eigen::Index M = g.interior();
  return (f.head(M) * g.weights.head(M).array()).sum();
}

struct Integrals {
  double cubic_j, cubic_k, linear;
  std::vector<double> mixed;
};

Integrals identity_integrals(const SystemParams<double>& p, const Grid& g, const State<double>& u,
                             int j, int k) {
  const Eigen::ArrayXd uj = u.col(j).array(), uk = u.col(k).array();
  Integrals I{integral_product(g, uj.cube() * uk), integral_product(g, uj * uk.cube()),
              integral_product(g, uj * uk), std::vector<double>(p.size(), 0.0)};
  for (int i = 0; i < p.size(); ++i)
    if (i != j && i != k) I.mixed[i] = integral_product(g, u.col(i).array().square() * uj * uk);
  return I;
}

}  // namespace

ObstructionCoefficients obstruction_coefficients(const SystemParams<double>& p, int j, int k) {
  ObstructionCoefficients c;
  c.cubic_j = p.mu(j) - p.beta(j, k);
  c.cubic_k = p.beta(j, k) - p.mu(k);
  c.mixed.assign(p.size(), 0.0);
  for (int i = 0; i < p.size(); ++i)
    if (i != j && i != k) c.mixed[i] = p.beta(j, i) - p.beta(k, i);
  c.linear = -(p.lambda(j) - p.lambda(k));
  return c;
}

std::vector<ObstructionValue> obstruction_identities(const SystemParams<double>& p, const Grid& g,
                                                     const State<double>& u,
                                                     double residual_tol) {
  check_shapes(p, g, u);
  const double r = residual_norm(p, g, u);
  require(r <= residual_tol, ErrorKind::NotCritical,
          "residual " + std::to_string(r) + " too large for the identities to be meaningful");
  std::vector<ObstructionValue> out;
  for (int j = 0; j < p.size(); ++j)
    for (int k = j + 1; k < p.size(); ++k) {
      const auto c = obstruction_coefficients(p, j, k);
      const auto I = identity_integrals(p, g, u, j, k);
      double value = c.cubic_j * I.cubic_j + c.cubic_k * I.cubic_k + c.linear * I.linear;
      for (int i = 0; i < p.size(); ++i) value += c.mixed[i] * I.mixed[i];
      out.push_back({j, k, value});
    }
  return out;
}

Admissibility positivity_admissibility(const SystemParams<double>& p, int m) {
  p.validate();
  require(m >= 0 && 2 * m <= p.size(), ErrorKind::InvalidArgument, "2m must not exceed N");
  Admissibility out;
  const int N = p.size();
  for (int s = 2 * m; s < N; ++s)
    for (int j = 0; j < N; ++j) {
      if (j == s || !(p.mu(s) < p.beta(j, s))) continue;
      std::ostringstream msg;
      msg << "no_positive_solution: mu_" << s + 1 << " < beta_" << std::min(j, s) + 1
          << std::max(j, s) + 1;
      out.flags.push_back(msg.str());
      out.positive_excluded = true;
    }
  for (int j = 0; j < N; ++j)
    for (int k = j + 1; k < N; ++k) {
      const auto c = obstruction_coefficients(p, j, k);
      if (c.linear != 0.0) continue;
      std::vector<double> coeffs{c.cubic_j, c.cubic_k};
      coeffs.insert(coeffs.end(), c.mixed.begin(), c.mixed.end());
      const bool nonneg = std::all_of(coeffs.begin(), coeffs.end(), [](double v) { return v >= 0; });
      const bool nonpos = std::all_of(coeffs.begin(), coeffs.end(), [](double v) { return v <= 0; });
      const bool some_nonzero =
          std::any_of(coeffs.begin(), coeffs.end(), [](double v) { return v != 0; });
      if ((nonneg || nonpos) && some_nonzero) {
        std::ostringstream msg;
        msg << "no_positive_solution: identity (" << j + 1 << "," << k + 1
            << ") has single-signed coefficients";
        out.flags.push_back(msg.str());
        out.positive_excluded = true;
      }
    }
  return out;
}

std::vector<RankedCandidate> energy_comparison(const SystemParams<double>& p, const Grid& g,
                                               const std::vector<State<double>>& candidates,
                                               double residual_tol) {
  std::vector<RankedCandidate> ranked;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const double r = residual_norm(p, g, candidates[c]);
    require(r <= residual_tol, ErrorKind::NotCritical,
            "candidate " + std::to_string(c) + " has residual " + std::to_string(r));
    ranked.push_back({static_cast<int>(c), energy_value(p, g, candidates[c]), r, false});
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.energy < b.energy; });
  if (!ranked.empty()) ranked.front().ground_state_candidate = true;
  return ranked;
}

}  // namespace cnls
