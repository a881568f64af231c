#pragma once

// Discrete energy Φ_ε, its gradient and Hessian action on radial states.
//
// Everything is assembled from one quadratic form, D(u, v) = Σ edge_i Δu_i Δv_i, and the shell
// weights of the grid, so `gradient` is the exact derivative of `energy_value` (with respect to
// the weighted inner product) and `hessian_apply` the exact derivative of `gradient`.
// The Dirichlet node r_M is not a degree of freedom: its stored value is ignored and every
// operator returns 0 there.

#include <vector>

#include "cnls/model.hpp"

namespace cnls {

template <typename Scalar>
void check_shapes(const SystemParams<Scalar>& p, const RadialGrid<Scalar>& g,
                  const State<Scalar>& u) {
  require(p.n == g.n, ErrorKind::GridMismatch, "params and grid dimensions differ");
  require(u.rows() == g.size(), ErrorKind::GridMismatch, "state is not sampled on this grid");
  require(u.cols() == p.size(), ErrorKind::GridMismatch, "state has the wrong component count");
}

/// K u for one field (u_M taken as 0); the last entry is 0.
template <typename Scalar, typename Derived>
Field<Scalar> stiffness_apply(const RadialGrid<Scalar>& g, const Eigen::MatrixBase<Derived>& u) {
  const Eigen::Index M = g.interior();
  Field<Scalar> out = Field<Scalar>::Zero(g.size());
  for (Eigen::Index i = 0; i < M; ++i) {
    const Scalar next = (i + 1 < M) ? Scalar(u(i + 1)) : Scalar(0);
    const Scalar flux = g.edge(i) * (Scalar(u(i)) - next);
    out(i) += flux;
    if (i + 1 < M) out(i + 1) -= flux;
  }
  return out;
}

/// D(u, v) ≈ ω ∫ u'v' r^{n-1} dr.
template <typename Scalar, typename DerivedA, typename DerivedB>
Scalar dirichlet_form(const RadialGrid<Scalar>& g, const Eigen::MatrixBase<DerivedA>& u,
                      const Eigen::MatrixBase<DerivedB>& v) {
  const Eigen::Index M = g.interior();
  Scalar sum = 0;
  for (Eigen::Index i = 0; i < M; ++i) {
    const Scalar du = Scalar(u(i)) - ((i + 1 < M) ? Scalar(u(i + 1)) : Scalar(0));
    const Scalar dv = Scalar(v(i)) - ((i + 1 < M) ? Scalar(v(i + 1)) : Scalar(0));
    sum += g.edge(i) * du * dv;
  }
  return sum;
}

/// Σ_j Σ_{i<M} w_i a_ij b_ij.
template <typename Scalar, typename DerivedA, typename DerivedB>
Scalar inner(const RadialGrid<Scalar>& g, const Eigen::MatrixBase<DerivedA>& a,
             const Eigen::MatrixBase<DerivedB>& b) {
  const Eigen::Index M = g.interior();
  return ((a.topRows(M).array() * b.topRows(M).array()).colwise() * g.weights.head(M).array())
      .sum();
}

/// Discrete L² norm with radial measure.
template <typename Scalar, typename Derived>
Scalar l2_norm(const RadialGrid<Scalar>& g, const Eigen::MatrixBase<Derived>& a) {
  using std::sqrt;
  return sqrt(inner(g, a, a));
}

/// ∫ a² b² dx.
template <typename Scalar, typename DerivedA, typename DerivedB>
Scalar integral_sq_sq(const RadialGrid<Scalar>& g, const Eigen::MatrixBase<DerivedA>& a,
                      const Eigen::MatrixBase<DerivedB>& b) {
  const Eigen::Index M = g.interior();
  return (a.head(M).array().square() * b.head(M).array().square() * g.weights.head(M).array())
      .sum();
}

/// ‖u‖_λ² = D(u, u) + λ ∫u².
template <typename Scalar, typename Derived>
Scalar norm_sq(const RadialGrid<Scalar>& g, const Eigen::MatrixBase<Derived>& u, Scalar lambda) {
  const Eigen::Index M = g.interior();
  return dirichlet_form(g, u, u) +
         lambda * (u.head(M).array().square() * g.weights.head(M).array()).sum();
}

template <typename Scalar>
struct Norms {
  std::vector<Scalar> per_component;  // ‖u_j‖_j
  Scalar total_sq = 0;                // Σ ‖u_j‖_j²
};

template <typename Scalar>
Norms<Scalar> norms(const SystemParams<Scalar>& p, const RadialGrid<Scalar>& g,
                    const State<Scalar>& u) {
  check_shapes(p, g, u);
  Norms<Scalar> out;
  for (int j = 0; j < p.size(); ++j) {
    using std::sqrt;
    const Scalar sq = norm_sq(g, u.col(j), p.lambda(j));
    out.per_component.push_back(sqrt(sq));
    out.total_sq += sq;
  }
  return out;
}

/// F(u) = ¼ Σ μ_j ∫u_j⁴ + ½ Σ_{j<k} β_jk ∫u_j²u_k².
template <typename Scalar>
Scalar nonlinear_potential(const SystemParams<Scalar>& p, const RadialGrid<Scalar>& g,
                           const State<Scalar>& u) {
  Scalar F = 0;
  for (int j = 0; j < p.size(); ++j) {
    F += p.mu(j) * integral_sq_sq(g, u.col(j), u.col(j)) / Scalar(4);
    for (int k = j + 1; k < p.size(); ++k)
      if (p.beta(j, k) != Scalar(0))
        F += p.beta(j, k) * integral_sq_sq(g, u.col(j), u.col(k)) / Scalar(2);
  }
  return F;
}

/// Φ(u) = ½‖u‖² - F(u) with the full coupling matrix of `p`.
template <typename Scalar>
Scalar energy_value(const SystemParams<Scalar>& p, const RadialGrid<Scalar>& g,
                    const State<Scalar>& u) {
  check_shapes(p, g, u);
  return norms(p, g, u).total_sq / Scalar(2) - nonlinear_potential(p, g, u);
}

template <typename Scalar>
struct EnergyBreakdown {
  Scalar total = 0;                // Φ_ε
  Scalar phi0 = 0;                 // Φ_0
  Scalar tildeF = 0;               // F̃
  std::vector<Scalar> I;           // I_j(u_j)
  std::vector<Scalar> pair_terms;  // -½ β_k ∫u_{2k-1}² u_{2k}²
  std::vector<Scalar> pair_phi;    // Φ_k(u_{2k-1}, u_{2k})
  Scalar quarter_norm = 0;         // ¼‖u‖²
};

/// Splits Φ_ε = Φ_0 - ε F̃ along the block structure.
template <typename Scalar>
EnergyBreakdown<Scalar> energy(const SystemParams<Scalar>& p, const BlockStructure<Scalar>& b,
                               const RadialGrid<Scalar>& g, const State<Scalar>& u) {
  check_shapes(p, g, u);
  check_consistent(p, b);
  EnergyBreakdown<Scalar> e;
  Scalar total_sq = 0;
  for (int j = 0; j < p.size(); ++j) {
    const Scalar sq = norm_sq(g, u.col(j), p.lambda(j));
    total_sq += sq;
    e.I.push_back(sq / Scalar(2) - p.mu(j) * integral_sq_sq(g, u.col(j), u.col(j)) / Scalar(4));
  }
  e.quarter_norm = total_sq / Scalar(4);
  e.phi0 = 0;
  for (Scalar v : e.I) e.phi0 += v;
  for (int k = 0; k < b.m; ++k) {
    const Scalar term =
        -b.pair_beta(k) * integral_sq_sq(g, u.col(2 * k), u.col(2 * k + 1)) / Scalar(2);
    e.pair_terms.push_back(term);
    e.pair_phi.push_back(e.I[2 * k] + e.I[2 * k + 1] + term);
    e.phi0 += term;
  }
  const int L = b.singles();
  for (int s = 0; s < L; ++s) {
    for (int c = 0; c < 2 * b.m; ++c)
      e.tildeF += b.tilde_beta(s, c) * integral_sq_sq(g, u.col(2 * b.m + s), u.col(c)) / Scalar(2);
    for (int t = s + 1; t < L; ++t)
      e.tildeF += b.tilde_beta_singles(s, t) *
                  integral_sq_sq(g, u.col(2 * b.m + s), u.col(2 * b.m + t)) / Scalar(2);
  }
  e.total = e.phi0 - b.eps * e.tildeF;
  return e;
}

/// Component j: -Δu_j + λ_j u_j - μ_j u_j³ - Σ_{k≠j} β_jk u_k² u_j, zero at the Dirichlet node.
template <typename Scalar>
State<Scalar> gradient(const SystemParams<Scalar>& p, const RadialGrid<Scalar>& g,
                       const State<Scalar>& u) {
  check_shapes(p, g, u);
  const Eigen::Index M = g.interior();
  const int N = p.size();
  State<Scalar> out = State<Scalar>::Zero(g.size(), N);
  for (int j = 0; j < N; ++j) {
    const Field<Scalar> Ku = stiffness_apply(g, u.col(j));
    auto uj = u.col(j).head(M).array();
    Eigen::Array<Scalar, Eigen::Dynamic, 1> coupling =
        Eigen::Array<Scalar, Eigen::Dynamic, 1>::Zero(M);
    for (int k = 0; k < N; ++k)
      if (k != j && p.beta(j, k) != Scalar(0))
        coupling += p.beta(j, k) * u.col(k).head(M).array().square();
    out.col(j).head(M) = (Ku.head(M).array() / g.weights.head(M).array() + p.lambda(j) * uj -
                          p.mu(j) * uj.cube() - coupling * uj)
                             .matrix();
  }
  return out;
}

/// Derivative of `gradient` at u in direction w.
template <typename Scalar>
State<Scalar> hessian_apply(const SystemParams<Scalar>& p, const RadialGrid<Scalar>& g,
                            const State<Scalar>& u, const State<Scalar>& w) {
  check_shapes(p, g, u);
  check_shapes(p, g, w);
  const Eigen::Index M = g.interior();
  const int N = p.size();
  State<Scalar> out = State<Scalar>::Zero(g.size(), N);
  for (int j = 0; j < N; ++j) {
    const Field<Scalar> Kw = stiffness_apply(g, w.col(j));
    auto uj = u.col(j).head(M).array();
    auto wj = w.col(j).head(M).array();
    Eigen::Array<Scalar, Eigen::Dynamic, 1> acc =
        Kw.head(M).array() / g.weights.head(M).array() + p.lambda(j) * wj -
        Scalar(3) * p.mu(j) * uj.square() * wj;
    for (int k = 0; k < N; ++k)
      if (k != j && p.beta(j, k) != Scalar(0)) {
        auto uk = u.col(k).head(M).array();
        auto wk = w.col(k).head(M).array();
        acc -= p.beta(j, k) * (uk.square() * wj + Scalar(2) * uj * uk * wk);
      }
    out.col(j).head(M) = acc.matrix();
  }
  return out;
}

/// ‖gradient(u)‖ in the discrete radial L² norm.
template <typename Scalar>
Scalar residual_norm(const SystemParams<Scalar>& p, const RadialGrid<Scalar>& g,
                     const State<Scalar>& u) {
  return l2_norm(g, gradient(p, g, u));
}

/// (Φ'(u)|u) = ‖u‖² - Σ μ_j ∫u_j⁴ - Σ_{j≠k} β_jk ∫u_j²u_k².
template <typename Scalar>
Scalar nehari_residual(const SystemParams<Scalar>& p, const RadialGrid<Scalar>& g,
                       const State<Scalar>& u) {
  check_shapes(p, g, u);
  require(!u.topRows(g.interior()).isZero(0), ErrorKind::ZeroState,
          "Nehari residual of the zero state");
  return norms(p, g, u).total_sq - Scalar(4) * nonlinear_potential(p, g, u);
}

}  // namespace cnls
