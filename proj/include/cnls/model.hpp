#pragma once

// Problem data, block decomposition and the radial grid shared by every module.

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cnls/error.hpp"

namespace cnls {

template <typename Scalar>
using Field = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Column j holds component u_{j+1}; row i holds the values at node r_i.
template <typename Scalar>
using State = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Surface measure of the unit sphere in R^n (n = 1 counts the two points of S^0).
template <typename Scalar>
Scalar sphere_measure(int n) {
  switch (n) {
    case 1: return Scalar(2);
    case 2: return Scalar(2) * std::numbers::pi_v<Scalar>;
    case 3: return Scalar(4) * std::numbers::pi_v<Scalar>;
    default: throw Error(ErrorKind::InvalidArgument, "dimension must be 1, 2 or 3");
  }
}

/// Data of -Δu_j + λ_j u_j = μ_j u_j³ + Σ_{k≠j} β_jk u_k² u_j on R^n.
template <typename Scalar>
struct SystemParams {
  int n = 1;
  Field<Scalar> lambda;
  Field<Scalar> mu;
  Matrix<Scalar> beta;

  int size() const { return static_cast<int>(lambda.size()); }

  void validate() const {
    require(n >= 1 && n <= 3, ErrorKind::InvalidArgument, "dimension must be 1, 2 or 3");
    const auto N = lambda.size();
    require(N >= 1, ErrorKind::InvalidArgument, "N must be at least 1");
    require(mu.size() == N && beta.rows() == N && beta.cols() == N, ErrorKind::InvalidArgument,
            "lambda, mu and beta sizes disagree");
    for (Eigen::Index j = 0; j < N; ++j) {
      require(std::isfinite(static_cast<double>(lambda(j))) && lambda(j) > 0,
              ErrorKind::InvalidArgument, "lambda_j must be positive");
      require(std::isfinite(static_cast<double>(mu(j))) && mu(j) > 0, ErrorKind::InvalidArgument,
              "mu_j must be positive");
      require(beta(j, j) == Scalar(0), ErrorKind::InvalidArgument, "beta diagonal must be zero");
      for (Eigen::Index k = 0; k < N; ++k) {
        require(std::isfinite(static_cast<double>(beta(j, k))), ErrorKind::InvalidArgument,
                "beta must be finite");
        require(beta(j, k) == beta(k, j), ErrorKind::InvalidArgument, "beta must be symmetric");
      }
    }
  }

  template <typename Other>
  SystemParams<Other> cast() const {
    return {n, lambda.template cast<Other>(), mu.template cast<Other>(),
            beta.template cast<Other>()};
  }
};

/// A single equation -Δu + λu = μu³.
template <typename Scalar>
SystemParams<Scalar> scalar_params(int n, Scalar lambda, Scalar mu) {
  SystemParams<Scalar> p;
  p.n = n;
  p.lambda = Field<Scalar>::Constant(1, lambda);
  p.mu = Field<Scalar>::Constant(1, mu);
  p.beta = Matrix<Scalar>::Zero(1, 1);
  return p;
}

/// m coupled pairs (u_{2k-1}, u_{2k}) followed by N-2m singles whose couplings are O(eps).
///
/// Indices are zero-based: pair k occupies components 2k and 2k+1, single s is component 2m+s.
/// `cross` holds the actual single-row couplings (eps * tilde up to rounding) and is the
/// authoritative source when the full coupling matrix is reassembled.
template <typename Scalar>
struct BlockStructure {
  int N = 0;
  int m = 0;
  Field<Scalar> pair_beta;
  Scalar eps = 0;
  Matrix<Scalar> tilde_beta;          // (N-2m) x 2m, single-to-pair
  Matrix<Scalar> tilde_beta_singles;  // (N-2m) x (N-2m), single-to-single, symmetric
  Matrix<Scalar> cross;               // N x N, zero outside single rows/columns

  int singles() const { return N - 2 * m; }

  template <typename Other>
  BlockStructure<Other> cast() const {
    return {N,
            m,
            pair_beta.template cast<Other>(),
            static_cast<Other>(eps),
            tilde_beta.template cast<Other>(),
            tilde_beta_singles.template cast<Other>(),
            cross.template cast<Other>()};
  }
};

/// Builds the structure from pair couplings and rescaled cross couplings at a given eps.
template <typename Scalar>
BlockStructure<Scalar> make_blocks(int N, const Field<Scalar>& pair_beta,
                                   const Matrix<Scalar>& tilde_beta,
                                   const Matrix<Scalar>& tilde_beta_singles, Scalar eps) {
  const int m = static_cast<int>(pair_beta.size());
  const int L = N - 2 * m;
  require(m >= 0 && L >= 0, ErrorKind::InvalidArgument, "2m must not exceed N");
  require(eps >= 0, ErrorKind::InvalidArgument, "eps must be nonnegative");
  require(tilde_beta.rows() == L && tilde_beta.cols() == 2 * m, ErrorKind::InvalidArgument,
          "tilde_beta must be (N-2m) x 2m");
  require(tilde_beta_singles.rows() == L && tilde_beta_singles.cols() == L,
          ErrorKind::InvalidArgument, "tilde_beta_singles must be (N-2m) x (N-2m)");
  for (int s = 0; s < L; ++s) {
    require(tilde_beta_singles(s, s) == Scalar(0), ErrorKind::InvalidArgument,
            "tilde_beta_singles diagonal must be zero");
    for (int t = 0; t < L; ++t)
      require(tilde_beta_singles(s, t) == tilde_beta_singles(t, s), ErrorKind::InvalidArgument,
              "tilde_beta_singles must be symmetric");
  }
  BlockStructure<Scalar> b{N, m, pair_beta, eps, tilde_beta, tilde_beta_singles,
                           Matrix<Scalar>::Zero(N, N)};
  for (int s = 0; s < L; ++s) {
    for (int c = 0; c < 2 * m; ++c) {
      b.cross(2 * m + s, c) = eps * tilde_beta(s, c);
      b.cross(c, 2 * m + s) = b.cross(2 * m + s, c);
    }
    for (int t = 0; t < L; ++t) b.cross(2 * m + s, 2 * m + t) = eps * tilde_beta_singles(s, t);
  }
  return b;
}

/// Same rescaled couplings, different perturbation size.
template <typename Scalar>
BlockStructure<Scalar> at_eps(const BlockStructure<Scalar>& b, Scalar eps) {
  return make_blocks(b.N, b.pair_beta, b.tilde_beta, b.tilde_beta_singles, eps);
}

/// Reassembles the full coupling matrix: pair couplings plus the cross block.
template <typename Scalar>
Matrix<Scalar> assemble_beta(const BlockStructure<Scalar>& b) {
  Matrix<Scalar> beta = b.cross;
  for (int k = 0; k < b.m; ++k) {
    beta(2 * k, 2 * k + 1) = b.pair_beta(k);
    beta(2 * k + 1, 2 * k) = b.pair_beta(k);
  }
  return beta;
}

/// Parameters of the system with the couplings prescribed by `b`.
template <typename Scalar>
SystemParams<Scalar> with_blocks(SystemParams<Scalar> p, const BlockStructure<Scalar>& b) {
  require(b.N == p.size(), ErrorKind::InvalidArgument, "block structure size differs from N");
  p.beta = assemble_beta(b);
  return p;
}

/// True when the pair-to-pair coupling slot (j, k) lies outside every modeled block.
inline bool is_forbidden_coupling(int m, int j, int k) {
  if (j == k) return false;
  if (j >= 2 * m || k >= 2 * m) return false;
  return j / 2 != k / 2;
}

/// Decomposes the coupling matrix into m pairs and N-2m eps-small singles.
template <typename Scalar>
BlockStructure<Scalar> split_blocks(const SystemParams<Scalar>& p, int m, Scalar eps) {
  p.validate();
  const int N = p.size();
  require(m >= 0 && 2 * m <= N, ErrorKind::InvalidArgument, "2m must not exceed N");
  require(eps >= 0 && std::isfinite(static_cast<double>(eps)), ErrorKind::InvalidArgument,
          "eps must be finite and nonnegative");
  for (int k = 0; k < m; ++k)
    require(p.lambda(2 * k) == p.lambda(2 * k + 1), ErrorKind::PairLambdaMismatch,
            "pair " + std::to_string(k + 1) + " has lambda_{2k-1} != lambda_{2k}");
  for (int j = 0; j < N; ++j)
    for (int k = 0; k < N; ++k)
      require(!is_forbidden_coupling(m, j, k) || p.beta(j, k) == Scalar(0),
              ErrorKind::NonzeroForbiddenCoupling,
              "coupling between different pairs (" + std::to_string(j + 1) + "," +
                  std::to_string(k + 1) + ") must be zero");

  const int L = N - 2 * m;
  Matrix<Scalar> cross = Matrix<Scalar>::Zero(N, N);
  bool any_cross = false;
  for (int j = 0; j < N; ++j)
    for (int k = 0; k < N; ++k)
      if (j >= 2 * m || k >= 2 * m) {
        cross(j, k) = p.beta(j, k);
        any_cross = any_cross || p.beta(j, k) != Scalar(0);
      }
  require(!any_cross || eps > 0, ErrorKind::ZeroEps, "eps = 0 but cross couplings are nonzero");

  BlockStructure<Scalar> b;
  b.N = N;
  b.m = m;
  b.eps = eps;
  b.pair_beta.resize(m);
  for (int k = 0; k < m; ++k) b.pair_beta(k) = p.beta(2 * k, 2 * k + 1);
  b.tilde_beta = Matrix<Scalar>::Zero(L, 2 * m);
  b.tilde_beta_singles = Matrix<Scalar>::Zero(L, L);
  if (eps > 0) {
    for (int s = 0; s < L; ++s) {
      for (int c = 0; c < 2 * m; ++c) b.tilde_beta(s, c) = p.beta(2 * m + s, c) / eps;
      for (int t = 0; t < L; ++t) b.tilde_beta_singles(s, t) = p.beta(2 * m + s, 2 * m + t) / eps;
    }
  }
  b.cross = cross;
  return b;
}

/// Throws unless `b` describes exactly the couplings and pair constraints of `p`.
template <typename Scalar>
void check_consistent(const SystemParams<Scalar>& p, const BlockStructure<Scalar>& b) {
  require(b.N == p.size() && 2 * b.m <= b.N, ErrorKind::InvalidArgument,
          "block structure size differs from N");
  for (int k = 0; k < b.m; ++k)
    require(p.lambda(2 * k) == p.lambda(2 * k + 1), ErrorKind::PairLambdaMismatch,
            "pair " + std::to_string(k + 1) + " has lambda_{2k-1} != lambda_{2k}");
  const Matrix<Scalar> beta = assemble_beta(b);
  for (int j = 0; j < b.N; ++j)
    for (int k = 0; k < b.N; ++k) {
      if (is_forbidden_coupling(b.m, j, k))
        require(p.beta(j, k) == Scalar(0), ErrorKind::NonzeroForbiddenCoupling,
                "coupling between different pairs must be zero");
      require(beta(j, k) == p.beta(j, k), ErrorKind::InvalidArgument,
              "block structure does not reproduce beta");
    }
}

/// Vertex-centred radial grid on [0, R] with exact shell volumes as quadrature weights.
///
/// Node i owns the shell between the neighbouring midpoints (0 and R at the ends), so
/// Σ w_i = ω_{n-1} R^n / n exactly and the origin row of the discrete Laplacian reduces to
/// the symmetric stencil 2n (u_0 - u_1) / r_1². The last node carries the Dirichlet condition.
template <typename Scalar>
struct RadialGrid {
  int n = 1;
  Scalar R = 0;
  Field<Scalar> nodes;
  Field<Scalar> weights;
  /// edge[i] = ω f_i^{n-1} / (r_{i+1} - r_i), f_i the midpoint of edge i.
  Field<Scalar> edge;

  Eigen::Index size() const { return nodes.size(); }
  /// Number of free nodes (everything but the Dirichlet node at R).
  Eigen::Index interior() const { return nodes.size() - 1; }

  Scalar max_spacing() const {
    Scalar h = 0;
    for (Eigen::Index i = 0; i + 1 < size(); ++i) h = std::max(h, nodes(i + 1) - nodes(i));
    return h;
  }

  /// Σ w_i f(r_i) ≈ ∫_{|x|<R} f(|x|) dx.
  template <typename Derived>
  Scalar integrate(const Eigen::MatrixBase<Derived>& f) const {
    return weights.dot(f);
  }

  template <typename Other>
  RadialGrid<Other> cast() const;
};

template <typename Scalar>
RadialGrid<Scalar> grid_from_nodes(int n, const Field<Scalar>& nodes) {
  require(n >= 1 && n <= 3, ErrorKind::InvalidArgument, "dimension must be 1, 2 or 3");
  const Eigen::Index size = nodes.size();
  require(size >= 17, ErrorKind::InvalidArgument, "grid needs at least 17 nodes");
  require(nodes(0) == Scalar(0), ErrorKind::InvalidArgument, "first node must be r = 0");
  for (Eigen::Index i = 0; i + 1 < size; ++i)
    require(std::isfinite(static_cast<double>(nodes(i + 1))) && nodes(i + 1) > nodes(i),
            ErrorKind::InvalidArgument, "nodes must be finite and strictly increasing");

  const Scalar omega = sphere_measure<Scalar>(n);
  RadialGrid<Scalar> g;
  g.n = n;
  g.R = nodes(size - 1);
  g.nodes = nodes;
  g.weights.resize(size);
  g.edge.resize(size - 1);
  auto shell = [&](Scalar a, Scalar b) {
    using std::pow;
    return omega * (pow(b, n) - pow(a, n)) / Scalar(n);
  };
  Scalar lower = 0;
  for (Eigen::Index i = 0; i < size; ++i) {
    const Scalar upper = (i + 1 < size) ? (nodes(i) + nodes(i + 1)) / Scalar(2) : g.R;
    g.weights(i) = shell(lower, upper);
    if (i + 1 < size) {
      using std::pow;
      g.edge(i) = omega * pow(upper, n - 1) / (nodes(i + 1) - nodes(i));
    }
    lower = upper;
  }
  return g;
}

template <typename Scalar>
template <typename Other>
RadialGrid<Other> RadialGrid<Scalar>::cast() const {
  return grid_from_nodes<Other>(n, nodes.template cast<Other>());
}

/// Grid graded toward the origin: r(ξ) = R (ξ + cξ²)/(1 + c) with c = (stretch - 1)/2,
/// so the outermost spacing is `stretch` times the innermost.
template <typename Scalar = double>
RadialGrid<Scalar> make_grid(int n, Scalar R, int M, Scalar stretch = 1) {
  require(n >= 1 && n <= 3, ErrorKind::InvalidArgument, "dimension must be 1, 2 or 3");
  require(std::isfinite(static_cast<double>(R)) && R > 0, ErrorKind::InvalidArgument,
          "R must be positive and finite");
  require(M >= 16, ErrorKind::InvalidArgument, "M must be at least 16");
  require(std::isfinite(static_cast<double>(stretch)) && stretch >= 1,
          ErrorKind::InvalidArgument, "stretch must be >= 1");
  const Scalar c = (stretch - Scalar(1)) / Scalar(2);
  Field<Scalar> nodes(M + 1);
  for (int i = 0; i <= M; ++i) {
    const Scalar xi = Scalar(i) / Scalar(M);
    nodes(i) = R * (xi + c * xi * xi) / (Scalar(1) + c);
  }
  nodes(M) = R;
  return grid_from_nodes<Scalar>(n, nodes);
}

/// Truncation radius with e^{-sqrt(λ_min) R} < 1e-10.
inline double default_radius(double lambda_min) {
  return std::ceil(10.0 * std::log(10.0) / std::sqrt(lambda_min));
}

enum class Positivity { Positive, Nonnegative, SignChanging, ZeroComponent };

inline std::string to_string(Positivity p) {
  switch (p) {
    case Positivity::Positive: return "positive";
    case Positivity::Nonnegative: return "nonnegative";
    case Positivity::SignChanging: return "sign-changing";
    case Positivity::ZeroComponent: return "zero-component";
  }
  return "unknown";
}

enum class SolveStatus { Converged, NoConvergence, SingularJacobian };

inline std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::NoConvergence: return "NoConvergence";
    case SolveStatus::SingularJacobian: return "SingularJacobian";
  }
  return "unknown";
}

struct SolveReport {
  State<double> state;
  SolveStatus status = SolveStatus::NoConvergence;
  double residual_norm = 0;
  std::vector<double> residual_history;
  double energy = 0;
  std::vector<double> component_norms;
  Positivity positivity = Positivity::ZeroComponent;
  std::vector<Positivity> component_positivity;
  int newton_iters = 0;
  double eps = 0;
  std::vector<std::string> flags;

  bool converged() const { return status == SolveStatus::Converged; }
};

using Grid = RadialGrid<double>;

}  // namespace cnls
