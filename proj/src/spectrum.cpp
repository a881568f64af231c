#include "cnls/spectrum.hpp"

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

#include "cnls/functional.hpp"
#include "cnls/newton.hpp"

namespace cnls {

SpectrumSummary schrodinger_spectrum(const Grid& g, const Field<double>& potential) {
  const Eigen::Index M = g.interior();
  require(potential.size() >= M, ErrorKind::GridMismatch, "potential is not sampled on the grid");
  Eigen::VectorXd diag(M), sub(M - 1);
  for (Eigen::Index i = 0; i < M; ++i) {
    diag(i) = (g.edge(i) + (i > 0 ? g.edge(i - 1) : 0.0)) / g.weights(i) + potential(i);
    if (i + 1 < M) sub(i) = -g.edge(i) / std::sqrt(g.weights(i) * g.weights(i + 1));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  require(solver.info() == Eigen::Success, ErrorKind::EigSolverFailure,
          "tridiagonal eigensolver did not converge");
  const Eigen::VectorXd& ev = solver.eigenvalues();
  SpectrumSummary out;
  out.lowest = ev.minCoeff();
  Eigen::Index k;
  ev.cwiseAbs().minCoeff(&k);
  out.nearest_zero = ev(k);
  return out;
}

double smallest_singular_value(const SystemParams<double>& p, const Grid& g,
                               const State<double>& u, int krylov_dim) {
  const Eigen::SparseMatrix<double> H = weak_hessian(p, g, u);
  const Eigen::Index dim = H.rows();
  const int N = p.size();
  Eigen::VectorXd sqrt_w(dim);
  for (Eigen::Index i = 0; i < g.interior(); ++i)
    for (int j = 0; j < N; ++j) sqrt_w(i * N + j) = std::sqrt(g.weights(i));

  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(H);
  if (lu.info() != Eigen::Success) return 0.0;

  // Lanczos on S⁻¹ = W^{1/2} H⁻¹ W^{1/2}; its largest |eigenvalue| is 1/σ_min.
  auto apply = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    Eigen::VectorXd x = lu.solve(sqrt_w.cwiseProduct(v));
    return sqrt_w.cwiseProduct(x);
  };
  const Eigen::Index max_dim = std::min<Eigen::Index>(dim, std::max(krylov_dim, 300));
  Eigen::MatrixXd V(dim, max_dim);
  std::vector<double> alpha, beta;
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> dist(0.5, 1.5);
  Eigen::VectorXd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v(i) = dist(rng);
  V.col(0) = v.normalized();

  double estimate = 0;
  for (Eigen::Index k = 0; k < max_dim; ++k) {
    Eigen::VectorXd w = apply(V.col(k));
    if (!w.allFinite()) throw Error(ErrorKind::EigSolverFailure, "Hessian solve produced NaN");
    alpha.push_back(V.col(k).dot(w));
    // Full reorthogonalization, twice.
    for (int pass = 0; pass < 2; ++pass)
      w -= V.leftCols(k + 1) * (V.leftCols(k + 1).transpose() * w);
    const double b = w.norm();

    const Eigen::Index m = k + 1;
    const bool check = (m >= krylov_dim && m % 10 == 0) || m == max_dim || b < 1e-14;
    if (check) {
      Eigen::VectorXd d = Eigen::Map<Eigen::VectorXd>(alpha.data(), m);
      Eigen::VectorXd e = Eigen::Map<Eigen::VectorXd>(beta.data(), m - 1);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz;
      ritz.computeFromTridiagonal(d, e, Eigen::ComputeEigenvectors);
      require(ritz.info() == Eigen::Success, ErrorKind::EigSolverFailure,
              "Lanczos projection did not converge");
      Eigen::Index top;
      ritz.eigenvalues().cwiseAbs().maxCoeff(&top);
      const double theta = ritz.eigenvalues()(top);
      const double bound = std::abs(b * ritz.eigenvectors()(m - 1, top));
      estimate = 1.0 / std::abs(theta);
      if (bound <= 1e-10 * std::abs(theta) || m == max_dim || b < 1e-14) return estimate;
    }
    if (k + 1 < max_dim) {
      beta.push_back(b);
      V.col(k + 1) = w / b;
    }
  }
  throw Error(ErrorKind::EigSolverFailure, "Lanczos did not converge");
}

}  // namespace cnls
