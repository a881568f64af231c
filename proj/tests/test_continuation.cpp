#include <doctest.h>

#include <cmath>

#include "cnls/continuation.hpp"
#include "cnls/diagnostics.hpp"
#include "cnls/functional.hpp"
#include "cnls/pair_explicit.hpp"

using namespace cnls;

namespace {

SystemParams<double> reference(double b13, double b23) {
  SystemParams<double> p;
  p.n = 1;
  p.lambda = Eigen::Vector3d(1, 1, 1);
  p.mu = Eigen::Vector3d(1, 1, 1);
  p.beta = Eigen::Matrix3d{{0, 3, b13}, {3, 0, b23}, {b13, b23, 0}};
  return p;
}

BlockStructure<double> reference_blocks(double t13, double t23) {
  return make_blocks<double>(3, Eigen::VectorXd::Constant(1, 3.0),
                             Eigen::RowVector2d(t13, t23), Eigen::MatrixXd::Zero(1, 1), 0.0);
}

}  // namespace

TEST_SUITE("continuation") {
  TEST_CASE("unperturbed state in n = 1") {
    const ScalarGround sg = solve_scalar_ground(make_grid(1, 24.0, 2000));
    const auto b = reference_blocks(1, 1);
    const auto p = with_blocks(reference(0, 0), b);
    const State<double> z = build_unperturbed(p, b, sg);
    const Eigen::ArrayXd sech = 1.0 / sg.grid.nodes.array().cosh();
    CHECK((z.col(0).array() - 0.5 * std::sqrt(2.0) * sech).abs().maxCoeff() < 5e-5);
    CHECK((z.col(2).array() - std::sqrt(2.0) * sech).abs().maxCoeff() < 5e-5);
    CHECK(energy(p, b, sg.grid, z).phi0 == doctest::Approx(2.0).epsilon(1e-5));
    CHECK(residual_norm(p, sg.grid, z) < 1e-8);
  }

  TEST_CASE("the endpoints of the block structure") {
    const ScalarGround sg = solve_scalar_ground(make_grid(2, 24.0, 800, 2.0));
    SystemParams<double> pair = pair_params(2, 1.0, 1.0, 1.4, 2.0);
    const State<double> z1 = build_unperturbed(pair, split_blocks(pair, 1, 0.0), sg);
    const PairSolution ps = pair_solution(sg, 1.0, 1.0, 1.4, 2.0);
    CHECK((z1 - ps.state()).cwiseAbs().maxCoeff() == 0.0);

    SystemParams<double> singles;
    singles.n = 2;
    singles.lambda = Eigen::Vector3d(1, 2, 0.5);
    singles.mu = Eigen::Vector3d(1, 0.5, 2);
    singles.beta = Eigen::Matrix3d::Zero();
    const State<double> z2 = build_unperturbed(singles, split_blocks(singles, 0, 0.0), sg);
    for (int j = 0; j < 3; ++j)
      CHECK((z2.col(j) - scale_ground(sg, singles.lambda(j), singles.mu(j))).cwiseAbs().maxCoeff() ==
            0.0);
  }

  TEST_CASE("build_unperturbed preconditions") {
    const ScalarGround sg = solve_scalar_ground(make_grid(1, 24.0, 400));
    const auto b = make_blocks<double>(3, Eigen::VectorXd::Constant(1, 0.5),
                                       Eigen::RowVector2d(1, 1), Eigen::MatrixXd::Zero(1, 1), 0.0);
    CHECK_THROWS_WITH_AS(build_unperturbed(with_blocks(reference(0, 0), b), b, sg),
                         doctest::Contains("OutOfWindow"), Error);
    auto p = reference(0, 0);
    p.lambda(1) = 2;
    CHECK_THROWS_WITH_AS(build_unperturbed(p, reference_blocks(1, 1), sg),
                         doctest::Contains("PairLambdaMismatch"), Error);
    auto q = reference(0, 0);
    q.n = 2;
    CHECK_THROWS_WITH_AS(build_unperturbed(q, reference_blocks(1, 1), sg),
                         doctest::Contains("GridMismatch"), Error);
  }

  TEST_CASE("reference path: positive, critical, and linear in eps") {
    const ScalarGround sg = solve_scalar_ground(make_grid(1, 24.0, 2000));
    const auto b = reference_blocks(1, 1);
    const ContinuationPath path = continue_in_eps(reference(0, 0), b, sg, 0.05, 10);
    REQUIRE(path.reached_target);
    CHECK(path.eps_values.size() == 11);
    CHECK_FALSE(path.eps0_estimate.has_value());
    CHECK(path.distance_to_z[0] < 1e-9);
    for (std::size_t i = 0; i < path.reports.size(); ++i) {
      const SolveReport& rep = path.reports[i];
      const auto p = with_blocks(reference(0, 0), at_eps(b, path.eps_values[i]));
      CHECK(rep.converged());
      CHECK(rep.residual_norm < 1e-9);
      CHECK(rep.positivity == Positivity::Positive);
      CHECK(std::abs(rep.energy - norms(p, sg.grid, rep.state).total_sq / 4) < 1e-8);
      for (const auto& v : obstruction_identities(p, sg.grid, rep.state))
        CHECK(std::abs(v.value) < 1e-6);
      if (i > 0) CHECK(path.distance_to_z[i] > path.distance_to_z[i - 1]);
    }
    const double s1 = path.distance_to_z[1] / path.eps_values[1];
    const double s2 = path.distance_to_z[2] / path.eps_values[2];
    CHECK(std::abs(s2 - s1) / s1 < 0.2);

    // Block norms move by O(eps).
    const auto& z = path.z;
    const auto& last = path.reports.back().state;
    for (int j = 0; j < 3; ++j) {
      const double dz = std::sqrt(norm_sq(sg.grid, z.col(j), 1.0));
      const double du = std::sqrt(norm_sq(sg.grid, last.col(j), 1.0));
      const double d1 = std::abs(std::sqrt(norm_sq(sg.grid, path.reports[1].state.col(j), 1.0)) - dz);
      const double C = d1 / path.eps_values[1];
      CHECK(std::abs(du - dz) <= 2 * C * path.eps_values.back() + 1e-12);
    }
  }

  TEST_CASE("eps_target = 0 returns z") {
    const ScalarGround sg = solve_scalar_ground(make_grid(1, 24.0, 600));
    const ContinuationPath path = continue_in_eps(reference(0, 0), reference_blocks(1, 1), sg, 0.0, 5);
    CHECK(path.eps_values.size() == 1);
    CHECK(path.reached_target);
    CHECK((path.reports[0].state - path.z).cwiseAbs().maxCoeff() < 1e-9);
  }

  TEST_CASE("mixed signs stay nonnegative") {
    const ScalarGround sg = solve_scalar_ground(make_grid(1, 24.0, 1000));
    const ContinuationPath path =
        continue_in_eps(reference(0, 0), reference_blocks(-1, 1), sg, 0.02, 4);
    REQUIRE(path.reached_target);
    for (const auto& rep : path.reports) {
      CHECK(rep.converged());
      CHECK(rep.positivity != Positivity::SignChanging);
      CHECK(rep.positivity != Positivity::ZeroComponent);
    }
    CHECK_FALSE(path.eps0_estimate.has_value());
  }

  TEST_CASE("m = 0 recovers the small-coupling positive state") {
    const ScalarGround sg = solve_scalar_ground(make_grid(2, 24.0, 800, 2.0));
    SystemParams<double> p;
    p.n = 2;
    p.lambda = Eigen::Vector2d(1, 1.5);
    p.mu = Eigen::Vector2d(1, 2);
    p.beta = Eigen::Matrix2d::Zero();
    const auto b = make_blocks<double>(2, Eigen::VectorXd(0), Eigen::MatrixXd(2, 0),
                                       Eigen::Matrix2d{{0, 1}, {1, 0}}, 0.0);
    const ContinuationPath path = continue_in_eps(p, b, sg, 0.02, 4);
    REQUIRE(path.reached_target);
    for (const auto& rep : path.reports) CHECK(rep.positivity == Positivity::Positive);
    CHECK(path.distance_to_z.back() > 0);
    CHECK(path.distance_to_z[1] < path.distance_to_z.back());
  }

  TEST_CASE("failures") {
    const ScalarGround sg = solve_scalar_ground(make_grid(1, 24.0, 400));
    ContinuationOptions strict;
    strict.tol = 1e-30;
    strict.max_iter = 0;
    CHECK_THROWS_WITH_AS(continue_in_eps(reference(0, 0), reference_blocks(1, 1), sg, 0.05, 5, strict),
                         doctest::Contains("ImmediateFailure"), Error);
    CHECK_THROWS_AS(continue_in_eps(reference(0, 0), reference_blocks(1, 1), sg, -1.0, 5), Error);
    CHECK_THROWS_AS(continue_in_eps(reference(0, 0), reference_blocks(1, 1), sg, 0.1, 0), Error);
  }

  TEST_CASE("large eps records an estimate of eps0") {
    const ScalarGround sg = solve_scalar_ground(make_grid(1, 24.0, 600));
    const ContinuationPath path = continue_in_eps(reference(0, 0), reference_blocks(1, 1), sg, 4.0, 20);
    REQUIRE(path.eps0_estimate.has_value());
    CHECK(*path.eps0_estimate > 0.05);
    CHECK(*path.eps0_estimate <= 4.0);
  }

  TEST_CASE("obstructed couplings are flagged along the path") {
    const ScalarGround sg = solve_scalar_ground(make_grid(1, 24.0, 600));
    // β̃₁₃ = 40: at eps = 0.05 the coupling β₁₃ = 2 exceeds μ₃ = 1.
    const ContinuationPath path = continue_in_eps(reference(0, 0), reference_blocks(40, 40), sg, 0.05, 10);
    bool flagged_any = false;
    for (const auto& rep : path.reports) {
      const bool flagged = std::any_of(rep.flags.begin(), rep.flags.end(), [](const std::string& f) {
        return f.rfind("no_positive_solution", 0) == 0;
      });
      flagged_any = flagged_any || flagged;
      if (rep.positivity == Positivity::Positive && rep.eps * 40 > 1.0) CHECK(flagged);
    }
    CHECK(flagged_any);
  }
}
