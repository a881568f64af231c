#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "cnls/continuation.hpp"
#include "cnls/diagnostics.hpp"
#include "cnls/functional.hpp"
#include "cnls/pair_explicit.hpp"
#include "oracles.hpp"

using namespace cnls;

namespace {

SystemParams<double> three(double b12, double b13, double b23, double mu3 = 1) {
  SystemParams<double> p;
  p.n = 1;
  p.lambda = Eigen::Vector3d(1, 1, 1);
  p.mu = Eigen::Vector3d(1, 1, mu3);
  p.beta = Eigen::Matrix3d{{0, b12, b13}, {b12, 0, b23}, {b13, b23, 0}};
  return p;
}

bool has_flag(const std::vector<std::string>& flags, const std::string& prefix) {
  return std::any_of(flags.begin(), flags.end(),
                     [&](const std::string& f) { return f.rfind(prefix, 0) == 0; });
}

double integral(const Grid& g, const Eigen::ArrayXd& f) {
  return (f.head(g.interior()) * g.weights.head(g.interior()).array()).sum();
}

}  // namespace

TEST_SUITE("diagnostics") {
  TEST_CASE("positivity classes") {
    const ScalarGround sg = solve_scalar_ground(make_grid(1, 24.0, 1000));
    const auto p = three(3, 0, 0);
    const auto b = split_blocks(p, 1, 0.0);
    State<double> z = build_unperturbed(p, b, sg);
    CHECK(classify_positivity(sg.grid, z).overall == Positivity::Positive);

    State<double> semi = z;
    semi.col(1).setZero();
    const auto rep = classify_positivity(sg.grid, semi);
    CHECK(rep.overall == Positivity::ZeroComponent);
    CHECK(rep.components[1] == Positivity::ZeroComponent);
    CHECK(rep.components[0] == Positivity::Positive);

    State<double> dip = z;
    dip(300, 0) = -1e-3 * z.col(0).cwiseAbs().maxCoeff();
    CHECK(classify_positivity(sg.grid, dip).overall == Positivity::SignChanging);
    CHECK(classify_positivity(sg.grid, dip).components[0] == Positivity::SignChanging);

    State<double> noise = z;
    noise(999, 2) = -1e-10;
    CHECK(classify_positivity(sg.grid, noise).overall == Positivity::Nonnegative);

    State<double> touching = z;
    touching(500, 2) = 0.0;
    CHECK(classify_positivity(sg.grid, touching).components[2] == Positivity::Nonnegative);

    CHECK(to_string(Positivity::SignChanging) == "sign-changing");
  }

  TEST_CASE("obstruction identities: general form matches the literal three-component formulas") {
    std::mt19937 rng(21);
    const Grid g = make_grid(1, 15.0, 200);
    SystemParams<double> p = three(3, 0.4, -0.3, 0.8);
    p.mu(1) = 1.7;
    const State<double> u = oracle::random_state(g, 3, rng);
    auto value = [&](int j, int k) {
      const auto c = obstruction_coefficients(p, j, k);
      const Eigen::ArrayXd uj = u.col(j).array(), uk = u.col(k).array();
      double v = c.cubic_j * integral(g, uj.cube() * uk) + c.cubic_k * integral(g, uj * uk.cube());
      for (int i = 0; i < 3; ++i) v += c.mixed[i] * integral(g, u.col(i).array().square() * uj * uk);
      return v;
    };
    const Eigen::ArrayXd u1 = u.col(0).array(), u2 = u.col(1).array(), u3 = u.col(2).array();
    const double h13 = (p.mu(0) - p.beta(0, 2)) * integral(g, u1.cube() * u3) +
                       (p.beta(0, 1) - p.beta(1, 2)) * integral(g, u1 * u2.square() * u3) +
                       (p.beta(0, 2) - p.mu(2)) * integral(g, u1 * u3.cube());
    const double h23 = (p.mu(1) - p.beta(1, 2)) * integral(g, u2.cube() * u3) +
                       (p.beta(0, 1) - p.beta(0, 2)) * integral(g, u1.square() * u2 * u3) +
                       (p.beta(1, 2) - p.mu(2)) * integral(g, u2 * u3.cube());
    CHECK(value(0, 2) == doctest::Approx(h13).epsilon(1e-13));
    CHECK(value(1, 2) == doctest::Approx(h23).epsilon(1e-13));
  }

  TEST_CASE("obstruction identities vanish at critical points, trivially on semitrivial states") {
    const ScalarGround sg = solve_scalar_ground(make_grid(1, 24.0, 1000));
    const auto p = three(3, 0, 0);
    const auto b = split_blocks(p, 1, 0.0);
    const State<double> z = build_unperturbed(p, b, sg);
    for (const auto& v : obstruction_identities(p, sg.grid, z)) CHECK(std::abs(v.value) < 1e-9);

    const PairSolution ps = pair_solution(sg, 1.0, 1.0, 1.0, 3.0);
    State<double> semi = State<double>::Zero(sg.grid.size(), 3);
    semi.col(0) = ps.u0;
    semi.col(1) = ps.v0;
    const auto vals = obstruction_identities(p, sg.grid, semi);
    CHECK(vals.size() == 3);
    CHECK(vals[1].value == 0.0);
    CHECK(vals[2].value == 0.0);

    std::mt19937 rng(2);
    CHECK_THROWS_WITH_AS(obstruction_identities(p, sg.grid, oracle::random_state(sg.grid, 3, rng)),
                         doctest::Contains("NotCritical"), Error);
  }

  TEST_CASE("obstruction values scale linearly with the residual") {
    const ScalarGround sg = solve_scalar_ground(make_grid(1, 24.0, 1000));
    const auto p = three(3, 0.02, 0.02);
    const auto b = split_blocks(p, 1, 0.02);
    const ContinuationPath path = continue_in_eps(p, b, sg, 0.02, 2);
    REQUIRE(path.reached_target);
    const State<double> u = path.reports.back().state;
    Field<double> bump = (-sg.grid.nodes.array().square()).exp().matrix();
    double prev_ratio = 0;
    for (double delta : {1e-4, 5e-5, 2.5e-5}) {
      State<double> w = u;
      w.col(2) += delta * bump;
      const double r = residual_norm(p, sg.grid, w);
      double worst = 0;
      for (const auto& v : obstruction_identities(p, sg.grid, w, 1.0))
        worst = std::max(worst, std::abs(v.value));
      const double ratio = worst / r;
      if (prev_ratio > 0) CHECK(ratio == doctest::Approx(prev_ratio).epsilon(0.05));
      prev_ratio = ratio;
    }
  }

  TEST_CASE("admissibility flags") {
    // μ₃ < β₁₃: the third equation cannot hold with all components positive.
    const auto bad = positivity_admissibility(three(3, 2, 0.5), 1);
    CHECK(bad.positive_excluded);
    CHECK(has_flag(bad.flags, "no_positive_solution: mu_3 < beta_13"));

    const auto fine = positivity_admissibility(three(3, 0.05, 0.05), 1);
    CHECK_FALSE(fine.positive_excluded);
    CHECK(fine.flags.empty());

    // Equal self couplings dominated by one cross coupling give a single-signed identity.
    SystemParams<double> q = three(0.5, 0.0, 0.0, 1.0);
    q.mu(1) = 0.5;
    const auto single = positivity_admissibility(q, 0);
    CHECK(single.positive_excluded);
    CHECK(has_flag(single.flags, "no_positive_solution: identity (1,2)"));
  }

  TEST_CASE("energy comparison") {
    const ScalarGround sg = solve_scalar_ground(make_grid(2, 24.0, 1000, 2.0));
    const double mu1 = 1.0, mu2 = 1.5, beta = 2.0;
    const PairSolution ps = pair_solution(sg, 1.0, mu1, mu2, beta);
    const auto p = ps.params();
    State<double> only1 = State<double>::Zero(sg.grid.size(), 2), only2 = only1;
    only1.col(0) = scale_ground(sg, 1.0, mu1);
    only2.col(1) = scale_ground(sg, 1.0, mu2);
    const auto ranked = energy_comparison(p, sg.grid, {only1, ps.state(), only2});
    CHECK(ranked.front().index == 1);
    CHECK(ranked.front().ground_state_candidate);
    CHECK_FALSE(ranked[1].ground_state_candidate);
    const auto permuted = energy_comparison(p, sg.grid, {only2, only1, ps.state()});
    CHECK(permuted.front().index == 2);
    for (int i = 0; i < 3; ++i) CHECK(permuted[i].energy == ranked[i].energy);

    const auto twins = energy_comparison(p, sg.grid, {ps.state(), ps.state()});
    CHECK(twins[0].index == 0);
    CHECK(twins[1].index == 1);
    CHECK(energy_comparison(p, sg.grid, {only1}).front().ground_state_candidate);

    State<double> off = ps.state();
    off *= 1.1;
    CHECK_THROWS_WITH_AS(energy_comparison(p, sg.grid, {ps.state(), off}),
                         doctest::Contains("NotCritical"), Error);
  }
}
