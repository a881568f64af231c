#include <doctest.h>

#include <cmath>

#include "cnls/functional.hpp"
#include "cnls/newton.hpp"
#include "cnls/scalar_ground.hpp"
#include "oracles.hpp"

using namespace cnls;

TEST_SUITE("scalar_ground") {
  TEST_CASE("n = 1 closed form") {
    const ScalarGround sg = solve_scalar_ground(make_grid(1, 24.0, 2000));
    CHECK(sg.closed_form);
    CHECK(sg.peak == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(sg.l4_integral == doctest::Approx(16.0 / 3.0).epsilon(1e-7));
    CHECK(sg.nehari_defect < 1e-8);
  }

  TEST_CASE("shooting oracle reproduces the closed form in n = 1") {
    CHECK(oracle::shooting_peak(1, 1.0, 2.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-8));
  }

  TEST_CASE("n = 2, 3 agree with the shooting oracle and converge at second order") {
    for (int n : {2, 3}) {
      CAPTURE(n);
      const double reference = oracle::shooting_peak(n, 1.0, 6.0);
      double peaks[3];
      for (int k = 0; k < 3; ++k) {
        const ScalarGround sg = solve_scalar_ground(make_grid(n, 24.0, 2000 << k, 4.0));
        peaks[k] = sg.peak;
        CHECK(sg.residual_norm <= 1e-9);
        CHECK(sg.nehari_defect < 1e-6);
      }
      CHECK(std::abs(peaks[2] - reference) < 1e-4);
      const double ratio = (peaks[0] - peaks[1]) / (peaks[1] - peaks[2]);
      CHECK(ratio >= 3.5);
      CHECK(ratio <= 4.5);
    }
  }

  TEST_CASE("ground state is positive and strictly decreasing") {
    for (int n : {1, 2, 3}) {
      const ScalarGround sg = solve_scalar_ground(make_grid(n, 24.0, 1000, 2.0));
      const Eigen::Index M = sg.grid.interior();
      CHECK((sg.U.head(M).array() > 0).all());
      CHECK((sg.U.head(M).array().tail(M - 1) < sg.U.head(M - 1).array()).all());
      if (n > 1) {
        CHECK(sg.basin_amplitude > 0);
        CHECK(sg.residual_norm <= kNewtonTol);
      }
    }
  }

  TEST_CASE("scale_ground examples") {
    const ScalarGround sg = solve_scalar_ground(make_grid(1, 24.0, 4000));
    const Field<double> U42 = scale_ground(sg, 4.0, 2.0);
    CHECK(U42(0) == doctest::Approx(2.0).epsilon(1e-5));
    const Field<double> U41 = scale_ground(sg, 4.0, 1.0);
    CHECK(integral_sq_sq(sg.grid, U41, U41) == doctest::Approx(128.0 / 3.0).epsilon(1e-4));
    const Field<double> U11 = scale_ground(sg, 1.0, 1.0);
    CHECK((U11 - sg.U).cwiseAbs().maxCoeff() < 1e-5);

    const ScalarGround sg3 = solve_scalar_ground(make_grid(3, 24.0, 1000, 2.0));
    CHECK((scale_ground(sg3, 1.0, 1.0) - sg3.U).cwiseAbs().maxCoeff() <= 1e-12);
  }

  TEST_CASE("scale_ground agrees with a direct solve and satisfies Nehari") {
    for (int n : {1, 2, 3}) {
      const ScalarGround sg = solve_scalar_ground(make_grid(n, 24.0, 2000, 2.0));
      const double lambda = 2.5, mu = 0.7;
      const Field<double> Uj = scale_ground(sg, lambda, mu);
      const auto p = scalar_params(n, lambda, mu);
      const State<double> s = Uj;
      CHECK(residual_norm(p, sg.grid, s) <= kNewtonTol);
      const double nrm = norm_sq(sg.grid, Uj, lambda);
      CHECK(std::abs(nrm - mu * integral_sq_sq(sg.grid, Uj, Uj)) / nrm < 1e-6);

      State<double> guess = (std::sqrt(lambda / mu) * 1.8 /
                             (std::sqrt(lambda) * sg.grid.nodes.array()).cosh())
                                .matrix();
      const SolveReport direct = newton_solve(p, sg.grid, guess, kNewtonTol, 100, true);
      REQUIRE(direct.converged());
      CHECK((direct.state.col(0) - Uj).cwiseAbs().maxCoeff() <= 10 * kNewtonTol);
    }
  }

  TEST_CASE("scale_ground preconditions") {
    const ScalarGround sg = solve_scalar_ground(make_grid(1, 24.0, 200));
    CHECK_THROWS_WITH_AS(scale_ground(sg, 100.0, 1.0), doctest::Contains("GridTooCoarse"), Error);
    CHECK_THROWS_AS(scale_ground(sg, -1.0, 1.0), Error);
    CHECK_THROWS_AS(scale_ground(sg, 1.0, 0.0), Error);
  }

  TEST_CASE("sigma_lambda") {
    const ScalarGround sg1 = solve_scalar_ground(make_grid(1, 24.0, 2000));
    CHECK(sigma_lambda(sg1, 1.0) == doctest::Approx(1.51967).epsilon(1e-5));
    CHECK(std::pow(sigma_lambda(sg1, 4.0), 4) == doctest::Approx(128.0 / 3.0).epsilon(1e-6));
    for (int n : {2, 3}) {
      const ScalarGround sg = solve_scalar_ground(make_grid(n, 24.0, 1000, 2.0));
      CHECK(std::pow(sigma_lambda(sg, 1.0), 4) == doctest::Approx(sg.l4_integral).epsilon(1e-14));
    }
    const Field<double> v = sigma_minimizer(sg1, 4.0);
    CHECK(integral_sq_sq(sg1.grid, v, v) == doctest::Approx(1.0).epsilon(1e-4));
  }

  TEST_CASE("nondegeneracy estimate against a dense eigensolve") {
    for (int M : {400, 800}) {
      const ScalarGround sg = solve_scalar_ground(make_grid(1, 24.0, M));
      const auto p = scalar_params(1, 1.0, 1.0);
      const State<double> Uj = scale_ground(sg, 1.0, 1.0);
      const Eigen::VectorXd ev = oracle::hessian_eigenvalues(p, sg.grid, Uj);
      const SpectrumSummary s = linearized_spectrum(sg, 1.0, 1.0);
      CHECK(s.lowest == doctest::Approx(ev.minCoeff()).epsilon(1e-9));
      CHECK(std::abs(s.nearest_zero) == doctest::Approx(oracle::smallest_abs(ev)).epsilon(1e-9));
      // The negative direction sits near -3 (the exact value for sech² wells); zero is not an
      // eigenvalue in the even class.
      CHECK(s.lowest == doctest::Approx(-3.0).epsilon(1e-3));
      CHECK(std::abs(nondegeneracy_estimate(sg, 1.0, 1.0)) > 0.5);
    }
  }

  TEST_CASE("nondegeneracy estimate is stable under refinement and scales with λ") {
    for (int n : {1, 2, 3}) {
      const double coarse = nondegeneracy_estimate(solve_scalar_ground(make_grid(n, 24.0, 1000, 2.0)), 1.0, 1.0);
      const ScalarGround fine = solve_scalar_ground(make_grid(n, 24.0, 2000, 2.0));
      const double f = nondegeneracy_estimate(fine, 1.0, 1.0);
      CHECK(std::abs(f - coarse) < 0.05 * std::abs(f));
      const SpectrumSummary s1 = linearized_spectrum(fine, 1.0, 1.0);
      const SpectrumSummary s4 = linearized_spectrum(fine, 4.0, 1.0);
      CHECK(s4.lowest == doctest::Approx(4.0 * s1.lowest).epsilon(5e-3));
    }
  }

  TEST_CASE("monotone cubic interpolation") {
    Field<double> x(5), y(5);
    x << 0, 1, 2, 3, 4;
    y << 4, 3, 1, 0.5, 0;
    const MonotoneCubic f(x, y);
    for (int i = 0; i < 5; ++i) CHECK(f(x(i)) == y(i));
    double prev = f(0);
    for (double t = 0.01; t < 4; t += 0.01) {
      CHECK(f(t) <= prev + 1e-15);
      prev = f(t);
    }
    CHECK(f(5.0) == 0.0);
  }
}
