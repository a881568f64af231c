#include <doctest.h>

#include <limits>
#include <random>
#include <sstream>

#include "cnls/io.hpp"

using namespace cnls;

TEST_SUITE("io") {
  TEST_CASE("round-trip decimal formatting") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> dist(-1e3, 1e3);
    for (int i = 0; i < 1000; ++i) {
      const double x = dist(rng) * std::pow(10.0, i % 40 - 20);
      CHECK(std::stod(format_double(x)) == x);
    }
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(3.0) == "3");
  }

  TEST_CASE("state CSV round trip") {
    const Grid g = make_grid(2, 5.0, 40, 2.0);
    std::mt19937 rng(1);
    std::normal_distribution<double> normal;
    State<double> u(g.size(), 3);
    for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = normal(rng);
    std::stringstream ss;
    write_state_csv(ss, g, u);
    CHECK(ss.str().rfind("r,u1,u2,u3\n", 0) == 0);
    const StateFile back = read_state_csv(ss);
    CHECK(back.nodes == g.nodes);
    CHECK(back.state == u);
    const Grid g2 = grid_from_nodes(2, back.nodes);
    CHECK(g2.weights == g.weights);
  }

  TEST_CASE("state CSV parse errors") {
    std::stringstream bad_header("x,u1\n0,1\n");
    CHECK_THROWS_WITH_AS(read_state_csv(bad_header), doctest::Contains("ParseError"), Error);
    std::stringstream bad_row("r,u1\n0,1\n1,abc\n");
    CHECK_THROWS_WITH_AS(read_state_csv(bad_row), doctest::Contains("ParseError"), Error);
    std::stringstream short_row("r,u1,u2\n0,1\n");
    CHECK_THROWS_WITH_AS(read_state_csv(short_row), doctest::Contains("ParseError"), Error);
    std::stringstream empty("");
    CHECK_THROWS_AS(read_state_csv(empty), Error);
  }

  TEST_CASE("problem JSON from a full beta matrix") {
    const json j = json::parse(R"({"N": 3, "n": 1, "lambda": [1, 1, 1], "mu": [1, 1, 1],
      "beta": [[0, 3, 0.1], [3, 0, 0.1], [0.1, 0.1, 0]], "m": 1, "eps": 0.1})");
    const Problem pr = problem_from_json(j);
    CHECK(pr.blocks.m == 1);
    CHECK(pr.blocks.pair_beta(0) == 3);
    CHECK(pr.blocks.tilde_beta(0, 0) == doctest::Approx(1.0));
    const Problem again = problem_from_json(problem_to_json(pr));
    CHECK(again.params.beta == pr.params.beta);
    CHECK(again.blocks.tilde_beta == pr.blocks.tilde_beta);
  }

  TEST_CASE("problem JSON from the block description") {
    const json j = json::parse(R"({"N": 3, "n": 2, "lambda": [1, 1, 2], "mu": [1, 1, 0.5],
      "m": 1, "pair_beta": [3], "tilde_beta": [[1, -1]], "eps": 0.02})");
    const Problem pr = problem_from_json(j);
    CHECK(pr.params.beta(0, 1) == 3);
    CHECK(pr.params.beta(0, 2) == doctest::Approx(0.02));
    CHECK(pr.params.beta(1, 2) == doctest::Approx(-0.02));
  }

  TEST_CASE("problem JSON errors") {
    auto parse = [](const char* text) { return problem_from_json(json::parse(text)); };
    CHECK_THROWS_WITH_AS(parse(R"({"n": 1})"), doctest::Contains("ParseError"), Error);
    CHECK_THROWS_WITH_AS(parse(R"({"N": 2, "n": 1, "lambda": [1], "mu": [1, 1]})"),
                         doctest::Contains("ParseError"), Error);
    CHECK_THROWS_WITH_AS(
        parse(R"({"N": 2, "n": 1, "lambda": [1, 1], "mu": [1, 1], "beta": [[0, 1], [2, 0]]})"),
        doctest::Contains("InvalidArgument"), Error);
    CHECK_THROWS_WITH_AS(
        parse(R"({"N": 3, "n": 1, "lambda": [1, 1, 1], "mu": [1, 1, 1],
          "beta": [[0, 3, 0.1], [3, 0, 0.1], [0.1, 0.1, 0]], "m": 1, "eps": 0.1,
          "tilde_beta": [[2, 2]]})"),
        doctest::Contains("ParseError"), Error);
    CHECK_THROWS_WITH_AS(parse(R"({"N": 2, "n": 4, "lambda": [1, 1], "mu": [1, 1]})"),
                         doctest::Contains("InvalidArgument"), Error);
  }
}
