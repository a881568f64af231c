#pragma once

// JSON and CSV formats for parameters, block structures and sampled states.
//
// Problem JSON keys: "N", "n", "lambda", "mu", "beta", "m", "eps", "tilde_beta", plus the
// optional "pair_beta" and "tilde_beta_singles". State CSV: header "r,u1,...,uN", one row per
// node, shortest round-trip decimal formatting.

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "cnls/model.hpp"

namespace cnls {

using json = nlohmann::json;

/// Shortest decimal string that parses back to exactly `x`.
std::string format_double(double x);

json to_json(const SystemParams<double>& p);
json to_json(const BlockStructure<double>& b);

struct Problem {
  SystemParams<double> params;
  BlockStructure<double> blocks;
};

/// Accepts either a full "beta" matrix (split with "m" and "eps") or "pair_beta" +
/// "tilde_beta" (+ "tilde_beta_singles") + "eps". Throws ParseError on schema violations.
Problem problem_from_json(const json& j);
json problem_to_json(const Problem& problem);

void write_state_csv(std::ostream& os, const Grid& g, const State<double>& u);

struct StateFile {
  Field<double> nodes;
  State<double> state;
};
StateFile read_state_csv(std::istream& is);

}  // namespace cnls
