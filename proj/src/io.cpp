#include "cnls/io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace cnls {

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

[[noreturn]] void parse_error(const std::string& what) { throw Error(ErrorKind::ParseError, what); }

const json& field(const json& j, const char* key) {
  if (!j.contains(key)) parse_error(std::string("missing key \"") + key + "\"");
  return j.at(key);
}

double number(const json& v, const std::string& what) {
  if (!v.is_number()) parse_error(what + " must be a number");
  return v.get<double>();
}

Field<double> vector_from(const json& v, const std::string& what) {
  if (!v.is_array()) parse_error(what + " must be an array");
  Field<double> out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(i) = number(v[i], what);
  return out;
}

Matrix<double> matrix_from(const json& v, Eigen::Index rows, Eigen::Index cols,
                           const std::string& what) {
  if (!v.is_array() || static_cast<Eigen::Index>(v.size()) != rows)
    parse_error(what + " must have " + std::to_string(rows) + " rows");
  Matrix<double> out(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = v[r];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      parse_error(what + " must have " + std::to_string(cols) + " columns");
    for (Eigen::Index c = 0; c < cols; ++c) out(r, c) = number(row[c], what);
  }
  return out;
}

json matrix_to(const Matrix<double>& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(row);
  }
  return out;
}

json vector_to(const Field<double>& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

bool close(const Matrix<double>& a, const Matrix<double>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (std::abs(a(i) - b(i)) > 1e-12 * std::max(1.0, std::abs(b(i)))) return false;
  return true;
}

}  // namespace

json to_json(const SystemParams<double>& p) {
  return {{"N", p.size()},
          {"n", p.n},
          {"lambda", vector_to(p.lambda)},
          {"mu", vector_to(p.mu)},
          {"beta", matrix_to(p.beta)}};
}

json to_json(const BlockStructure<double>& b) {
  return {{"m", b.m},
          {"eps", b.eps},
          {"pair_beta", vector_to(b.pair_beta)},
          {"tilde_beta", matrix_to(b.tilde_beta)},
          {"tilde_beta_singles", matrix_to(b.tilde_beta_singles)}};
}

json problem_to_json(const Problem& problem) {
  json j = to_json(problem.params);
  j.update(to_json(problem.blocks));
  return j;
}

Problem problem_from_json(const json& j) {
  if (!j.is_object()) parse_error("problem must be a JSON object");
  const json& jN = field(j, "N");
  if (!jN.is_number_integer()) parse_error("N must be an integer");
  const int N = jN.get<int>();
  if (N < 1) parse_error("N must be at least 1");
  const json& jn = field(j, "n");
  if (!jn.is_number_integer()) parse_error("n must be an integer");

  Problem out;
  SystemParams<double>& p = out.params;
  p.n = jn.get<int>();
  p.lambda = vector_from(field(j, "lambda"), "lambda");
  p.mu = vector_from(field(j, "mu"), "mu");
  if (p.lambda.size() != N || p.mu.size() != N) parse_error("lambda and mu must have N entries");

  int m = 0;
  if (j.contains("m")) {
    if (!j.at("m").is_number_integer()) parse_error("m must be an integer");
    m = j.at("m").get<int>();
  }
  if (m < 0 || 2 * m > N) parse_error("m must satisfy 0 <= 2m <= N");
  const double eps = j.contains("eps") ? number(j.at("eps"), "eps") : 0.0;
  const int L = N - 2 * m;

  if (j.contains("beta")) {
    p.beta = matrix_from(j.at("beta"), N, N, "beta");
    p.validate();
    out.blocks = split_blocks(p, m, eps);
    if (j.contains("pair_beta") &&
        !close(vector_from(j.at("pair_beta"), "pair_beta"), out.blocks.pair_beta))
      parse_error("pair_beta disagrees with beta");
    // At eps = 0 the cross couplings vanish and any rescaled couplings are consistent.
    const bool free_tilde = eps == 0.0;
    if (j.contains("tilde_beta")) {
      const Matrix<double> t = matrix_from(j.at("tilde_beta"), L, 2 * m, "tilde_beta");
      if (free_tilde) out.blocks.tilde_beta = t;
      else if (!close(t, out.blocks.tilde_beta)) parse_error("tilde_beta disagrees with beta / eps");
    }
    if (j.contains("tilde_beta_singles")) {
      const Matrix<double> t = matrix_from(j.at("tilde_beta_singles"), L, L, "tilde_beta_singles");
      if (free_tilde) out.blocks.tilde_beta_singles = t;
      else if (!close(t, out.blocks.tilde_beta_singles))
        parse_error("tilde_beta_singles disagrees with beta / eps");
    }
    return out;
  }

  const Field<double> pair_beta =
      m > 0 ? vector_from(field(j, "pair_beta"), "pair_beta") : Field<double>(0);
  if (pair_beta.size() != m) parse_error("pair_beta must have m entries");
  const Matrix<double> tilde = j.contains("tilde_beta")
                                   ? matrix_from(j.at("tilde_beta"), L, 2 * m, "tilde_beta")
                                   : Matrix<double>::Zero(L, 2 * m);
  const Matrix<double> singles =
      j.contains("tilde_beta_singles")
          ? matrix_from(j.at("tilde_beta_singles"), L, L, "tilde_beta_singles")
          : Matrix<double>::Zero(L, L);
  out.blocks = make_blocks(N, pair_beta, tilde, singles, eps);
  p.beta = assemble_beta(out.blocks);
  p.validate();
  check_consistent(p, out.blocks);
  return out;
}

void write_state_csv(std::ostream& os, const Grid& g, const State<double>& u) {
  require(u.rows() == g.size(), ErrorKind::GridMismatch, "state is not sampled on this grid");
  os << "r";
  for (Eigen::Index j = 0; j < u.cols(); ++j) os << ",u" << j + 1;
  os << '\n';
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    os << format_double(g.nodes(i));
    for (Eigen::Index j = 0; j < u.cols(); ++j) os << ',' << format_double(u(i, j));
    os << '\n';
  }
}

StateFile read_state_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) parse_error("empty state file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  if (header.size() < 2 || header[0] != "r") parse_error("state header must be r,u1,...,uN");
  for (std::size_t j = 1; j < header.size(); ++j)
    if (header[j] != "u" + std::to_string(j)) parse_error("state header must be r,u1,...,uN");
  const std::size_t cols = header.size();

  std::vector<double> values;
  std::size_t rows = 0;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t count = 0;
    const char* pos = line.data();
    const char* end = line.data() + line.size();
    while (true) {
      double v;
      const auto res = std::from_chars(pos, end, v);
      if (res.ec != std::errc()) parse_error("bad number in state row " + std::to_string(rows + 1));
      values.push_back(v);
      ++count;
      pos = res.ptr;
      if (pos == end) break;
      if (*pos != ',') parse_error("bad separator in state row " + std::to_string(rows + 1));
      ++pos;
    }
    if (count != cols) parse_error("state row " + std::to_string(rows + 1) + " has wrong width");
    ++rows;
  }
  StateFile out;
  out.nodes.resize(static_cast<Eigen::Index>(rows));
  out.state.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols - 1));
  for (std::size_t i = 0; i < rows; ++i) {
    out.nodes(i) = values[i * cols];
    for (std::size_t j = 1; j < cols; ++j) out.state(i, j - 1) = values[i * cols + j];
  }
  return out;
}

}  // namespace cnls
