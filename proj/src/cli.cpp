#include "cnls/cli.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "cnls/continuation.hpp"
#include "cnls/diagnostics.hpp"
#include "cnls/functional.hpp"
#include "cnls/io.hpp"
#include "cnls/pair_explicit.hpp"
#include "cnls/scalar_ground.hpp"
#include "cnls/spectrum.hpp"

namespace cnls {
namespace {

namespace fs = std::filesystem;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string config;
  std::string out = ".";
  int resolution = 0;
  bool quiet = false;
  std::string state;
  std::string params;
  double residual_tol = 1e-8;
};

constexpr double kVerifyRelTol = 1e-6;
constexpr double kObstructionTol = 1e-6;

[[noreturn]] void parse_error(const std::string& what) { throw Error(ErrorKind::ParseError, what); }

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) parse_error("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    parse_error(path + ": " + e.what());
  }
}

json load_config(const Options& o, bool required) {
  if (o.config.empty()) {
    if (required) parse_error("--config is required");
    return json{{"schema_version", 1}};
  }
  json cfg = load_json(o.config);
  if (!cfg.is_object()) parse_error("config must be a JSON object");
  if (!cfg.contains("schema_version") || cfg.at("schema_version") != 1)
    parse_error("config schema_version must be 1");
  return cfg;
}

double number(const json& cfg, const char* key, std::optional<double> fallback = std::nullopt) {
  if (!cfg.contains(key)) {
    if (!fallback) parse_error(std::string("missing key \"") + key + "\"");
    return *fallback;
  }
  if (!cfg.at(key).is_number()) parse_error(std::string("\"") + key + "\" must be a number");
  return cfg.at(key).get<double>();
}

int integer(const json& cfg, const char* key, std::optional<int> fallback = std::nullopt) {
  if (!cfg.contains(key)) {
    if (!fallback) parse_error(std::string("missing key \"") + key + "\"");
    return *fallback;
  }
  if (!cfg.at(key).is_number_integer()) parse_error(std::string("\"") + key + "\" must be an integer");
  return cfg.at(key).get<int>();
}

struct GridChoice {
  Grid grid;
  double stretch = 1;
  int M = 0;
};

/// "grid": {"R", "M", "stretch"}; R defaults to default_radius(min(1, λ_min)), M to 2000,
/// stretch to 1 in n = 1 and 4 otherwise. --resolution overrides M.
GridChoice config_grid(const json& cfg, int n, double lambda_min, const Options& o) {
  const json spec = cfg.contains("grid") ? cfg.at("grid") : json::object();
  if (!spec.is_object()) parse_error("\"grid\" must be an object");
  const double R = number(spec, "R", default_radius(std::min(1.0, lambda_min)));
  GridChoice out;
  out.M = o.resolution > 0 ? o.resolution : integer(spec, "M", 2000);
  out.stretch = number(spec, "stretch", n == 1 ? 1.0 : 4.0);
  out.grid = make_grid(n, R, out.M, out.stretch);
  return out;
}

json grid_json(const GridChoice& gc) {
  return {{"n", gc.grid.n}, {"R", gc.grid.R}, {"M", gc.M}, {"stretch", gc.stretch}};
}

fs::path prepare_out(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir + ": " + ec.message());
  return fs::path(dir);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path.string());
  f << text;
  if (!f) throw IoError("cannot write " + path.string());
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

void write_state(const fs::path& path, const Grid& g, const State<double>& u) {
  std::ostringstream ss;
  write_state_csv(ss, g, u);
  write_text(path, ss.str());
}

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json positivity_json(const std::vector<Positivity>& v) {
  json out = json::array();
  for (Positivity p : v) out.push_back(to_string(p));
  return out;
}

json energy_json(const EnergyBreakdown<double>& e, double eps) {
  return {{"total", e.total},       {"phi0", e.phi0},         {"tildeF", e.tildeF},
          {"eps", eps},             {"I", e.I},               {"pair_terms", e.pair_terms},
          {"pair_phi", e.pair_phi}, {"quarter_norm", e.quarter_norm}};
}

// ---------------------------------------------------------------------------------------------

int cmd_ground(const Options& o, std::ostream& out) {
  const json cfg = load_config(o, false);
  const int n = integer(cfg, "n", 1);
  const double lambda = number(cfg, "lambda", 1.0), mu = number(cfg, "mu", 1.0);
  require(lambda > 0 && mu > 0, ErrorKind::InvalidArgument, "lambda and mu must be positive");
  const GridChoice gc = config_grid(cfg, n, lambda, o);
  const ScalarGround sg = solve_scalar_ground(gc.grid);
  const Field<double> Uj = scale_ground(sg, lambda, mu);
  const SpectrumSummary spec = linearized_spectrum(sg, lambda, mu);
  const double nj = norm_sq(gc.grid, Uj, lambda);

  std::vector<double> lambdas{0.25, 0.5, 1.0, 2.0, 4.0};
  if (cfg.contains("sigma_lambdas")) {
    if (!cfg.at("sigma_lambdas").is_array()) parse_error("\"sigma_lambdas\" must be an array");
    lambdas.clear();
    for (const auto& v : cfg.at("sigma_lambdas")) {
      if (!v.is_number()) parse_error("\"sigma_lambdas\" entries must be numbers");
      lambdas.push_back(v.get<double>());
    }
  }
  std::ostringstream sigma_csv;
  sigma_csv << "lambda,sigma\n";
  for (double l : lambdas)
    sigma_csv << format_double(l) << ',' << format_double(sigma_lambda(sg, l)) << '\n';

  const json report = {
      {"grid", grid_json(gc)},
      {"peak", sg.peak},
      {"l4_integral", sg.l4_integral},
      {"residual_norm", sg.residual_norm},
      {"nehari_defect", sg.nehari_defect},
      {"closed_form", sg.closed_form},
      {"basin_amplitude", sg.basin_amplitude},
      {"newton_iters", sg.newton_iters},
      {"sigma_lambda", sigma_lambda(sg, lambda)},
      {"scaled",
       {{"lambda", lambda},
        {"mu", mu},
        {"peak", Uj(0)},
        {"nehari_defect", std::abs(nj - mu * integral_sq_sq(gc.grid, Uj, Uj)) / nj},
        {"spectrum_lowest", spec.lowest},
        {"spectrum_nearest_zero", spec.nearest_zero}}}};

  const fs::path dir = prepare_out(o.out);
  write_state(dir / "profile.csv", gc.grid, State<double>(sg.U));
  write_state(dir / "scaled.csv", gc.grid, State<double>(Uj));
  write_text(dir / "sigma.csv", sigma_csv.str());
  write_json(dir / "report.json", report);
  if (!o.quiet)
    out << "ground n=" << n << " peak=" << format_double(sg.peak)
        << " l4=" << format_double(sg.l4_integral)
        << " nehari_defect=" << format_double(sg.nehari_defect) << '\n';
  return kExitOk;
}

int cmd_pair(const Options& o, std::ostream& out) {
  const json cfg = load_config(o, true);
  const int n = integer(cfg, "n", 1);
  const double lambda = number(cfg, "lambda", 1.0);
  const double mu1 = number(cfg, "mu1"), mu2 = number(cfg, "mu2"), beta = number(cfg, "beta");
  require(lambda > 0, ErrorKind::InvalidArgument, "lambda must be positive");
  coupling_coeffs(mu1, mu2, beta);
  const GridChoice gc = config_grid(cfg, n, lambda, o);
  const ScalarGround sg = solve_scalar_ground(gc.grid);
  const PairSolution ps = pair_solution(sg, lambda, mu1, mu2, beta);
  const json report = {
      {"grid", grid_json(gc)},
      {"lambda", lambda},
      {"mu1", mu1},
      {"mu2", mu2},
      {"beta", beta},
      {"a1", ps.a1},
      {"a2", ps.a2},
      {"rho", ps.rho},
      {"residual_norm", ps.residual_norm},
      {"energy", ps.energy},
      {"norm", ps.norm},
      {"synchronization_defects",
       {ps.a1 * ps.a1 + beta / mu2 * ps.a2 * ps.a2 - 1.0,
        beta / mu1 * ps.a1 * ps.a1 + ps.a2 * ps.a2 - 1.0}},
      {"nondegeneracy", nondegeneracy_at(ps.params(), gc.grid, ps.state())}};
  const fs::path dir = prepare_out(o.out);
  write_state(dir / "state.csv", gc.grid, ps.state());
  write_json(dir / "report.json", report);
  if (!o.quiet)
    out << "pair a1=" << format_double(ps.a1) << " a2=" << format_double(ps.a2)
        << " rho=" << format_double(ps.rho) << " energy=" << format_double(ps.energy) << '\n';
  return kExitOk;
}

int cmd_continue(const Options& o, std::ostream& out) {
  const json cfg = load_config(o, true);
  if (!cfg.contains("problem")) parse_error("missing key \"problem\"");
  const Problem pr = problem_from_json(cfg.at("problem"));
  const double eps_target = number(cfg, "eps_target");
  const int steps = integer(cfg, "steps", 10);
  ContinuationOptions opts;
  if (cfg.contains("tolerances")) {
    const json& t = cfg.at("tolerances");
    if (!t.is_object()) parse_error("\"tolerances\" must be an object");
    opts.tol = number(t, "newton_tol", opts.tol);
    opts.max_iter = integer(t, "max_iter", opts.max_iter);
    opts.max_halvings = integer(t, "max_halvings", opts.max_halvings);
  }
  const bool nondegeneracy = cfg.value("nondegeneracy", true);

  const GridChoice gc = config_grid(cfg, pr.params.n, pr.params.lambda.minCoeff(), o);
  const Grid& g = gc.grid;
  const ScalarGround sg = solve_scalar_ground(g);
  const ContinuationPath path = continue_in_eps(pr.params, pr.blocks, sg, eps_target, steps, opts);

  const int N = pr.params.size();
  std::ostringstream csv;
  csv << "eps,residual,energy";
  for (int j = 0; j < N; ++j) csv << ",min_u" << j + 1;
  csv << ",dist_to_z\n";
  json rows = json::array();
  for (std::size_t i = 0; i < path.reports.size(); ++i) {
    const SolveReport& rep = path.reports[i];
    const auto pos = classify_positivity(g, rep.state);
    csv << format_double(path.eps_values[i]) << ',' << format_double(rep.residual_norm) << ','
        << format_double(rep.energy);
    for (double m : pos.min_values) csv << ',' << format_double(m);
    csv << ',' << format_double(path.distance_to_z[i]) << '\n';
    rows.push_back({{"eps", path.eps_values[i]},
                    {"residual_norm", rep.residual_norm},
                    {"energy", rep.energy},
                    {"newton_iters", rep.newton_iters},
                    {"positivity", to_string(rep.positivity)},
                    {"components", positivity_json(rep.component_positivity)},
                    {"min_values", pos.min_values},
                    {"dist_to_z", path.distance_to_z[i]},
                    {"flags", rep.flags}});
  }

  const double eps_final = path.eps_values.back();
  const BlockStructure<double> b_final = at_eps(pr.blocks, eps_final);
  const SystemParams<double> p_final = with_blocks(pr.params, b_final);
  const State<double>& final_state = path.reports.back().state;
  json report = {{"grid", grid_json(gc)},
                 {"eps_target", eps_target},
                 {"steps", steps},
                 {"reached_target", path.reached_target},
                 {"stop_reason", path.stop_reason},
                 {"eps0_estimate", path.eps0_estimate ? json(*path.eps0_estimate) : json(nullptr)},
                 {"path", rows},
                 {"final_energy", energy_json(energy(p_final, b_final, g, final_state), eps_final)}};
  if (nondegeneracy) {
    const SystemParams<double> p0 = with_blocks(pr.params, at_eps(pr.blocks, 0.0));
    report["nondegeneracy_at_z"] = nondegeneracy_at(p0, g, path.z);
    report["nondegeneracy_at_final"] = nondegeneracy_at(p_final, g, final_state);
  }

  const fs::path dir = prepare_out(o.out);
  write_text(dir / "path.csv", csv.str());
  write_state(dir / "z.csv", g, path.z);
  write_state(dir / "final.csv", g, final_state);
  write_json(dir / "params.json", problem_to_json({p_final, b_final}));
  write_json(dir / "report.json", report);
  if (!o.quiet) {
    out << "continue eps=" << format_double(eps_final) << " steps=" << path.reports.size() - 1
        << " positivity=" << to_string(path.reports.back().positivity);
    if (path.eps0_estimate) out << " eps0_estimate=" << format_double(*path.eps0_estimate);
    out << " (" << path.stop_reason << ")\n";
  }
  return kExitOk;
}

struct Loaded {
  Problem problem;
  Grid grid;
  State<double> state;
};

Loaded load_state_and_params(const Options& o) {
  if (o.state.empty() || o.params.empty()) parse_error("--state and --params are required");
  Loaded l;
  l.problem = problem_from_json(load_json(o.params));
  std::ifstream in(o.state);
  if (!in) parse_error("cannot open " + o.state);
  StateFile sf = read_state_csv(in);
  l.grid = grid_from_nodes(l.problem.params.n, sf.nodes);
  l.state = std::move(sf.state);
  check_shapes(l.problem.params, l.grid, l.state);
  return l;
}

int cmd_verify(const Options& o, std::ostream& out) {
  const Loaded l = load_state_and_params(o);
  const SystemParams<double>& p = l.problem.params;
  const Grid& g = l.grid;
  const State<double>& u = l.state;

  json checks = json::object();
  bool pass = true;
  auto check = [&](const char* name, double value, double threshold) {
    const bool ok = std::isfinite(value) && value <= threshold;
    checks[name] = {{"value", number_or_null(value)}, {"threshold", threshold}, {"pass", ok}};
    pass = pass && ok;
  };

  const double residual = residual_norm(p, g, u);
  check("residual_norm", residual, o.residual_tol);
  const double norm2 = norms(p, g, u).total_sq;
  const bool zero_state = !(norm2 > 0);
  const double nehari = zero_state ? std::numeric_limits<double>::infinity()
                                   : std::abs(nehari_residual(p, g, u)) / norm2;
  check("nehari_residual", nehari, kVerifyRelTol);
  const double identity =
      zero_state ? std::numeric_limits<double>::infinity()
                 : std::abs(energy_value(p, g, u) - norm2 / 4) / norm2;
  check("energy_identity_defect", identity, kVerifyRelTol);

  json obstruction = json::array();
  double worst = 0;
  for (const auto& v : obstruction_identities(p, g, u, std::numeric_limits<double>::infinity())) {
    obstruction.push_back({{"j", v.j + 1}, {"k", v.k + 1}, {"value", v.value}});
    worst = std::max(worst, std::abs(v.value));
  }
  check("obstruction_max", worst, kObstructionTol);

  const PositivityReport pos = classify_positivity(g, u);
  const bool nontrivial = pos.overall != Positivity::ZeroComponent;
  checks["nontrivial"] = {{"pass", nontrivial}};
  pass = pass && nontrivial;

  const Admissibility adm = positivity_admissibility(p, l.problem.blocks.m);
  std::vector<std::string> flags = adm.flags;
  const bool contradiction = adm.positive_excluded && pos.overall == Positivity::Positive;
  if (contradiction) flags.emplace_back("positive_despite_obstruction");
  checks["admissible_positivity"] = {{"pass", !contradiction}};
  pass = pass && !contradiction;

  const json verdict = {{"pass", pass},
                        {"checks", checks},
                        {"positivity", to_string(pos.overall)},
                        {"components", positivity_json(pos.components)},
                        {"obstruction", obstruction},
                        {"flags", flags}};
  if (!o.config.empty() || o.out != ".") write_json(prepare_out(o.out) / "verdict.json", verdict);
  if (!o.quiet) out << verdict.dump(2) << '\n';
  return pass ? kExitOk : kExitCheck;
}

int cmd_energy_report(const Options& o, std::ostream& out) {
  const Loaded l = load_state_and_params(o);
  const json report =
      energy_json(energy(l.problem.params, l.problem.blocks, l.grid, l.state), l.problem.blocks.eps);
  if (o.out != ".") write_json(prepare_out(o.out) / "energy.json", report);
  if (!o.quiet) out << report.dump(2) << '\n';
  return kExitOk;
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::PairLambdaMismatch:
    case ErrorKind::NonzeroForbiddenCoupling:
    case ErrorKind::ZeroEps:
    case ErrorKind::GridMismatch:
    case ErrorKind::ParseError: return kExitUsage;
    default: return kExitSolver;
  }
}

using Command = int (*)(const Options&, std::ostream&);

Command lookup(const std::string& name) {
  if (name == "ground") return cmd_ground;
  if (name == "pair") return cmd_pair;
  if (name == "continue") return cmd_continue;
  return nullptr;
}

int guarded(const std::function<int()>& body, std::ostream& err) {
  try {
    return body();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const json::exception& e) {
    err << "error: ParseError: " << e.what() << '\n';
    return kExitUsage;
  }
}

/// "triples" (or the product of "mu1", "mu2", "beta" lists) → sweep.csv; "runs" → one
/// subdirectory per entry {"name", "command", "config"}, run in order.
int cmd_sweep(const Options& o, std::ostream& out, std::ostream& err) {
  const json cfg = load_config(o, true);
  const int n = integer(cfg, "n", 1);
  const double lambda = number(cfg, "lambda", 1.0);
  const fs::path dir = prepare_out(o.out);

  std::vector<std::array<double, 3>> triples;
  if (cfg.contains("triples")) {
    for (const auto& t : cfg.at("triples")) {
      if (!t.is_array() || t.size() != 3) parse_error("each triple is [mu1, mu2, beta]");
      triples.push_back({t[0].get<double>(), t[1].get<double>(), t[2].get<double>()});
    }
  }
  if (cfg.contains("mu1") || cfg.contains("mu2") || cfg.contains("beta")) {
    const auto list = [&](const char* key) {
      if (!cfg.contains(key) || !cfg.at(key).is_array())
        parse_error(std::string("\"") + key + "\" must be an array");
      return cfg.at(key).get<std::vector<double>>();
    };
    for (double m1 : list("mu1"))
      for (double m2 : list("mu2"))
        for (double b : list("beta")) triples.push_back({m1, m2, b});
  }

  int worst = kExitOk;
  if (!triples.empty()) {
    const GridChoice gc = config_grid(cfg, n, lambda, o);
    const ScalarGround sg = solve_scalar_ground(gc.grid);
    std::ostringstream csv;
    csv << "mu1,mu2,beta,a1,a2,rho,energy\n";
    for (const auto& [m1, m2, b] : triples) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      double a1 = nan, a2 = nan, energy = nan;
      if (b > std::max(m1, m2)) {
        const PairSolution ps = pair_solution(sg, lambda, m1, m2, b);
        a1 = ps.a1;
        a2 = ps.a2;
        energy = ps.energy;
      }
      csv << format_double(m1) << ',' << format_double(m2) << ',' << format_double(b) << ','
          << format_double(a1) << ',' << format_double(a2) << ','
          << format_double(pair_rho(m1, m2, b)) << ',' << format_double(energy) << '\n';
    }
    write_text(dir / "sweep.csv", csv.str());
    if (!o.quiet) out << "sweep " << triples.size() << " triples\n";
  }

  if (cfg.contains("runs")) {
    json summary = json::array();
    for (const auto& run : cfg.at("runs")) {
      const std::string name = run.at("name").get<std::string>();
      const std::string command = run.at("command").get<std::string>();
      if (name.empty() || name.find('/') != std::string::npos || name == "." || name == "..")
        parse_error("run names must be plain directory names");
      const Command cmd = lookup(command);
      if (!cmd) parse_error("unknown run command \"" + command + "\"");
      json sub = run.at("config");
      if (!sub.contains("schema_version")) sub["schema_version"] = 1;
      const fs::path run_dir = prepare_out((dir / name).string());
      write_json(run_dir / "config.json", sub);
      Options ro = o;
      ro.config = (run_dir / "config.json").string();
      ro.out = run_dir.string();
      std::ostringstream run_err;
      const int code = guarded([&] { return cmd(ro, out); }, run_err);
      err << run_err.str();
      summary.push_back({{"name", name}, {"command", command}, {"exit_code", code},
                         {"error", run_err.str()}});
      worst = std::max(worst, code);
    }
    write_json(dir / "runs.json", summary);
  }
  return worst;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Radial bound states of coupled cubic Schrodinger systems", "cnls"};
  app.require_subcommand(1);
  Options o;
  auto common = [&](CLI::App* sc) {
    sc->add_option("--config", o.config, "JSON config (schema_version 1)");
    sc->add_option("--out", o.out, "Output directory (default: current directory)");
    sc->add_option("--resolution", o.resolution, "Override the grid node count M");
    sc->add_flag("--quiet", o.quiet, "Suppress the summary on stdout");
  };
  auto inputs = [&](CLI::App* sc) {
    sc->add_option("--state", o.state, "State CSV (r,u1,...,uN)");
    sc->add_option("--params", o.params, "Problem JSON");
  };
  CLI::App* ground = app.add_subcommand("ground", "Scalar ground state U, its rescaling and sigma");
  CLI::App* pair = app.add_subcommand("pair", "Explicit synchronized pair solution");
  CLI::App* sweep = app.add_subcommand("sweep", "Pair parameter sweep and batched runs");
  CLI::App* cont = app.add_subcommand("continue", "Continuation in eps from the unperturbed state");
  CLI::App* verify = app.add_subcommand("verify", "Check a state against a problem");
  CLI::App* ereport = app.add_subcommand("energy-report", "Energy breakdown of a state");
  for (CLI::App* sc : {ground, pair, sweep, cont, verify, ereport}) common(sc);
  inputs(verify);
  inputs(ereport);
  verify->add_option("--residual-tol", o.residual_tol, "Residual threshold (default 1e-8)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (ground->parsed()) return guarded([&] { return cmd_ground(o, out); }, err);
  if (pair->parsed()) return guarded([&] { return cmd_pair(o, out); }, err);
  if (sweep->parsed()) return guarded([&] { return cmd_sweep(o, out, err); }, err);
  if (cont->parsed()) return guarded([&] { return cmd_continue(o, out); }, err);
  if (verify->parsed()) return guarded([&] { return cmd_verify(o, out); }, err);
  return guarded([&] { return cmd_energy_report(o, out); }, err);
}

}  // namespace cnls
