#include "dynkin/cli.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

#include "dynkin/generator.hpp"
#include "dynkin/model_io.hpp"

namespace dynkin::cli {

using nlohmann::json;

namespace {

struct RunConfig {
  std::string input;
  std::string output;
  double tol = 1e-12;
  int max_iter = 0;  // 0: 10·T + 10
  double lambda = 0.0;
  std::uint64_t seed = 1;
  int horizon = 2;
  int branching = 2;
  int min_branching = 0;
  double lo = -5.0;
  double hi = 5.0;
  bool force_sandwich = true;
  bool inject_violation = false;
  std::uint64_t max_strategies = 0;
  std::uint64_t cap = oracle::kDefaultCap;
  bool human = false;
};

struct Prepared {
  GameModel model;
  std::optional<Family> offset;  // set when terminal values had to be normalized
  GameSpec game;
};

Prepared prepare(const std::string& path) {
  GameModel model = load_model(path);
  if (has_zero_terminal(model.xi, model.zeta)) {
    GameSpec game(model.tree, model.xi, model.zeta);
    return Prepared{std::move(model), std::nullopt, std::move(game)};
  }
  NormalizedTerminal norm = normalize_terminal(model.xi, model.zeta);
  GameSpec game(model.tree, norm.xi, norm.zeta);
  return Prepared{std::move(model), std::move(norm.offset), std::move(game)};
}

double root_offset(const Prepared& p) {
  return p.offset ? (*p.offset)[p.model.tree->root()] : 0.0;
}

void emit(const RunConfig& cfg, const std::string& text, std::ostream& out) {
  if (cfg.output.empty()) {
    out << text;
    return;
  }
  std::ofstream file(cfg.output, std::ios::binary);
  if (!file) throw ModelFormat("cannot write " + cfg.output);
  file << text;
}

std::string ids(const EventTree& t, std::span<const NodeId> nodes) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (i) os << ", ";
    os << t.external_id(nodes[i]);
  }
  os << ']';
  return os.str();
}

IterateOptions iterate_options(const RunConfig& cfg) {
  IterateOptions opts;
  opts.tol = cfg.tol;
  opts.max_iter = cfg.max_iter;
  return opts;
}

std::string human_solution(const DynkinSolution& sol, const json& report) {
  const EventTree& t = sol.tree();
  std::ostringstream os;
  os << std::setprecision(10);
  os << "mokobodski: " << report["mokobodski"].get<std::string>();
  if (!sol.mokobodski.holds) os << " at " << ids(t, sol.mokobodski.fails_at);
  os << "\nconverged: " << (sol.converged ? "yes" : "no")
     << " after " << sol.iterations << " iterations\n";
  if (sol.solved()) {
    os << "value: " << report["value"].get<double>() << '\n'
       << "tau_star: " << ids(t, sol.tau_star->region()) << '\n'
       << "sigma_star: " << ids(t, sol.sigma_star->region()) << '\n';
  }
  os << std::left << std::setw(6) << "node" << std::setw(6) << "time" << std::right
     << std::setw(14) << "xi" << std::setw(14) << "zeta" << std::setw(14) << "J"
     << std::setw(14) << "Jp" << std::setw(14) << "Y" << '\n';
  for (NodeId n = 0; n < t.size(); ++n) {
    os << std::left << std::setw(6) << t.external_id(n) << std::setw(6) << t.time(n)
       << std::right << std::setw(14) << sol.xi[n] << std::setw(14) << sol.zeta[n]
       << std::setw(14) << sol.j[n] << std::setw(14) << sol.jp[n];
    if (sol.y) os << std::setw(14) << (*sol.y)[n];
    os << '\n';
  }
  return os.str();
}

int cmd_validate(const RunConfig& cfg, std::ostream& out) {
  GameModel model = load_model(cfg.input);
  const EventTree& t = *model.tree;

  std::string normalization = "not required";
  if (!has_zero_terminal(model.xi, model.zeta)) {
    normalize_terminal(model.xi, model.zeta);  // throws TerminalMismatch
    normalization = "required";
  }
  std::vector<NodeId> violations;
  for (NodeId n = 0; n < t.size(); ++n) {
    if (model.xi[n] > model.zeta[n] + cfg.tol) violations.push_back(n);
  }

  std::ostringstream summary;
  summary << t.size() << " nodes, T=" << t.horizon() << ", sandwich: ";
  if (violations.empty()) {
    summary << "ok";
  } else {
    summary << "violated at " << ids(t, violations);
  }

  if (cfg.human) {
    std::string text = summary.str() + "\n";
    if (normalization == "required") {
      text += "note: normalization required (terminal values are nonzero)\n";
    }
    emit(cfg, text, out);
    return kOk;
  }
  json fails = json::array();
  for (NodeId n : violations) fails.push_back(t.external_id(n));
  json report{{"valid", true},
              {"nodes", t.size()},
              {"horizon", t.horizon()},
              {"normalization", normalization},
              {"sandwich", violations.empty() ? "ok" : "violated"},
              {"sandwich_violations", std::move(fails)},
              {"summary", summary.str()}};
  emit(cfg, report.dump(2) + "\n", out);
  return kOk;
}

int cmd_solve(const RunConfig& cfg, std::ostream& out) {
  Prepared p = prepare(cfg.input);
  const Family* offset = p.offset ? &*p.offset : nullptr;
  int code = kOk;
  std::optional<DynkinSolution> sol;
  try {
    sol = iterate(p.game, iterate_options(cfg));
  } catch (const Diverged& e) {
    sol = e.partial();
    code = kDiverged;
  }
  if (code == kOk && !sol->mokobodski.holds) code = kMokobodskiFails;

  const json report = solution_report(*sol, offset);
  emit(cfg, cfg.human ? human_solution(*sol, report) : report.dump(2) + "\n", out);
  return code;
}

int cmd_oracle(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  Prepared p = prepare(cfg.input);
  const EventTree& t = *p.model.tree;
  const NodeId root = t.root();
  const double shift = root_offset(p);

  const oracle::OracleReport report = oracle::brute_force_values(p.game, root, cfg.cap);

  json doc = oracle_report_json(report);
  doc["lower"] = report.lower + shift;
  doc["upper"] = report.upper + shift;
  for (auto& row : doc["table"]) {
    for (auto& cell : row) cell = cell.get<double>() + shift;
  }
  const bool fair = std::abs(report.upper - report.lower) <= kFamilyTol;
  doc["fair"] = fair;

  int code = kOk;
  std::optional<DynkinSolution> sol;
  try {
    sol = iterate(p.game, iterate_options(cfg));
  } catch (const Diverged& e) {
    err << e.what() << '\n';
    code = kDiverged;
  }

  bool agreement = false;
  doc["solver"] = nullptr;
  doc["backward_induction"] = nullptr;
  doc["saddle_verified"] = nullptr;
  doc["mokobodski"] = sol ? (sol->mokobodski.holds ? "holds" : "fails") : "holds";
  if (sol && sol->solved()) {
    const double y = value(*sol, root);
    const double bi = oracle::backward_induction_value(p.game)[root];
    doc["solver"] = y + shift;
    doc["backward_induction"] = bi + shift;
    agreement = std::abs(y - report.lower) <= kFamilyTol &&
                std::abs(y - report.upper) <= kFamilyTol &&
                std::abs(y - bi) <= kFamilyTol;
    doc["saddle_verified"] =
        oracle::verify_saddle(p.game, root, *sol->tau_star, *sol->sigma_star, cfg.cap);
    doc["tau_star"] = region_to_json(*sol->tau_star);
    doc["sigma_star"] = region_to_json(*sol->sigma_star);
  } else if (sol) {
    code = kMokobodskiFails;
  }
  doc["agreement"] = agreement;

  doc["shortcut"] = nullptr;
  if (auto sc = supermartingale_shortcut(p.game, root)) {
    doc["shortcut"] = {
        {"tau", region_to_json(sc->tau)},
        {"sigma", region_to_json(sc->sigma)},
        {"value", sc->value + shift},
        {"verified", oracle::verify_saddle(p.game, root, sc->tau, sc->sigma, cfg.cap)}};
  }
  doc["verdict"] = std::string("FAIR: ") + (fair ? "yes" : "no");

  if (code == kOk && !agreement) code = kCheckFailed;

  if (cfg.human) {
    std::ostringstream os;
    os << std::setprecision(12);
    os << "strategies: " << report.strategy_count << '\n'
       << "lower: " << report.lower + shift << '\n'
       << "upper: " << report.upper + shift << '\n';
    if (doc["solver"].is_null()) {
      os << "solver: n/a (mokobodski " << doc["mokobodski"].get<std::string>() << ")\n";
    } else {
      os << "solver: " << doc["solver"].get<double>() << '\n'
         << "backward induction: " << doc["backward_induction"].get<double>() << '\n'
         << "saddle (tau*, sigma*): "
         << (doc["saddle_verified"].get<bool>() ? "verified" : "NOT a saddle") << '\n';
    }
    if (!doc["shortcut"].is_null()) {
      os << "supermartingale shortcut (theta, T): value "
         << doc["shortcut"]["value"].get<double>() << ", "
         << (doc["shortcut"]["verified"].get<bool>() ? "verified" : "NOT a saddle") << '\n';
    }
    os << doc["verdict"].get<std::string>() << '\n';
    os << "agreement: " << (agreement ? "yes" : "no") << '\n';
    emit(cfg, os.str(), out);
  } else {
    emit(cfg, doc.dump(2) + "\n", out);
  }
  return code;
}

int cmd_epsilon(const RunConfig& cfg, std::ostream& out) {
  if (!(cfg.lambda > 0.0 && cfg.lambda < 1.0)) {
    std::ostringstream os;
    os << "lambda must lie in (0, 1), got " << cfg.lambda;
    throw BadLambda(os.str());
  }
  Prepared p = prepare(cfg.input);
  const EventTree& t = *p.model.tree;
  const NodeId root = t.root();
  DynkinSolution sol = iterate(p.game, iterate_options(cfg));
  if (!sol.mokobodski.holds) {
    const json report = solution_report(sol, p.offset ? &*p.offset : nullptr);
    emit(cfg, report.dump(2) + "\n", out);
    return kMokobodskiFails;
  }

  const EpsilonSaddle eps = epsilon_saddle(sol, cfg.lambda, root);
  const double y = value(sol, root);
  std::string bounds = "unchecked";
  if (oracle::count_stopping_times(t, root) <= cfg.cap) {
    bounds = oracle::verify_epsilon_bounds(p.game, root, eps, y, cfg.cap) ? "hold"
                                                                           : "violated";
  }

  json doc{{"lambda", eps.lambda},
           {"tau_lambda", region_to_json(eps.tau_lambda)},
           {"sigma_lambda", region_to_json(eps.sigma_lambda)},
           {"lower_slack", eps.lower_slack},
           {"upper_slack", eps.upper_slack},
           {"value", y + root_offset(p)},
           {"tau_star", region_to_json(*sol.tau_star)},
           {"sigma_star", region_to_json(*sol.sigma_star)},
           {"bounds", bounds}};
  if (cfg.human) {
    std::ostringstream os;
    os << std::setprecision(12) << "lambda: " << eps.lambda << '\n'
       << "tau_lambda: " << ids(t, eps.tau_lambda.region()) << '\n'
       << "sigma_lambda: " << ids(t, eps.sigma_lambda.region()) << '\n'
       << "lower_slack: " << eps.lower_slack << '\n'
       << "upper_slack: " << eps.upper_slack << '\n'
       << "value: " << y + root_offset(p) << '\n'
       << "bounds: " << bounds << '\n';
    emit(cfg, os.str(), out);
  } else {
    emit(cfg, doc.dump(2) + "\n", out);
  }
  return bounds == "violated" ? kCheckFailed : kOk;
}

int cmd_gen(const RunConfig& cfg, std::ostream& out) {
  GenShape shape;
  shape.horizon = cfg.horizon;
  shape.max_branching = cfg.branching;
  shape.min_branching = cfg.min_branching;
  shape.lo = cfg.lo;
  shape.hi = cfg.hi;
  shape.force_sandwich = cfg.force_sandwich;
  shape.inject_violation = cfg.inject_violation;
  shape.max_strategies = cfg.max_strategies;
  GameModel model;
  try {
    model = generate(cfg.seed, shape);
  } catch (const std::invalid_argument& e) {
    throw ModelFormat(std::string("bad shape: ") + e.what());
  }
  emit(cfg, model_to_json(model).dump(2) + "\n", out);
  return kOk;
}

int exit_code_for(const Error& e) {
  if (dynamic_cast<const TooManyStrategies*>(&e)) return kTooManyStrategies;
  if (dynamic_cast<const Diverged*>(&e)) return kDiverged;
  return kInvalid;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Dynkin game solver on finite event trees", "dynkin"};
  app.require_subcommand(1);

  auto add_input = [&](CLI::App* sub) {
    sub->add_option("--input", cfg.input, "Tree model file (JSON)")->required();
    sub->add_option("--output", cfg.output, "Write the report here instead of stdout");
    sub->add_flag("--human", cfg.human, "Human-readable output instead of JSON");
  };
  auto add_solver = [&](CLI::App* sub) {
    sub->add_option("--tol", cfg.tol, "Iteration stall tolerance")->capture_default_str();
    sub->add_option("--max-iter", cfg.max_iter, "Iteration limit (default 10*T+10)")
        ->check(CLI::PositiveNumber);
  };

  CLI::App* validate = app.add_subcommand("validate", "Check a model file");
  add_input(validate);
  validate->add_option("--tol", cfg.tol, "Tolerance of the sandwich test");

  CLI::App* solve = app.add_subcommand("solve", "Solve the game and write a report");
  add_input(solve);
  add_solver(solve);

  CLI::App* orc = app.add_subcommand("oracle", "Cross-check the solver by enumeration");
  add_input(orc);
  add_solver(orc);
  orc->add_option("--cap", cfg.cap, "Maximum number of stopping times")
      ->capture_default_str();

  CLI::App* eps = app.add_subcommand("epsilon", "Inspect the (1-lambda)-saddle point");
  add_input(eps);
  add_solver(eps);
  eps->add_option("--lambda", cfg.lambda, "lambda in (0, 1)")->required();
  eps->add_option("--cap", cfg.cap, "Maximum number of stopping times for the bound check")
      ->capture_default_str();

  CLI::App* gen = app.add_subcommand("gen", "Generate a random model");
  gen->add_option("--output", cfg.output, "Write the model here instead of stdout");
  gen->add_option("--seed", cfg.seed, "RNG seed")->capture_default_str();
  gen->add_option("--horizon", cfg.horizon, "Horizon T")->capture_default_str();
  gen->add_option("--branching", cfg.branching, "Maximum branching")->capture_default_str();
  gen->add_option("--min-branching", cfg.min_branching,
                  "Minimum branching (default: equal to --branching)");
  gen->add_option("--lo", cfg.lo, "Lower end of the value range")->capture_default_str();
  gen->add_option("--hi", cfg.hi, "Upper end of the value range")->capture_default_str();
  gen->add_option("--force-sandwich", cfg.force_sandwich, "Force xi <= zeta")
      ->capture_default_str();
  gen->add_option("--inject-violation", cfg.inject_violation,
                  "Plant interior nodes with xi > zeta")
      ->capture_default_str();
  gen->add_option("--max-strategies", cfg.max_strategies,
                  "Resample trees with more root stopping times (0: off)");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (validate->parsed()) return cmd_validate(cfg, out);
    if (solve->parsed()) return cmd_solve(cfg, out);
    if (orc->parsed()) return cmd_oracle(cfg, out, err);
    if (eps->parsed()) return cmd_epsilon(cfg, out);
    if (gen->parsed()) return cmd_gen(cfg, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return kInvalid;
}

}  // namespace dynkin::cli
