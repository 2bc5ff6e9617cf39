#include "floodguard/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "floodguard/eval.hpp"
#include "floodguard/io.hpp"
#include "floodguard/milp.hpp"
#include "floodguard/mip.hpp"
#include "floodguard/mps.hpp"

namespace floodguard {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> v;
  std::stringstream s(text);
  for (std::string item; std::getline(s, item, ',');) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw FormatError("scenario source: bad number '" + item + "'");
    }
  }
  return v;
}

}  // namespace

ScenarioSet scenarios_from_spec(const CaseModel& c, const std::string& spec, std::vector<std::string>* warnings) {
  if (spec.empty()) {
    if (!c.scenario_thresholds.empty()) return nested_severity_reduction(c.substations, c.scenario_thresholds);
    return top_n_reduction(c.substations, 4);
  }
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw FormatError("scenario source must be file:PATH, nested:d1,d2,... or top:N");
  const std::string kind = spec.substr(0, colon);
  const std::string arg = spec.substr(colon + 1);
  if (kind == "file") return load_scenarios(arg, c.substations, warnings);
  if (kind == "nested") return nested_severity_reduction(c.substations, parse_list(arg));
  if (kind == "top") {
    const auto v = parse_list(arg);
    if (v.size() != 1 || v[0] < 1 || v[0] != static_cast<double>(static_cast<std::size_t>(v[0])))
      throw FormatError("top:N needs a positive integer");
    return top_n_reduction(c.substations, static_cast<std::size_t>(v[0]));
  }
  throw FormatError("unknown scenario source '" + kind + "'");
}

namespace {

// Raised to leave a command with a specific exit code after printing.
struct Exit {
  int code;
};

struct Config {
  std::string case_path;
  std::string scenarios;
  std::optional<int> horizon, teams, members, prep_hours;
  std::optional<double> voll, dam_cost;
  double gap = 1e-6;
  long node_limit = 200000;
  std::string out_dir = ".";
  std::string solver_log;
  unsigned seed = 0;
  bool baseline_only = false;
  bool sensitivity = false;
};

class Runner {
 public:
  Runner(const Config& cfg, std::ostream& out, std::ostream& err) : cfg_(cfg), out_(out), err_(err) {}

  int validate() {
    CaseModel c = load();
    out_ << "valid: " << c.buses.size() << " buses, " << c.lines.size() << " lines, " << c.generators.size()
         << " generators, " << c.substations.size() << " substations\n";
    return kExitOk;
  }

  int scenarios() {
    CaseModel c = load();
    ScenarioSet set = scenario_set(c);
    print_scenarios(set);
    write_json(output("scenarios.json"), scenarios_to_json(set));
    return kExitOk;
  }

  int plan() {
    CaseModel c = load();
    ScenarioSet set = scenario_set(c);
    print_scenarios(set);
    ProtectionModel model = build_model(c, set);
    MipResult mip = solve(c, set, model, "stochastic");
    const Plan plan = drop_idle_protection(c, set, plan_from_solution(model, mip.x));
    PlanReport report = evaluate(c, set, plan);
    json rep = report_to_json(report);
    if (cfg_.sensitivity) {
      MipOptions opt = options();
      opt.log = nullptr;
      SensitivityNote note = protection_sensitivity(c, set, {0.5, 1.5}, opt);
      rep["sensitivity"] = sensitivity_to_json(note);
      out_ << "sensitivity: "
           << (note.changing_parameters.empty() ? std::string("no +/-50% perturbation changes the protected set")
                                                : "set changes under " + join(note.changing_parameters))
           << "\n";
    }
    write_json(output("plan.json"), plan_json("stochastic", c, set, plan, mip, report));
    write_text(output("curve.csv"), curve_to_csv(report.curve));
    write_json(output("report.json"), rep);
    print_plan(c, plan, report);
    return mip.status == MipStatus::Optimal ? kExitOk : kExitResourceLimit;
  }

  int baseline() {
    CaseModel c = load();
    ScenarioSet set = scenario_set(c);
    auto [plan, mip] = solve_baseline(c);
    PlanReport report = evaluate(c, set, plan);
    write_baseline(c, set, plan, mip, report);
    print_plan(c, plan, report);
    return mip.status == MipStatus::Optimal ? kExitOk : kExitResourceLimit;
  }

  int compare() {
    CaseModel c = load();
    ScenarioSet set = scenario_set(c);
    print_scenarios(set);
    auto [base_plan, base_mip] = solve_baseline(c);
    if (cfg_.baseline_only) {
      PlanReport report = evaluate(c, set, base_plan);
      write_baseline(c, set, base_plan, base_mip, report);
      print_plan(c, base_plan, report);
      return base_mip.status == MipStatus::Optimal ? kExitOk : kExitResourceLimit;
    }
    ProtectionModel model = build_model(c, set);
    MipResult mip = solve(c, set, model, "stochastic");
    const Plan plan = drop_idle_protection(c, set, plan_from_solution(model, mip.x));
    Comparison cmp = compare_plans(c, set, plan, base_plan);
    Comparison vs_empty = compare_plans(c, set, plan, empty_plan(c));

    write_json(output("plan.json"), plan_json("stochastic", c, set, plan, mip, cmp.a));
    write_text(output("curve.csv"), curve_to_csv(cmp.a.curve));
    write_baseline(c, set, base_plan, base_mip, cmp.b);
    json j = comparison_to_json(cmp, "stochastic", "deterministic");
    j["empty_plan"] = {{"expected_cost", vs_empty.b.expected_cost},
                       {"outage", {{"magnitude_mw", vs_empty.b.outage.magnitude}, {"time_h", vs_empty.b.outage.time}}},
                       {"stochastic_minus_empty", vs_empty.expected_cost.absolute}};
    write_json(output("compare.json"), j);

    out_ << "expected cost  stochastic " << format_double(cmp.a.expected_cost) << "  deterministic "
         << format_double(cmp.b.expected_cost) << "  empty " << format_double(vs_empty.b.expected_cost) << "\n";
    out_ << "outage magnitude MW  stochastic " << format_double(cmp.a.outage.magnitude) << "  deterministic "
         << format_double(cmp.b.outage.magnitude) << "\n";
    out_ << "outage time h  stochastic " << format_double(cmp.a.outage.time) << "  deterministic "
         << format_double(cmp.b.outage.time) << "\n";
    if (cmp.expected_cost.percent)
      out_ << "expected cost change vs deterministic: " << format_double(*cmp.expected_cost.percent) << " %\n";
    const bool optimal = mip.status == MipStatus::Optimal && base_mip.status == MipStatus::Optimal;
    return optimal ? kExitOk : kExitResourceLimit;
  }

  int export_model() {
    CaseModel c = load();
    ScenarioSet set = scenario_set(c);
    ProtectionModel model = build_model(c, set);
    write_mps(model.instance, output("model.mps"));
    out_ << "wrote " << output("model.mps").string() << ": " << model.instance.catalog.size() << " columns, "
         << model.instance.constraints.size() << " rows\n";
    return kExitOk;
  }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (const auto& x : v) s += (s.empty() ? "" : ",") + x;
    return s;
  }

  CaseModel load() {
    if (cfg_.case_path.empty()) fail(kExitValidation, "no case given (--case)");
    CaseModel c;
    try {
      c = load_case(cfg_.case_path);
    } catch (const FormatError& e) {
      fail(kExitValidation, e.what());
    } catch (const std::runtime_error& e) {
      fail(kExitValidation, e.what());
    }
    if (cfg_.horizon) {
      if (*cfg_.horizon < 1) fail(kExitValidation, "--horizon must be at least 1");
      c = with_horizon(c, *cfg_.horizon);
    }
    if (cfg_.teams) c.crew.num_teams = *cfg_.teams;
    if (cfg_.members) c.crew.members_per_team = *cfg_.members;
    if (cfg_.prep_hours) c.crew.prep_hours = *cfg_.prep_hours;
    if (cfg_.voll) c.costs.voll = *cfg_.voll;
    if (cfg_.dam_cost)
      for (auto& s : c.substations) s.tiger_dam_cost = *cfg_.dam_cost;
    const auto violations = validate_case(c);
    if (!violations.empty()) {
      for (const auto& v : violations) err_ << v.path << ": " << v.message << "\n";
      throw Exit{kExitValidation};
    }
    return c;
  }

  ScenarioSet scenario_set(const CaseModel& c) {
    std::vector<std::string> warnings;
    ScenarioSet set;
    try {
      set = scenarios_from_spec(c, cfg_.scenarios, &warnings);
    } catch (const FormatError& e) {
      fail(kExitValidation, e.what());
    } catch (const ScenarioError& e) {
      fail(kExitValidation, e.what());
    } catch (const std::invalid_argument& e) {
      fail(kExitValidation, e.what());
    } catch (const std::runtime_error& e) {
      fail(kExitValidation, e.what());
    }
    for (const auto& w : warnings) err_ << "warning: " << w << "\n";
    return set;
  }

  ProtectionModel build_model(const CaseModel& c, const ScenarioSet& set) {
    try {
      ProtectionModel m = build(c, set);
      for (const auto& w : m.instance.warnings) err_ << "warning: " << w << "\n";
      return m;
    } catch (const std::logic_error& e) {
      fail(kExitValidation, e.what());
    }
    throw Exit{kExitUnexpected};
  }

  MipOptions options() {
    MipOptions opt;
    opt.node_limit = cfg_.node_limit;
    opt.gap_tolerance = cfg_.gap;
    if (!cfg_.solver_log.empty()) {
      if (!log_.is_open()) {
        log_.open(cfg_.solver_log);
        if (!log_) fail(kExitUnexpected, "cannot write solver log " + cfg_.solver_log);
      }
      opt.log = &log_;
    }
    return opt;
  }

  // Solves and maps non-optimal outcomes to exit codes. Returns only when an
  // incumbent exists.
  MipResult solve(const CaseModel& c, const ScenarioSet& set, const ProtectionModel& model, const std::string& what) {
    MipResult r = solve_mip(model.instance, options());
    if (r.status == MipStatus::Infeasible) {
      err_ << what << " model is infeasible\n";
      diagnose(c, set, model);
      throw Exit{kExitInfeasible};
    }
    if (r.status == MipStatus::NodeLimit && !r.has_incumbent) {
      err_ << what << " solve hit the node limit (" << cfg_.node_limit << ") without a feasible plan\n";
      throw Exit{kExitResourceLimit};
    }
    if (r.status == MipStatus::NodeLimit)
      err_ << what << " solve hit the node limit; reporting the incumbent with gap " << format_double(r.gap) << "\n";
    if (r.status == MipStatus::Unbounded || r.status == MipStatus::NumericalFailure)
      fail(kExitUnexpected, what + " solve failed: " + to_string(r.status));
    return r;
  }

  // Names the constraint families that block the do-nothing plan.
  void diagnose(const CaseModel& c, const ScenarioSet& set, const ProtectionModel& model) {
    try {
      const auto rep = warm_start_check(model.instance, plan_assignment(c, set, model, empty_plan(c)));
      if (!rep.feasible)
        for (const auto& f : rep.violated_families) err_ << "violated family: " << f << "\n";
    } catch (const std::exception&) {
    }
  }

  std::pair<Plan, MipResult> solve_baseline(const CaseModel& c) {
    ScenarioSet all = all_fail_scenario(c.substations);
    ProtectionModel model = build_model(c, all);
    MipResult mip = solve(c, all, model, "deterministic");
    return {drop_idle_protection(c, all, plan_from_solution(model, mip.x)), mip};
  }

  PlanReport evaluate(const CaseModel& c, const ScenarioSet& set, const Plan& plan) {
    try {
      return evaluate_plan(c, set, plan);
    } catch (const InfeasiblePlan& e) {
      fail(kExitInfeasible, e.what());
    }
    throw Exit{kExitUnexpected};
  }

  void write_baseline(const CaseModel& c, const ScenarioSet& set, const Plan& plan, const MipResult& mip,
                      const PlanReport& report) {
    write_json(output("baseline.json"), plan_json("deterministic", c, set, plan, mip, report));
    write_text(output("baseline_curve.csv"), curve_to_csv(report.curve));
  }

  json plan_json(const std::string& kind, const CaseModel& c, const ScenarioSet& set, const Plan& plan,
                 const MipResult& mip, const PlanReport& report) {
    json j = plan_to_json(c, plan);
    j["kind"] = kind;
    j["solver"] = {{"status", to_string(mip.status)},
                   {"objective", mip.objective},
                   {"bound", mip.bound},
                   {"gap", mip.gap},
                   {"nodes", mip.nodes},
                   {"lp_iterations", mip.lp_iterations}};
    json scen = json::array();
    for (const auto& s : set.scenarios)
      scen.push_back({{"id", s.id}, {"failed", s.failure_set()}, {"probability", s.probability}});
    j["scenarios"] = scen;
    j["expected_cost"] = report.expected_cost;
    j["substation_cost"] = report.substation_cost;
    j["lost_load_cost"] = report.lost_load_cost;
    j["outage"] = {{"magnitude_mw", report.outage.magnitude}, {"time_h", report.outage.time}};
    return j;
  }

  void print_scenarios(const ScenarioSet& set) {
    out_ << "scenarios:\n";
    for (const auto& s : set.scenarios) {
      out_ << "  " << s.id << "  p=" << format_double(s.probability) << "  failed={";
      out_ << join(s.failure_set()) << "}\n";
    }
  }

  void print_plan(const CaseModel& c, const Plan& plan, const PlanReport& report) {
    out_ << "protected: {" << join(plan.protected_set(c)) << "}\n";
    out_ << "expected cost: " << format_double(report.expected_cost) << " (substations "
         << format_double(report.substation_cost) << ", lost load " << format_double(report.lost_load_cost) << ")\n";
    const auto grid = schedule_grid(c, plan);
    for (std::size_t n = 0; n < grid.size(); ++n) {
      out_ << "  team " << n + 1 << ":";
      for (const auto& cell : grid[n]) out_ << ' ' << (cell.empty() ? "-" : cell);
      out_ << "\n";
    }
  }

  fs::path output(const std::string& file) {
    std::error_code ec;
    fs::create_directories(cfg_.out_dir, ec);
    if (ec) fail(kExitUnexpected, "cannot create output directory " + cfg_.out_dir + ": " + ec.message());
    return fs::path(cfg_.out_dir) / file;
  }

  [[noreturn]] void fail(int code, const std::string& msg) {
    err_ << "error: " << msg << "\n";
    throw Exit{code};
  }

  const Config& cfg_;
  std::ostream& out_;
  std::ostream& err_;
  std::ofstream log_;
};

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tiger dam protection planning for flood-exposed substations"};
  app.set_config("--config", "", "TOML file with option values; command-line flags win");
  app.require_subcommand(1);
  Config cfg;
  app.add_option("--case", cfg.case_path, "case JSON file");
  app.add_option("--scenarios", cfg.scenarios, "file:PATH | nested:d1,d2,... | top:N");
  app.add_option("--horizon", cfg.horizon, "operating horizon in hours");
  app.add_option("--teams", cfg.teams, "number of crew teams");
  app.add_option("--members", cfg.members, "members per team");
  app.add_option("--prep-hours", cfg.prep_hours, "hours available for protection work");
  app.add_option("--voll", cfg.voll, "value of lost load, $/MWh");
  app.add_option("--dam-cost", cfg.dam_cost, "tiger dam cost per substation, $");
  app.add_option("--gap", cfg.gap, "relative optimality gap")->check(CLI::NonNegativeNumber);
  app.add_option("--node-limit", cfg.node_limit, "branch-and-bound node limit")->check(CLI::PositiveNumber);
  app.add_option("--out", cfg.out_dir, "output directory");
  app.add_option("--solver-log", cfg.solver_log, "write one line per branch-and-bound node to this file");
  app.add_option("--seed", cfg.seed, "reserved; the solve path is deterministic");

  auto* validate = app.add_subcommand("validate", "check a case file")->fallthrough();
  auto* scenarios = app.add_subcommand("scenarios", "write the scenario set")->fallthrough();
  auto* plan = app.add_subcommand("plan", "solve the stochastic protection plan")->fallthrough();
  plan->add_flag("--sensitivity", cfg.sensitivity, "re-solve with each invented default scaled by 0.5 and 1.5");
  auto* baseline = app.add_subcommand("baseline", "solve the deterministic all-fail baseline")->fallthrough();
  auto* compare = app.add_subcommand("compare", "stochastic plan versus deterministic baseline")->fallthrough();
  compare->add_flag("--baseline-only", cfg.baseline_only, "write only the baseline artifacts");
  auto* export_mps_cmd = app.add_subcommand("export-mps", "write the model as fixed-format MPS")->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  Runner run(cfg, out, err);
  try {
    if (validate->parsed()) return run.validate();
    if (scenarios->parsed()) return run.scenarios();
    if (plan->parsed()) return run.plan();
    if (baseline->parsed()) return run.baseline();
    if (compare->parsed()) return run.compare();
    if (export_mps_cmd->parsed()) return run.export_model();
  } catch (const Exit& e) {
    return e.code;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUnexpected;
  }
  return kExitUnexpected;
}

}  // namespace floodguard
