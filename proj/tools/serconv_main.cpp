// serconv: command-line front end for the series convergence detector.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <regex>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "serconv/climate.hpp"
#include "serconv/errors.hpp"
#include "serconv/harness.hpp"
#include "serconv/oracle.hpp"

namespace fs = std::filesystem;
using namespace serconv;

namespace {

// Plan keys exposed as --flags; the flag spelling uses dashes.
const std::vector<std::string> kPlanKeys = {
    "id",      "family", "p",     "q",           "p2",  "q2",    "seed", "epsilon_prime",
    "bound",   "epsilon", "a",    "c1",          "step", "n_j",  "K",    "upper",
    "lower",   "tail",   "workers", "out",       "fresh_signs"};

std::string flag_for(const std::string& key) {
  std::string flag = "--" + key;
  std::replace(flag.begin(), flag.end(), '_', '-');
  return flag;
}

struct PlanOptions {
  std::string config;
  std::map<std::string, std::string> values;
  double scale = 1.0;
};

void add_plan_options(CLI::App* cmd, PlanOptions& opts) {
  cmd->add_option("-c,--config", opts.config, "Flat key = value plan file")->check(CLI::ExistingFile);
  for (const auto& key : kPlanKeys) {
    cmd->add_option(flag_for(key), opts.values[key], "Plan key '" + key + "'");
  }
  cmd->add_option("--scale", opts.scale, "Shrink n_j and K by this factor")
      ->check(CLI::Range(1.0, 1e12));
}

ExperimentPlan build_plan(CLI::App* cmd, const PlanOptions& opts) {
  ExperimentPlan plan = opts.config.empty() ? ExperimentPlan{} : ExperimentPlan::load(opts.config);
  for (const auto& key : kPlanKeys) {
    if (cmd->count(flag_for(key)) > 0) plan.set(key, opts.values.at(key));
  }
  plan.validate();
  return opts.scale != 1.0 ? plan.scaled(opts.scale) : plan;
}

int cmd_simulate(CLI::App* cmd, const PlanOptions& opts, bool print_config) {
  const ExperimentPlan plan = build_plan(cmd, opts);
  if (print_config) {
    std::cout << plan.serialize();
    return 0;
  }
  const PlanResult result = run_plan(plan);
  write_verdict_header(std::cout);
  write_verdict_row(std::cout, plan, result.run.verdict);
  for (const auto& path : result.artifacts) std::cerr << "wrote " << path.string() << "\n";
  return 0;
}

int cmd_oracle(CLI::App* cmd, const PlanOptions& opts) {
  const ExperimentPlan plan = build_plan(cmd, opts);
  const OracleVerdict v = classify_family(plan.spec);
  std::cout << to_string(v.label) << "\t" << v.rationale << "\n";
  return 0;
}

// Ensemble files sorted by the last number in their name (1, 2, ..., 100).
std::vector<fs::path> ensemble_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw SchemaError("missing ensemble directory " + dir.string());
  std::vector<std::pair<long, fs::path>> found;
  const std::regex last_number(R"((\d+)\D*$)");
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    std::smatch m;
    if (!std::regex_search(name, m, last_number)) continue;
    found.emplace_back(std::stol(m[1].str()), entry.path());
  }
  std::sort(found.begin(), found.end());
  std::vector<fs::path> out;
  for (auto& [n, p] : found) out.push_back(std::move(p));
  return out;
}

struct ClimateOptions {
  std::string source = "hadcrut";
  std::string method = "Average";
  std::string data_dir = "data";
  std::string out;
  std::size_t n_j = 0;
  std::size_t stages = 0;
  int workers = 1;
  SweepConfig sweep;
};

int cmd_climate(const ClimateOptions& opts) {
  ClimateSeries series;
  SweepConfig cfg = opts.sweep;
  const fs::path dir(opts.data_dir);
  if (opts.source == "hadcrut") {
    series = ingest_hadcrut(dir / "hadcrut4" / "best_estimate.txt",
                            ensemble_files(dir / "hadcrut4" / "ensemble"));
    cfg.stage = {1200, 167};
  } else if (opts.source == "holocene") {
    series = ingest_holocene(dir / "holocene" / "reconstructions.csv",
                             parse_holocene_method(opts.method));
    cfg.stage = {1000, 144};
  } else {
    throw ConfigError("--source must be hadcrut or holocene");
  }
  if (opts.n_j > 0) cfg.stage.stage_size = opts.n_j;
  if (opts.stages > 0) cfg.stage.stages = opts.stages;

  const SweepReport report = sweep(series, cfg, Executor(opts.workers));
  if (opts.out.empty()) {
    write_sweep_csv(std::cout, report);
  } else {
    std::ofstream out(opts.out, std::ios::binary);
    if (!out) throw IOError("cannot write " + opts.out);
    write_sweep_csv(out, report);
  }
  std::cerr << sweep_summary(report) << "\n";
  return 0;
}

struct CalibrateOptions {
  double p_step = 0.01;
  double c1_step = 0.01;
  double c1_max = 3.0;
  double floor = 0.0;
  std::size_t n_j = 1000;
  std::size_t stages = 2000;
  int workers = 1;
  std::string curve;
};

int cmd_calibrate(const CalibrateOptions& opts) {
  CalibrationConfig cfg = CalibrationConfig::standard(opts.p_step, opts.c1_step, opts.c1_max);
  cfg.stage = {opts.n_j, opts.stages};
  cfg.agreement_floor = opts.floor;
  const CalibrationResult r = calibrate_c1(cfg, Executor(opts.workers));
  std::printf("c1 = %.4f\nagreement = %.4f over %zu values of p\nbest agreement for c1 in [%.4f, %.4f]\n",
              r.c1, r.agreement, cfg.p_grid.size(), r.best_lo, r.best_hi);
  if (!opts.curve.empty()) {
    std::ofstream out(opts.curve, std::ios::binary);
    if (!out) throw IOError("cannot write " + opts.curve);
    out << "c1,agreement\n";
    for (const auto& [c1, a] : r.curve) out << format_real(c1) << ',' << format_real(a) << '\n';
  }
  return 0;
}

struct ReplicateOptions {
  std::string figure;
  std::string plans_dir = SERCONV_DEFAULT_PLANS_DIR;
  std::string out;
  int workers = 1;
  double scale = 1.0;
};

int cmd_replicate(const ReplicateOptions& opts) {
  fs::path file = opts.figure;
  if (!fs::exists(file)) file = fs::path(opts.plans_dir) / (opts.figure + ".plan");
  const FigurePlan figure = FigurePlan::load(file);
  const ReplicationReport report = replicate(figure, opts.workers, opts.scale, opts.out);
  write_replication_table(std::cout, report);
  return report.all_match() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian convergence detector for infinite series"};
  app.require_subcommand(1);

  PlanOptions sim_opts;
  bool print_config = false;
  auto* simulate = app.add_subcommand("simulate", "Run one plan: trajectory CSV, verdict, SVG");
  add_plan_options(simulate, sim_opts);
  simulate->add_flag("--print-config", print_config, "Print the resolved plan and exit");

  PlanOptions oracle_opts;
  auto* oracle = app.add_subcommand("oracle", "Analytic label for a family and schedule");
  add_plan_options(oracle, oracle_opts);

  ClimateOptions climate_opts;
  auto* climate = app.add_subcommand("climate", "theta0 x c1 sweep over a temperature record");
  climate->add_option("--source", climate_opts.source, "hadcrut or holocene")
      ->check(CLI::IsMember({"hadcrut", "holocene"}));
  climate->add_option("--method", climate_opts.method, "CPS, DCC, GAM, PAI, SCC or Average");
  climate->add_option("--data-dir", climate_opts.data_dir,
                      "Holds hadcrut4/best_estimate.txt, hadcrut4/ensemble/*, "
                      "holocene/reconstructions.csv");
  climate->add_option("--out", climate_opts.out, "Sweep CSV (stdout if omitted)");
  climate->add_option("--n-j", climate_opts.n_j, "Summands per stage");
  climate->add_option("--K", climate_opts.stages, "Number of stages");
  climate->add_option("--workers", climate_opts.workers)->check(CLI::PositiveNumber);
  climate->add_option("--lower", climate_opts.sweep.lower, "Lowest theta0 (C)");
  climate->add_option("--upper", climate_opts.sweep.upper, "Highest theta0 (C)");
  climate->add_option("--grid-step", climate_opts.sweep.grid_step);
  climate->add_option("--c1-step", climate_opts.sweep.c1_step);

  CalibrateOptions cal_opts;
  auto* calibrate = app.add_subcommand("calibrate", "Choose c1 on the deterministic proxy");
  calibrate->add_option("--p-step", cal_opts.p_step);
  calibrate->add_option("--c1-step", cal_opts.c1_step);
  calibrate->add_option("--c1-max", cal_opts.c1_max);
  calibrate->add_option("--floor", cal_opts.floor, "Minimum acceptable agreement");
  calibrate->add_option("--n-j", cal_opts.n_j);
  calibrate->add_option("--K", cal_opts.stages);
  calibrate->add_option("--workers", cal_opts.workers)->check(CLI::PositiveNumber);
  calibrate->add_option("--curve", cal_opts.curve, "Write the c1,agreement curve here");

  ReplicateOptions rep_opts;
  auto* rep = app.add_subcommand("replicate", "Run a figure plan and compare with its labels");
  rep->add_option("figure", rep_opts.figure, "Figure id or plan file")->required();
  rep->add_option("--plans-dir", rep_opts.plans_dir);
  rep->add_option("--out", rep_opts.out, "Directory for per-panel artifacts");
  rep->add_option("--workers", rep_opts.workers)->check(CLI::PositiveNumber);
  rep->add_option("--scale", rep_opts.scale)->check(CLI::Range(1.0, 1e12));

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return cmd_simulate(simulate, sim_opts, print_config);
    if (oracle->parsed()) return cmd_oracle(oracle, oracle_opts);
    if (climate->parsed()) return cmd_climate(climate_opts);
    if (calibrate->parsed()) return cmd_calibrate(cal_opts);
    if (rep->parsed()) return cmd_replicate(rep_opts);
  } catch (const serconv::Error& e) {
    std::cerr << "serconv: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
