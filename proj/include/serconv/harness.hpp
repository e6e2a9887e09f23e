#pragma once

// Experiment plans: config parsing, runs, figure replication and the
// calibration of the nonparametric starting constant.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "serconv/bounds.hpp"
#include "serconv/detector.hpp"
#include "serconv/oracle.hpp"
#include "serconv/posterior.hpp"
#include "serconv/series.hpp"

namespace serconv {

enum class BoundKind { ValidScale, GeneralParametric, Nonparametric };

std::string_view to_string(BoundKind kind) noexcept;
BoundKind parse_bound_kind(std::string_view text);

struct BoundConfig {
  BoundKind kind = BoundKind::Nonparametric;
  double epsilon = 0.001;  // envelope exponent for the parametric bounds
  double a = 1.0;          // inflation of the general bound
  double c1 = 0.725;
  double step = 0.05;
  bool fresh_signs = false;
};

/// Everything needed to reproduce one detector run.
///
/// Flat config keys (one "key = value" per line, '#' comments):
///   id, family, p | q, p2 | q2, seed, epsilon_prime,
///   bound (valid-scale | general | nonparametric), epsilon, a, c1, step,
///   fresh_signs, n_j, K, upper, lower, tail, workers, out, expect
/// p/q set the primary schedule (power law i^-p or geometric q^-i); p2/q2
/// the secondary one of the normal families.
struct ExperimentPlan {
  std::string id = "run";
  SeriesSpec spec;
  BoundConfig bound;
  StageConfig stage;
  Thresholds thresholds;
  int workers = 1;
  std::filesystem::path out_dir;  // empty: nothing written
  std::optional<Label> expect;

  void validate() const;

  /// Applies one "key = value" setting. Throws ConfigError on unknown keys
  /// or unparsable values.
  void set(std::string_view key, std::string_view value);

  /// Config text that parses back to an equal plan.
  std::string serialize() const;
  static ExperimentPlan parse(std::istream& in);
  static ExperimentPlan load(const std::filesystem::path& file);

  /// Shrinks n_j and K by the factor (each at least 1).
  ExperimentPlan scaled(double factor) const;
};

BoundStrategy make_bound(const ExperimentPlan& plan);

struct PlanResult {
  std::string id;
  DetectorRun run;
  std::vector<std::filesystem::path> artifacts;
};

/// Runs the plan in memory; writes the trajectory CSV, verdict CSV and SVG
/// into out_dir when it is set.
PlanResult run_plan(const ExperimentPlan& plan);

/// Header plan_id,family,params,verdict,tail_mean.
void write_verdict_header(std::ostream& os);
void write_verdict_row(std::ostream& os, const ExperimentPlan& plan, const Verdict& verdict);

/// Line chart of the posterior mean against the stage index.
void write_trajectory_svg(std::ostream& os, const std::vector<StageRecord>& stages,
                          std::string_view title);

/// A figure: shared settings plus one labelled panel per line:
///   panel = <label> key=value ... expect=<Convergent|Divergent>
struct FigurePlan {
  std::string figure_id;
  std::vector<std::pair<std::string, ExperimentPlan>> panels;

  static FigurePlan parse(std::istream& in, std::string figure_id);
  static FigurePlan load(const std::filesystem::path& file);
};

struct PanelOutcome {
  std::string panel;
  ExperimentPlan plan;
  Verdict verdict;
  bool matches = false;
};

struct ReplicationReport {
  std::string figure_id;
  std::vector<PanelOutcome> panels;
  bool all_match() const noexcept;
};

/// Runs every panel with the given worker count (and optional scale and
/// output directory, which override the plan file).
ReplicationReport replicate(const FigurePlan& figure, int workers, double scale = 1.0,
                            const std::filesystem::path& out_dir = {});

void write_replication_table(std::ostream& os, const ReplicationReport& report);

struct CalibrationConfig {
  std::vector<double> c1_grid;
  std::vector<double> p_grid;
  StageConfig stage{1000, 2000};
  double step = 0.05;
  Thresholds thresholds{};
  double agreement_floor = 0.0;

  /// p in {0.1, ..., 1.5} without [0.45, 0.55] at p_step; c1 in
  /// {c1_step, 2 c1_step, ...} up to c1_max.
  static CalibrationConfig standard(double p_step = 0.01, double c1_step = 0.01,
                                    double c1_max = 3.0);
};

struct CalibrationResult {
  double c1 = 0.0;
  double agreement = 0.0;  // fraction of the p-grid matching the oracle
  /// Smallest and largest grid c1 reaching the best agreement.
  double best_lo = 0.0;
  double best_hi = 0.0;
  std::vector<std::pair<double, double>> curve;  // (c1, agreement)
};

/// Nonparametric detector on the deterministic proxy i^{-2p}, for every
/// (c1, p) pair; returns the c1 with the highest oracle agreement, the
/// smallest one on ties. Throws NoFeasibleC1 if the best agreement is below
/// the floor.
CalibrationResult calibrate_c1(const CalibrationConfig& cfg, const Executor& exec = Executor(1));

}  // namespace serconv
