#include "serconv/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "serconv/errors.hpp"

namespace serconv {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string_view strip_comment(std::string_view line) {
  const auto hash = line.find('#');
  return trim(hash == std::string_view::npos ? line : line.substr(0, hash));
}

double to_real(std::string_view key, std::string_view text) {
  const std::string copy(text);
  char* end = nullptr;
  const double v = std::strtod(copy.c_str(), &end);
  if (copy.empty() || end != copy.c_str() + copy.size() || !std::isfinite(v)) {
    throw ConfigError("key '" + std::string(key) + "': '" + copy + "' is not a finite number");
  }
  return v;
}

template <class Int>
Int to_integer(std::string_view key, std::string_view text) {
  Int v{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigError("key '" + std::string(key) + "': '" + std::string(text) +
                      "' is not a valid integer");
  }
  return v;
}

bool to_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("key '" + std::string(key) + "': expected true or false");
}

std::string schedule_lines(const ParamSchedule& s, std::string_view suffix) {
  const char* letter = s.kind == ParamSchedule::Kind::PowerLaw ? "p" : "q";
  return std::string(letter) + std::string(suffix) + " = " + format_real(s.parameter) + "\n";
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IOError("cannot open " + path.string() + " for writing");
  out << content;
  out.flush();
  if (!out) throw IOError("failed writing " + path.string());
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string fixed(double v, int digits) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

std::string_view to_string(BoundKind kind) noexcept {
  switch (kind) {
    case BoundKind::ValidScale:
      return "valid-scale";
    case BoundKind::GeneralParametric:
      return "general";
    case BoundKind::Nonparametric:
      break;
  }
  return "nonparametric";
}

BoundKind parse_bound_kind(std::string_view text) {
  if (text == "valid-scale" || text == "valid") return BoundKind::ValidScale;
  if (text == "general" || text == "general-parametric") return BoundKind::GeneralParametric;
  if (text == "nonparametric") return BoundKind::Nonparametric;
  throw ConfigError("unknown bound '" + std::string(text) + "'");
}

void ExperimentPlan::validate() const {
  spec.validate();
  stage.validate();
  if (workers < 1) throw ConfigError("workers must be >= 1");
  if (!(thresholds.lower >= 0.0 && thresholds.lower < thresholds.upper && thresholds.upper <= 1.0)) {
    throw ConfigError("thresholds need 0 <= lower < upper <= 1");
  }
  if (!(thresholds.tail_fraction > 0.0 && thresholds.tail_fraction <= 1.0)) {
    throw ConfigError("tail fraction must lie in (0, 1]");
  }
  switch (bound.kind) {
    case BoundKind::ValidScale:
      if (spec.family != Family::HierExponential && spec.family != Family::StateSpaceExp &&
          spec.family != Family::StateSpaceHierExp) {
        throw ConfigError("the valid scale bound needs a non-negative exponential family, not " +
                          std::string(to_string(spec.family)));
      }
      [[fallthrough]];
    case BoundKind::GeneralParametric:
      if (!(bound.epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
      if (!(bound.a > 0.0)) throw ConfigError("a must be > 0");
      break;
    case BoundKind::Nonparametric:
      if (!(bound.step > 0.0)) throw ConfigError("step must be > 0");
      break;
  }
}

void ExperimentPlan::set(std::string_view key, std::string_view value) {
  value = trim(value);
  if (key == "id") {
    if (value.empty() || value.find_first_of("/\\ ,") != std::string_view::npos) {
      throw ConfigError("id must be a non-empty name without separators");
    }
    id = std::string(value);
  } else if (key == "family") {
    spec.family = parse_family(value);
  } else if (key == "p") {
    spec.schedule = ParamSchedule::power_law(to_real(key, value));
  } else if (key == "q") {
    spec.schedule = ParamSchedule::geometric(to_real(key, value));
  } else if (key == "p2") {
    spec.secondary = ParamSchedule::power_law(to_real(key, value));
  } else if (key == "q2") {
    spec.secondary = ParamSchedule::geometric(to_real(key, value));
  } else if (key == "seed") {
    spec.seed = to_integer<std::uint64_t>(key, value);
  } else if (key == "epsilon_prime") {
    spec.epsilon_prime = to_real(key, value);
  } else if (key == "bound") {
    bound.kind = parse_bound_kind(value);
  } else if (key == "epsilon") {
    bound.epsilon = to_real(key, value);
  } else if (key == "a") {
    bound.a = to_real(key, value);
  } else if (key == "c1") {
    bound.c1 = to_real(key, value);
  } else if (key == "step") {
    bound.step = to_real(key, value);
  } else if (key == "fresh_signs") {
    bound.fresh_signs = to_bool(key, value);
  } else if (key == "n_j") {
    stage.stage_size = to_integer<std::size_t>(key, value);
  } else if (key == "K") {
    stage.stages = to_integer<std::size_t>(key, value);
  } else if (key == "upper") {
    thresholds.upper = to_real(key, value);
  } else if (key == "lower") {
    thresholds.lower = to_real(key, value);
  } else if (key == "tail") {
    thresholds.tail_fraction = to_real(key, value);
  } else if (key == "workers") {
    workers = to_integer<int>(key, value);
  } else if (key == "out") {
    out_dir = std::filesystem::path(std::string(value));
  } else if (key == "expect") {
    expect = parse_label(value);
  } else {
    throw ConfigError("unknown config key '" + std::string(key) + "'");
  }
}

std::string ExperimentPlan::serialize() const {
  std::ostringstream os;
  os << "id = " << id << "\n";
  os << "family = " << to_string(spec.family) << "\n";
  os << schedule_lines(spec.schedule, "");
  os << schedule_lines(spec.secondary, "2");
  os << "seed = " << spec.seed << "\n";
  os << "epsilon_prime = " << format_real(spec.epsilon_prime) << "\n";
  os << "bound = " << to_string(bound.kind) << "\n";
  os << "epsilon = " << format_real(bound.epsilon) << "\n";
  os << "a = " << format_real(bound.a) << "\n";
  os << "c1 = " << format_real(bound.c1) << "\n";
  os << "step = " << format_real(bound.step) << "\n";
  os << "fresh_signs = " << (bound.fresh_signs ? "true" : "false") << "\n";
  os << "n_j = " << stage.stage_size << "\n";
  os << "K = " << stage.stages << "\n";
  os << "upper = " << format_real(thresholds.upper) << "\n";
  os << "lower = " << format_real(thresholds.lower) << "\n";
  os << "tail = " << format_real(thresholds.tail_fraction) << "\n";
  os << "workers = " << workers << "\n";
  if (!out_dir.empty()) os << "out = " << out_dir.string() << "\n";
  if (expect) os << "expect = " << to_string(*expect) << "\n";
  return os.str();
}

ExperimentPlan ExperimentPlan::parse(std::istream& in) {
  ExperimentPlan plan;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = strip_comment(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    plan.set(trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  plan.validate();
  return plan;
}

ExperimentPlan ExperimentPlan::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open plan " + file.string());
  return parse(in);
}

ExperimentPlan ExperimentPlan::scaled(double factor) const {
  if (!(factor >= 1.0)) throw ConfigError("scale factor must be >= 1");
  ExperimentPlan out = *this;
  auto shrink = [factor](std::size_t n) {
    const auto v = static_cast<std::size_t>(std::llround(static_cast<double>(n) / factor));
    return std::max<std::size_t>(v, 1);
  };
  out.stage.stage_size = shrink(stage.stage_size);
  out.stage.stages = shrink(stage.stages);
  return out;
}

BoundStrategy make_bound(const ExperimentPlan& plan) {
  const SeriesSpec& spec = plan.spec;
  switch (plan.bound.kind) {
    case BoundKind::ValidScale: {
      CouplingVariant variant = CouplingVariant::HierExponential;
      if (spec.family == Family::StateSpaceExp) variant = CouplingVariant::StateSpaceExp;
      if (spec.family == Family::StateSpaceHierExp) variant = CouplingVariant::StateSpaceHierExp;
      if (spec.family != Family::HierExponential && spec.family != Family::StateSpaceExp &&
          spec.family != Family::StateSpaceHierExp) {
        throw ConfigError("valid scale bound is not defined for " +
                          std::string(to_string(spec.family)));
      }
      return BoundStrategy(
          ScaleCouplingState{spec.schedule, plan.bound.epsilon, CounterRng{spec.seed}, variant});
    }
    case BoundKind::GeneralParametric: {
      const SurrogateKind kind = spec.family == Family::RandomDirichlet
                                     ? SurrogateKind::RandomDirichlet
                                     : SurrogateKind::Normal;
      return BoundStrategy(GeneralBoundState{plan.bound.a, plan.bound.epsilon, kind,
                                             CounterRng{spec.seed}, plan.bound.fresh_signs});
    }
    case BoundKind::Nonparametric:
      break;
  }
  return BoundStrategy(NonparametricState{plan.bound.c1, plan.bound.step, 0});
}

void write_verdict_header(std::ostream& os) { os << "plan_id,family,params,verdict,tail_mean\n"; }

void write_verdict_row(std::ostream& os, const ExperimentPlan& plan, const Verdict& verdict) {
  std::string params = plan.spec.describe() + " bound=" + std::string(to_string(plan.bound.kind));
  switch (plan.bound.kind) {
    case BoundKind::Nonparametric:
      params += " c1=" + format_real(plan.bound.c1);
      break;
    case BoundKind::GeneralParametric:
      params += " a=" + format_real(plan.bound.a);
      [[fallthrough]];
    case BoundKind::ValidScale:
      params += " epsilon=" + format_real(plan.bound.epsilon);
      break;
  }
  params += " n_j=" + std::to_string(plan.stage.stage_size) +
            " K=" + std::to_string(plan.stage.stages);
  os << csv_field(plan.id) << ',' << to_string(plan.spec.family) << ',' << csv_field(params) << ','
     << to_string(verdict.label) << ',' << format_real(verdict.tail_mean) << '\n';
}

void write_trajectory_svg(std::ostream& os, const std::vector<StageRecord>& stages,
                          std::string_view title) {
  constexpr double kWidth = 640, kHeight = 360, kLeft = 56, kRight = 16, kTop = 32, kBottom = 40;
  constexpr std::size_t kMaxPoints = 2000;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const std::size_t k = stages.size();
  const auto x_of = [&](std::size_t stage) {
    return kLeft + (k > 1 ? plot_w * static_cast<double>(stage - 1) / static_cast<double>(k - 1)
                          : 0.0);
  };
  const auto y_of = [&](double mean) { return kTop + plot_h * (1.0 - mean); };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
     << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kLeft << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"13\">";
  for (char c : title) {
    if (c == '<') os << "&lt;";
    else if (c == '>') os << "&gt;";
    else if (c == '&') os << "&amp;";
    else os << c;
  }
  os << "</text>\n";
  os << "<g stroke=\"#444\" stroke-width=\"1\" fill=\"none\">\n";
  os << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
     << kTop + plot_h << "\"/>\n";
  os << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << kLeft + plot_w
     << "\" y2=\"" << kTop + plot_h << "\"/>\n";
  os << "</g>\n";
  os << "<g font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">\n";
  for (double tick : {0.0, 0.5, 1.0}) {
    os << "<text x=\"" << kLeft - 6 << "\" y=\"" << fixed(y_of(tick) + 4, 2) << "\">"
       << fixed(tick, 1) << "</text>\n";
  }
  os << "</g>\n";
  os << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 10
     << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">stage (K = " << k
     << ")</text>\n";
  if (k > 0) {
    const std::size_t stride = (k + kMaxPoints - 1) / kMaxPoints;
    os << "<polyline fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"1.5\" points=\"";
    for (std::size_t s = 0; s < k; s += stride) {
      os << fixed(x_of(stages[s].stage), 2) << ',' << fixed(y_of(stages[s].mean), 2) << ' ';
    }
    os << fixed(x_of(stages[k - 1].stage), 2) << ',' << fixed(y_of(stages[k - 1].mean), 2);
    os << "\"/>\n";
  }
  os << "</svg>\n";
}

PlanResult run_plan(const ExperimentPlan& plan) {
  plan.validate();
  SeriesStream stream(plan.spec);
  BoundStrategy bound = make_bound(plan);
  const Executor exec(plan.workers);

  PlanResult result;
  result.id = plan.id;
  result.run = run_detector(stream, bound, plan.stage, exec, plan.thresholds);

  if (!plan.out_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(plan.out_dir, ec);
    if (ec) throw IOError("cannot create " + plan.out_dir.string() + ": " + ec.message());

    std::ostringstream traj;
    write_trajectory_csv(traj, result.run.stages);
    std::ostringstream verdict;
    write_verdict_header(verdict);
    write_verdict_row(verdict, plan, result.run.verdict);
    std::ostringstream svg;
    write_trajectory_svg(svg, result.run.stages,
                         plan.id + ": " + plan.spec.describe() + " (" +
                             std::string(to_string(result.run.verdict.label)) + ")");

    const auto base = plan.out_dir / plan.id;
    for (const auto& [suffix, text] :
         {std::pair{".trajectory.csv", traj.str()}, std::pair{".verdict.csv", verdict.str()},
          std::pair{".svg", svg.str()}}) {
      auto path = base;
      path += suffix;
      write_file(path, text);
      result.artifacts.push_back(path);
    }
  }
  return result;
}

FigurePlan FigurePlan::parse(std::istream& in, std::string figure_id) {
  ExperimentPlan defaults;
  std::vector<std::pair<std::size_t, std::string>> panel_lines;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = strip_comment(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(figure_id + ":" + std::to_string(line_no) + ": expected key = value");
    }
    const auto key = trim(line.substr(0, eq));
    if (key == "panel") {
      panel_lines.emplace_back(line_no, std::string(trim(line.substr(eq + 1))));
    } else if (key == "figure") {
      figure_id = std::string(trim(line.substr(eq + 1)));
    } else {
      defaults.set(key, line.substr(eq + 1));
    }
  }
  if (panel_lines.empty()) throw ConfigError(figure_id + ": no panels");

  FigurePlan figure;
  figure.figure_id = figure_id;
  for (const auto& [no, text] : panel_lines) {
    std::istringstream tokens(text);
    std::string label;
    tokens >> label;
    if (label.empty()) throw ConfigError(figure_id + ":" + std::to_string(no) + ": empty panel");
    ExperimentPlan plan = defaults;
    plan.expect.reset();
    plan.id = figure_id + "_" + label;
    std::string token;
    while (tokens >> token) {
      const auto eq = token.find('=');
      if (eq == std::string::npos) {
        throw ConfigError(figure_id + ":" + std::to_string(no) + ": '" + token +
                          "' is not key=value");
      }
      plan.set(token.substr(0, eq), token.substr(eq + 1));
    }
    if (!plan.expect) {
      throw ConfigError(figure_id + ":" + std::to_string(no) + ": panel lacks expect=");
    }
    plan.validate();
    figure.panels.emplace_back(label, std::move(plan));
  }
  return figure;
}

FigurePlan FigurePlan::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open figure plan " + file.string());
  return parse(in, file.stem().string());
}

bool ReplicationReport::all_match() const noexcept {
  return std::all_of(panels.begin(), panels.end(), [](const auto& p) { return p.matches; });
}

ReplicationReport replicate(const FigurePlan& figure, int workers, double scale,
                            const std::filesystem::path& out_dir) {
  ReplicationReport report;
  report.figure_id = figure.figure_id;
  std::ostringstream verdicts;
  write_verdict_header(verdicts);
  for (const auto& [label, base] : figure.panels) {
    ExperimentPlan plan = scale != 1.0 ? base.scaled(scale) : base;
    plan.workers = workers;
    if (!out_dir.empty()) plan.out_dir = out_dir;
    const PlanResult result = run_plan(plan);
    PanelOutcome outcome{label, plan, result.run.verdict, false};
    outcome.matches = plan.expect && result.run.verdict.label == *plan.expect;
    write_verdict_row(verdicts, plan, result.run.verdict);
    report.panels.push_back(std::move(outcome));
  }
  if (!out_dir.empty()) write_file(out_dir / (figure.figure_id + ".verdicts.csv"), verdicts.str());
  return report;
}

void write_replication_table(std::ostream& os, const ReplicationReport& report) {
  for (const auto& p : report.panels) {
    os << report.figure_id << " (" << p.panel << ") " << p.plan.spec.describe() << ": expected "
       << (p.plan.expect ? to_string(*p.plan.expect) : std::string_view("?")) << ", got "
       << to_string(p.verdict.label) << " (tail mean " << fixed(p.verdict.tail_mean, 4) << ") "
       << (p.matches ? "ok" : "MISMATCH") << "\n";
  }
}

CalibrationConfig CalibrationConfig::standard(double p_step, double c1_step, double c1_max) {
  if (!(p_step > 0.0) || !(c1_step > 0.0) || !(c1_max > c1_step)) {
    throw ConfigError("calibration grid steps must be positive");
  }
  CalibrationConfig cfg;
  const auto np = static_cast<long>(std::floor(1.4 / p_step + 1e-9));
  for (long k = 0; k <= np; ++k) {
    const double p = std::round((0.1 + static_cast<double>(k) * p_step) * 1e9) / 1e9;
    if (p >= 0.45 - 1e-9 && p <= 0.55 + 1e-9) continue;
    cfg.p_grid.push_back(p);
  }
  const auto nc = static_cast<long>(std::floor(c1_max / c1_step + 1e-9));
  for (long k = 1; k <= nc; ++k) {
    cfg.c1_grid.push_back(std::round(static_cast<double>(k) * c1_step * 1e9) / 1e9);
  }
  return cfg;
}

CalibrationResult calibrate_c1(const CalibrationConfig& cfg, const Executor& exec) {
  if (cfg.c1_grid.empty() || cfg.p_grid.empty()) throw ConfigError("calibration grids are empty");
  if (!(cfg.step > 0.0)) throw ConfigError("step must be > 0");
  cfg.stage.validate();

  const std::size_t np = cfg.p_grid.size();
  std::vector<std::vector<double>> sums(np);
  std::vector<Label> truth(np);
  const Executor serial(1);
  const auto n_p = static_cast<std::ptrdiff_t>(np);
#pragma omp parallel for num_threads(exec.workers()) schedule(dynamic) if (exec.workers() > 1)
  for (std::ptrdiff_t k = 0; k < n_p; ++k) {
    SeriesSpec spec;
    spec.family = Family::DeterministicDirichlet;
    spec.schedule = ParamSchedule::power_law(cfg.p_grid[static_cast<std::size_t>(k)]);
    truth[static_cast<std::size_t>(k)] = classify_family(spec).label;
    SeriesStream stream(spec);
    sums[static_cast<std::size_t>(k)] = block_sums(stream, cfg.stage, serial);
  }

  CalibrationResult result;
  result.curve.resize(cfg.c1_grid.size());
  const auto n_c = static_cast<std::ptrdiff_t>(cfg.c1_grid.size());
#pragma omp parallel for num_threads(exec.workers()) schedule(dynamic) if (exec.workers() > 1)
  for (std::ptrdiff_t c = 0; c < n_c; ++c) {
    const double c1 = cfg.c1_grid[static_cast<std::size_t>(c)];
    std::size_t agree = 0;
    for (std::size_t k = 0; k < np; ++k) {
      const auto run = run_on_block_sums(sums[k], NonparametricState{c1, cfg.step, 0},
                                         cfg.thresholds);
      if (run.verdict.label == truth[k]) ++agree;
    }
    result.curve[static_cast<std::size_t>(c)] = {
        c1, static_cast<double>(agree) / static_cast<double>(np)};
  }

  double best = -1.0;
  for (const auto& [c1, a] : result.curve) best = std::max(best, a);
  bool first = true;
  for (const auto& [c1, a] : result.curve) {
    if (a != best) continue;
    if (first) {
      result.best_lo = result.best_hi = c1;
      first = false;
    }
    result.best_lo = std::min(result.best_lo, c1);
    result.best_hi = std::max(result.best_hi, c1);
  }
  result.c1 = result.best_lo;
  result.agreement = best;
  if (best < cfg.agreement_floor) {
    throw NoFeasibleC1("best oracle agreement " + fixed(best, 4) + " is below the floor " +
                       fixed(cfg.agreement_floor, 4));
  }
  return result;
}

}  // namespace serconv
