#include "serconv/climate.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "serconv/bounds.hpp"
#include "serconv/detector.hpp"
#include "serconv/errors.hpp"

namespace serconv {
namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  for (char ch : line) {
    if (ch == ',' || std::isspace(static_cast<unsigned char>(ch))) {
      if (!field.empty()) out.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(ch);
    }
  }
  if (!field.empty()) out.push_back(std::move(field));
  return out;
}

std::optional<double> parse_double(const std::string& text) {
  if (text.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<std::pair<int, int>> parse_year_month(const std::string& text) {
  const auto sep = text.find_first_of("/-");
  if (sep == std::string::npos || sep == 0) return std::nullopt;
  const auto year = parse_double(text.substr(0, sep));
  const auto month = parse_double(text.substr(sep + 1));
  if (!year || !month) return std::nullopt;
  if (*year != std::floor(*year) || *month != std::floor(*month)) return std::nullopt;
  if (*month < 1 || *month > 12) return std::nullopt;
  return std::pair<int, int>{static_cast<int>(*year), static_cast<int>(*month)};
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

void require_above_one(const std::vector<double>& values, std::string_view what) {
  for (std::size_t t = 0; t < values.size(); ++t) {
    if (!(values[t] > 1.0)) {
      throw RangeError(std::string(what) + ": temperature " + format_real(values[t]) +
                       " C at position " + std::to_string(t + 1) + " is not above 1 C");
    }
  }
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open " + path.string());
  return in;
}

}  // namespace

std::string_view to_string(HoloceneMethod method) noexcept {
  switch (method) {
    case HoloceneMethod::CPS:
      return "CPS";
    case HoloceneMethod::DCC:
      return "DCC";
    case HoloceneMethod::GAM:
      return "GAM";
    case HoloceneMethod::PAI:
      return "PAI";
    case HoloceneMethod::SCC:
      return "SCC";
    case HoloceneMethod::Average:
      break;
  }
  return "Average";
}

HoloceneMethod parse_holocene_method(std::string_view name) {
  const std::string key = lower(std::string(name));
  for (HoloceneMethod m : {HoloceneMethod::CPS, HoloceneMethod::DCC, HoloceneMethod::GAM,
                           HoloceneMethod::PAI, HoloceneMethod::SCC, HoloceneMethod::Average}) {
    if (key == lower(std::string(to_string(m)))) return m;
  }
  throw MethodUnknown("unknown Holocene reconstruction method '" + std::string(name) + "'");
}

std::vector<MonthlyAnomaly> parse_monthly_anomalies(std::istream& in, std::string_view name) {
  std::vector<MonthlyAnomaly> rows;
  std::string line;
  std::size_t line_no = 0;
  bool seen_data = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = split_fields(line);
    if (fields.empty() || fields[0][0] == '#') continue;
    const auto date = parse_year_month(fields[0]);
    if (!date) {
      if (!seen_data && rows.empty()) {
        seen_data = true;  // header
        continue;
      }
      throw SchemaError(std::string(name) + ":" + std::to_string(line_no) +
                        ": expected YYYY/MM in the first column");
    }
    seen_data = true;
    if (fields.size() < 2) {
      throw SchemaError(std::string(name) + ":" + std::to_string(line_no) + ": missing value");
    }
    const auto value = parse_double(fields[1]);
    if (!value) {
      throw SchemaError(std::string(name) + ":" + std::to_string(line_no) + ": bad value '" +
                        fields[1] + "'");
    }
    rows.push_back({date->first, date->second, *value});
  }
  return rows;
}

ClimateSeries amalgamate_hadcrut(const std::vector<MonthlyAnomaly>& best_estimate,
                                 const std::vector<std::vector<MonthlyAnomaly>>& members,
                                 int first_year, int last_year, std::size_t expected_members) {
  if (first_year > last_year) throw DomainError("first_year must not exceed last_year");
  if (members.size() != expected_members) {
    throw SchemaError("expected " + std::to_string(expected_members) + " ensemble members, got " +
                      std::to_string(members.size()));
  }
  const auto in_range = [&](const MonthlyAnomaly& r) {
    return r.year >= first_year && r.year <= last_year;
  };
  const std::size_t months = static_cast<std::size_t>(last_year - first_year + 1) * 12;
  const auto month_slot = [&](const MonthlyAnomaly& r) {
    return static_cast<std::size_t>(r.year - first_year) * 12 + static_cast<std::size_t>(r.month - 1);
  };

  // The best estimate defines the calendar; every month must be present once.
  std::vector<char> calendar(months, 0);
  for (const auto& r : best_estimate) {
    if (!in_range(r)) continue;
    if (calendar[month_slot(r)]) {
      throw SchemaError("best estimate repeats " + std::to_string(r.year) + "/" +
                        std::to_string(r.month));
    }
    calendar[month_slot(r)] = 1;
  }
  for (std::size_t m = 0; m < months; ++m) {
    if (!calendar[m]) {
      throw SchemaError("best estimate lacks month " + std::to_string(first_year + int(m / 12)) +
                        "/" + std::to_string(m % 12 + 1));
    }
  }

  ClimateSeries out;
  out.source = ClimateSource::HadCRUT4Amalgam;
  out.direction = TimeDirection::Forward;
  out.values.assign(months * members.size(), 0.0);
  for (std::size_t e = 0; e < members.size(); ++e) {
    std::vector<char> seen(months, 0);
    for (const auto& r : members[e]) {
      if (!in_range(r)) continue;
      const std::size_t m = month_slot(r);
      if (seen[m]) throw SchemaError("member " + std::to_string(e + 1) + " repeats a month");
      seen[m] = 1;
      out.values[m * members.size() + e] = r.anomaly + kAnomalyOffset;
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
      throw SchemaError("member " + std::to_string(e + 1) + " does not cover " +
                        std::to_string(first_year) + "-" + std::to_string(last_year));
    }
  }
  require_above_one(out.values, "HadCRUT4 amalgam");
  out.provenance = "HadCRUT4 " + std::to_string(first_year) + "-" + std::to_string(last_year) +
                   ", " + std::to_string(members.size()) +
                   " members per month in file order, anomaly + 14 C";
  return out;
}

ClimateSeries ingest_hadcrut(const std::filesystem::path& anomaly_file,
                             const std::vector<std::filesystem::path>& ensemble_files,
                             int first_year, int last_year, std::size_t expected_members) {
  auto best_in = open_input(anomaly_file);
  const auto best = parse_monthly_anomalies(best_in, anomaly_file.string());
  std::vector<std::vector<MonthlyAnomaly>> members;
  members.reserve(ensemble_files.size());
  for (const auto& path : ensemble_files) {
    auto in = open_input(path);
    members.push_back(parse_monthly_anomalies(in, path.string()));
  }
  return amalgamate_hadcrut(best, members, first_year, last_year, expected_members);
}

ClimateSeries parse_holocene(std::istream& in, HoloceneMethod method, std::string_view name) {
  std::string line;
  std::vector<std::string> header;
  std::size_t line_no = 0;
  while (header.empty() && std::getline(in, line)) {
    ++line_no;
    auto fields = split_fields(line);
    if (fields.empty() || fields[0][0] == '#') continue;
    header = std::move(fields);
  }
  if (header.empty() || lower(header[0]).rfind("age", 0) != 0) {
    throw SchemaError(std::string(name) + ": header must start with an age column");
  }
  std::map<std::string, std::size_t> column;
  for (std::size_t c = 1; c < header.size(); ++c) column[lower(header[c])] = c;

  std::vector<std::size_t> use;
  const std::string wanted = lower(std::string(to_string(method)));
  if (column.count(wanted)) {
    use.push_back(column[wanted]);
  } else if (method == HoloceneMethod::Average) {
    for (auto m : {"cps", "dcc", "gam", "pai", "scc"}) {
      if (!column.count(m)) {
        throw SchemaError(std::string(name) + ": Average needs all five method columns");
      }
      use.push_back(column[m]);
    }
  } else {
    throw SchemaError(std::string(name) + ": no column for method " +
                      std::string(to_string(method)));
  }

  std::vector<std::pair<double, double>> knots;  // (age BP, value)
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = split_fields(line);
    if (fields.empty() || fields[0][0] == '#') continue;
    if (fields.size() != header.size()) {
      throw SchemaError(std::string(name) + ":" + std::to_string(line_no) +
                        ": expected " + std::to_string(header.size()) + " columns");
    }
    const auto age = parse_double(fields[0]);
    if (!age) throw SchemaError(std::string(name) + ":" + std::to_string(line_no) + ": bad age");
    double sum = 0.0;
    for (std::size_t c : use) {
      const auto v = parse_double(fields[c]);
      if (!v) {
        throw SchemaError(std::string(name) + ":" + std::to_string(line_no) + ": bad value '" +
                          fields[c] + "'");
      }
      sum += *v;
    }
    knots.emplace_back(*age, sum / static_cast<double>(use.size()));
  }
  if (knots.size() < 2) throw SchemaError(std::string(name) + ": need at least two century knots");

  // Present first: index 1 is the knot nearest 1950, later indices go back.
  std::sort(knots.begin(), knots.end());
  for (std::size_t k = 1; k < knots.size(); ++k) {
    if (std::abs(knots[k].first - knots[k - 1].first - 100.0) > 1e-6) {
      throw SchemaError(std::string(name) + ": knots must be spaced 100 years apart");
    }
  }

  ClimateSeries out;
  out.source = ClimateSource::Holocene;
  out.method = method;
  out.direction = TimeDirection::ReversedPast;
  const std::size_t months = (knots.size() - 1) * kMonthsPerCentury;
  out.values.resize(months);
  for (std::size_t m = 0; m < months; ++m) {
    const std::size_t k = m / kMonthsPerCentury;
    const std::size_t r = m % kMonthsPerCentury;
    const double lo = knots[k].second;
    const double hi = knots[k + 1].second;
    out.values[m] = r == 0 ? lo
                           : lo + (hi - lo) * (static_cast<double>(r) /
                                               static_cast<double>(kMonthsPerCentury));
  }
  require_above_one(out.values, "Holocene " + std::string(to_string(method)));
  out.provenance = "Holocene " + std::string(to_string(method)) + ", " +
                   std::to_string(knots.size()) +
                   " century knots, linear monthly interpolation, present first";
  return out;
}

ClimateSeries ingest_holocene(const std::filesystem::path& file, HoloceneMethod method) {
  auto in = open_input(file);
  return parse_holocene(in, method, file.string());
}

std::vector<double> transform(const ClimateSeries& series, double theta0) {
  if (!(theta0 > 1.0)) throw DomainError("theta0 must exceed 1 for log(log theta0)");
  const double shift = std::log(std::log(theta0));
  std::vector<double> out(series.values.size());
  for (std::size_t t = 0; t < out.size(); ++t) {
    const double x = series.values[t];
    if (!(x > 1.0)) {
      throw DomainError("X_t = " + format_real(x) + " at position " + std::to_string(t + 1) +
                        " is not above 1");
    }
    out[t] = std::log(std::log(x)) - shift;
  }
  return out;
}

void SweepConfig::validate() const {
  if (!(lower < upper)) throw DomainError("sweep needs lower < upper");
  if (!(grid_step > 0.0)) throw DomainError("sweep grid step must be > 0");
  if (!(c1_lo < c1_hi) || !(c1_step > 0.0)) throw DomainError("bad c1 range");
  if (!(lower > 1.0)) throw DomainError("theta0 grid must stay above 1");
  stage.validate();
}

std::vector<double> SweepConfig::theta_grid() const {
  validate();
  const auto count = static_cast<std::size_t>(std::floor((upper - lower) / grid_step + 1e-9)) + 1;
  std::vector<double> grid(count);
  for (std::size_t k = 0; k < count; ++k) grid[k] = lower + static_cast<double>(k) * grid_step;
  return grid;
}

std::vector<double> SweepConfig::c1_grid() const {
  validate();
  std::vector<double> grid;
  for (std::size_t k = 1;; ++k) {
    const double c = c1_lo + static_cast<double>(k) * c1_step;
    if (c >= c1_hi - 1e-12) break;
    grid.push_back(c);
  }
  return grid;
}

SweepReport sweep_cells(const ClimateSeries& series, const std::vector<double>& thetas,
                        const std::vector<double>& c1s, const SweepConfig& cfg,
                        const Executor& exec) {
  cfg.stage.validate();
  const std::size_t needed = static_cast<std::size_t>(cfg.stage.total_summands());
  if (series.values.size() < needed) {
    throw StreamExhausted("climate series has " + std::to_string(series.values.size()) +
                          " values but n_j * K = " + std::to_string(needed));
  }
  std::vector<double> loglog(needed);
  for (std::size_t t = 0; t < needed; ++t) {
    const double x = series.values[t];
    if (!(x > 1.0)) throw DomainError("X_t must exceed 1 for the double-log transform");
    loglog[t] = std::log(std::log(x));
  }

  for (double t : thetas) {
    if (!(t > 1.0)) throw DomainError("theta0 must exceed 1");
  }

  // Block sums depend only on theta0; every c1 reuses them.
  const auto n_theta = static_cast<std::ptrdiff_t>(thetas.size());
  std::vector<std::vector<double>> sums(thetas.size());
  const Executor serial(1);
#pragma omp parallel for num_threads(exec.workers()) schedule(dynamic) if (exec.workers() > 1)
  for (std::ptrdiff_t k = 0; k < n_theta; ++k) {
    const double shift = std::log(std::log(thetas[static_cast<std::size_t>(k)]));
    std::vector<double> y(needed);
    for (std::size_t t = 0; t < needed; ++t) y[t] = loglog[t] - shift;
    BufferSource source(std::move(y));
    sums[static_cast<std::size_t>(k)] = block_sums(source, cfg.stage, serial);
  }

  SweepReport report;
  report.cells.resize(thetas.size() * c1s.size());
  const auto cells = static_cast<std::ptrdiff_t>(report.cells.size());
#pragma omp parallel for num_threads(exec.workers()) schedule(dynamic) if (exec.workers() > 1)
  for (std::ptrdiff_t c = 0; c < cells; ++c) {
    const std::size_t k = static_cast<std::size_t>(c) / c1s.size();
    const double c1 = c1s[static_cast<std::size_t>(c) % c1s.size()];
    const DetectorRun run =
        run_on_block_sums(sums[k], NonparametricState{c1, cfg.nonparametric_step, 0},
                          cfg.thresholds);
    report.cells[static_cast<std::size_t>(c)] = {thetas[k], c1, run.verdict};
  }

  report.all_divergent = std::all_of(report.cells.begin(), report.cells.end(), [](const auto& c) {
    return c.verdict.label == Label::Divergent;
  });
  report.all_convergent = std::all_of(report.cells.begin(), report.cells.end(), [](const auto& c) {
    return c.verdict.label == Label::Convergent;
  });
  std::ostringstream meta;
  meta << series.provenance << "; n_j=" << cfg.stage.stage_size << " K=" << cfg.stage.stages;
  if (series.source == ClimateSource::HadCRUT4Amalgam) {
    meta << "; within-month member order is file order (not fixed upstream)";
  }
  report.metadata = meta.str();
  return report;
}

SweepReport sweep(const ClimateSeries& series, const SweepConfig& cfg, const Executor& exec) {
  cfg.validate();
  return sweep_cells(series, cfg.theta_grid(), cfg.c1_grid(), cfg, exec);
}

std::string sweep_summary(const SweepReport& report) {
  std::size_t conv = 0, div = 0, inc = 0;
  for (const auto& c : report.cells) {
    switch (c.verdict.label) {
      case Label::Convergent:
        ++conv;
        break;
      case Label::Divergent:
        ++div;
        break;
      case Label::Inconclusive:
        ++inc;
        break;
    }
  }
  std::ostringstream os;
  os << "cells=" << report.cells.size() << " convergent=" << conv << " divergent=" << div
     << " inconclusive=" << inc << " all_divergent=" << (report.all_divergent ? "true" : "false");
  return os.str();
}

void write_sweep_csv(std::ostream& os, const SweepReport& report) {
  os << "theta0,c1,verdict,tail_mean\n";
  for (const auto& c : report.cells) {
    os << format_real(c.theta0) << ',' << format_real(c.c1) << ',' << to_string(c.verdict.label)
       << ',' << format_real(c.verdict.tail_mean) << '\n';
  }
  os << "# summary: " << sweep_summary(report) << '\n';
  os << "# source: " << report.metadata << '\n';
}

}  // namespace serconv
