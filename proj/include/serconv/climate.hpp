#pragma once

// Temperature records as series summands.
//
// HadCRUT4 monthly anomalies (best estimate plus ensemble members) and
// Holocene reconstructions at century resolution are turned into absolute
// temperatures X_t, then into Y_t = log(log X_t) - log(log theta0).

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "serconv/parallel.hpp"
#include "serconv/posterior.hpp"

namespace serconv {

enum class ClimateSource { HadCRUT4Amalgam, Holocene };
enum class HoloceneMethod { CPS, DCC, GAM, PAI, SCC, Average };
enum class TimeDirection { Forward, ReversedPast };

std::string_view to_string(HoloceneMethod method) noexcept;
HoloceneMethod parse_holocene_method(std::string_view name);

struct ClimateSeries {
  ClimateSource source = ClimateSource::HadCRUT4Amalgam;
  std::optional<HoloceneMethod> method;
  TimeDirection direction = TimeDirection::Forward;
  std::vector<double> values;  // degrees C
  std::string provenance;
};

inline constexpr double kAnomalyOffset = 14.0;
inline constexpr std::size_t kHadcrutMembers = 100;
inline constexpr std::size_t kMonthsPerCentury = 1200;

struct MonthlyAnomaly {
  int year = 0;
  int month = 0;
  double anomaly = 0.0;
};

/// Rows of "YYYY/MM value [more columns...]", separated by whitespace or
/// commas. Lines starting with '#' and a single leading header are skipped.
std::vector<MonthlyAnomaly> parse_monthly_anomalies(std::istream& in, std::string_view name);

/// Month-major, member-minor amalgam: for every month of [first_year,
/// last_year] the member anomalies + 14 C are emitted in member order. The
/// best estimate fixes the calendar that every member must cover.
ClimateSeries amalgamate_hadcrut(const std::vector<MonthlyAnomaly>& best_estimate,
                                 const std::vector<std::vector<MonthlyAnomaly>>& members,
                                 int first_year = 1850, int last_year = 2016,
                                 std::size_t expected_members = kHadcrutMembers);

ClimateSeries ingest_hadcrut(const std::filesystem::path& anomaly_file,
                             const std::vector<std::filesystem::path>& ensemble_files,
                             int first_year = 1850, int last_year = 2016,
                             std::size_t expected_members = kHadcrutMembers);

/// CSV with header "age,CPS,DCC,GAM,PAI,SCC[,Average]", ages in years
/// before present at a 100-year spacing. Average defaults to the mean of
/// the five methods. Output: linear monthly interpolation, nearest the
/// present first, (knots - 1) * 1200 values.
ClimateSeries parse_holocene(std::istream& in, HoloceneMethod method, std::string_view name);
ClimateSeries ingest_holocene(const std::filesystem::path& file, HoloceneMethod method);

/// Y_t = log(log X_t) - log(log theta0).
std::vector<double> transform(const ClimateSeries& series, double theta0);

struct SweepConfig {
  double lower = 11.0;
  double upper = 16.0;
  double grid_step = 0.1;
  double c1_lo = 0.0;  // open interval (c1_lo, c1_hi)
  double c1_hi = 10.0;
  double c1_step = 0.5;
  double nonparametric_step = 0.05;
  StageConfig stage{1200, 167};
  Thresholds thresholds{};

  void validate() const;
  std::vector<double> theta_grid() const;
  std::vector<double> c1_grid() const;
};

struct SweepCell {
  double theta0 = 0.0;
  double c1 = 0.0;
  Verdict verdict;
};

struct SweepReport {
  std::vector<SweepCell> cells;
  bool all_divergent = false;
  bool all_convergent = false;
  std::string metadata;
};

SweepReport sweep(const ClimateSeries& series, const SweepConfig& cfg,
                  const Executor& exec = Executor(1));

/// Same detector runs over an explicit theta0 list.
SweepReport sweep_cells(const ClimateSeries& series, const std::vector<double>& thetas,
                        const std::vector<double>& c1s, const SweepConfig& cfg,
                        const Executor& exec = Executor(1));

/// theta0,c1,verdict,tail_mean rows followed by a "# summary" line.
void write_sweep_csv(std::ostream& os, const SweepReport& report);
std::string sweep_summary(const SweepReport& report);

}  // namespace serconv
