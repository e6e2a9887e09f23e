#pragma once

#include <iosfwd>
#include <vector>

#include "serconv/bounds.hpp"
#include "serconv/parallel.hpp"
#include "serconv/posterior.hpp"
#include "serconv/series.hpp"

namespace serconv {

struct StageRecord {
  std::size_t stage = 0;     // j, 1-based
  double partial_sum = 0.0;  // S_j
  double bound = 0.0;        // c_j
  bool indicator = false;    // y_j = 1{|S_j| <= c_j}
  double mean = 0.0;
  double variance = 0.0;
};

struct DetectorRun {
  std::vector<StageRecord> stages;
  Verdict verdict;

  std::vector<PosteriorMoments> moments() const;
};

/// Consumes n_j * K summands, one block per stage, and runs the recursion.
/// Throws StreamExhausted if the source runs dry mid-stage.
DetectorRun run_detector(SummandSource& source, BoundStrategy& bound, const StageConfig& cfg,
                         const Executor& exec = Executor(1), const Thresholds& thresholds = {});

/// S_1..S_K, one ordered block sum per stage.
std::vector<double> block_sums(SummandSource& source, const StageConfig& cfg,
                               const Executor& exec = Executor(1));

/// Same recursion as run_detector for a bound that only looks at the stage
/// number and past indicators (the nonparametric bound).
DetectorRun run_on_block_sums(std::span<const double> sums, const NonparametricState& bound,
                              const Thresholds& thresholds = {});

/// Columns: stage,S_j,c_j,y_j,post_mean,post_var.
void write_trajectory_csv(std::ostream& os, const std::vector<StageRecord>& stages);

/// Shortest text that reads back to the same double.
std::string format_real(double value);

/// Summands held in memory, e.g. a transformed climate record.
class BufferSource final : public SummandSource {
 public:
  explicit BufferSource(std::vector<double> values) : values_(std::move(values)) {}

  std::uint64_t next_index() const noexcept override { return position_ + 1; }
  std::size_t read(std::span<double> out, const Executor& exec) override;

 private:
  std::vector<double> values_;
  std::size_t position_ = 0;
};

}  // namespace serconv
