#include "serconv/detector.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "serconv/errors.hpp"

namespace serconv {

std::vector<PosteriorMoments> DetectorRun::moments() const {
  std::vector<PosteriorMoments> out;
  out.reserve(stages.size());
  for (const auto& s : stages) out.push_back({s.mean, s.variance});
  return out;
}

DetectorRun run_detector(SummandSource& source, BoundStrategy& bound, const StageConfig& cfg,
                         const Executor& exec, const Thresholds& thresholds) {
  cfg.validate();
  DetectorState state;
  DetectorRun run;
  run.stages.reserve(cfg.stages);
  std::vector<double> block(cfg.stage_size);

  for (std::size_t j = 1; j <= cfg.stages; ++j) {
    const std::uint64_t first = source.next_index();
    const std::size_t got = source.read(block, exec);
    if (got != block.size()) {
      throw StreamExhausted("source exhausted in stage " + std::to_string(j) + " after " +
                            std::to_string(first - 1 + got) + " summands");
    }
    const double partial = exec.ordered_sum(block);
    const double c = bound.bound(j, block, first, exec);
    const bool y = std::abs(partial) <= c;
    bound.record(y);
    state.step(y);
    const auto& m = state.trajectory().back();
    run.stages.push_back({j, partial, c, y, m.mean, m.variance});
  }
  run.verdict = classify(state.trajectory(), thresholds);
  return run;
}

std::vector<double> block_sums(SummandSource& source, const StageConfig& cfg,
                               const Executor& exec) {
  cfg.validate();
  std::vector<double> sums;
  sums.reserve(cfg.stages);
  std::vector<double> block(cfg.stage_size);
  for (std::size_t j = 1; j <= cfg.stages; ++j) {
    const std::uint64_t first = source.next_index();
    const std::size_t got = source.read(block, exec);
    if (got != block.size()) {
      throw StreamExhausted("source exhausted in stage " + std::to_string(j) + " after " +
                            std::to_string(first - 1 + got) + " summands");
    }
    sums.push_back(exec.ordered_sum(block));
  }
  return sums;
}

DetectorRun run_on_block_sums(std::span<const double> sums, const NonparametricState& bound,
                              const Thresholds& thresholds) {
  if (sums.empty()) throw DomainError("no stages to run");
  DetectorState state;
  DetectorRun run;
  run.stages.reserve(sums.size());
  NonparametricState current = bound;
  std::optional<bool> last;
  for (std::size_t j = 1; j <= sums.size(); ++j) {
    auto [c, next] = nonparametric_bound(current, j, last);
    current = next;
    const double partial = sums[j - 1];
    const bool y = std::abs(partial) <= c;
    last = y;
    state.step(y);
    const auto& m = state.trajectory().back();
    run.stages.push_back({j, partial, c, y, m.mean, m.variance});
  }
  run.verdict = classify(state.trajectory(), thresholds);
  return run;
}

std::string format_real(double value) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

void write_trajectory_csv(std::ostream& os, const std::vector<StageRecord>& stages) {
  os << "stage,S_j,c_j,y_j,post_mean,post_var\n";
  for (const auto& s : stages) {
    os << s.stage << ',' << format_real(s.partial_sum) << ',' << format_real(s.bound) << ','
       << (s.indicator ? 1 : 0) << ',' << format_real(s.mean) << ',' << format_real(s.variance)
       << '\n';
  }
}

std::size_t BufferSource::read(std::span<double> out, const Executor&) {
  const std::size_t n = std::min(out.size(), values_.size() - position_);
  std::copy_n(values_.begin() + static_cast<std::ptrdiff_t>(position_), n, out.begin());
  position_ += n;
  return n;
}

}  // namespace serconv
