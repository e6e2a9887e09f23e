#include <cmath>
#include <cstdlib>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "serconv/detector.hpp"
#include "serconv/errors.hpp"

using namespace serconv;

namespace {

std::string csv(const DetectorRun& run) {
  std::ostringstream os;
  write_trajectory_csv(os, run.stages);
  return os.str();
}

}  // namespace

TEST_CASE("zero series converges and a constant series diverges") {
  const StageConfig cfg{50, 200};
  BufferSource zeros(std::vector<double>(cfg.total_summands(), 0.0));
  BoundStrategy b1(NonparametricState{0.725, 0.05, 0});
  CHECK(run_detector(zeros, b1, cfg).verdict.label == Label::Convergent);

  BufferSource ones(std::vector<double>(cfg.total_summands(), 1.0));
  BoundStrategy b2(NonparametricState{0.725, 0.05, 0});
  const DetectorRun run = run_detector(ones, b2, cfg);
  CHECK(run.verdict.label == Label::Divergent);
  CHECK(run.stages.size() == 200);
  CHECK(run.stages[0].partial_sum == 50.0);
  CHECK(run.stages[0].indicator == false);
  CHECK(run.moments().size() == 200);
}

TEST_CASE("short sources raise StreamExhausted") {
  BufferSource src(std::vector<double>(99, 0.0));
  BoundStrategy b(NonparametricState{});
  CHECK_THROWS_AS(run_detector(src, b, StageConfig{10, 10}), StreamExhausted);
  BufferSource src2(std::vector<double>(5, 0.0));
  CHECK_THROWS_AS(block_sums(src2, StageConfig{10, 1}), StreamExhausted);
}

TEST_CASE("indicator uses a non-strict comparison") {
  // c_1 = c1 / log 2; pick S_1 equal to it
  const double c = 0.5 / std::log(2.0);
  BufferSource src(std::vector<double>{c});
  BoundStrategy b(NonparametricState{0.5, 0.05, 0});
  const auto run = run_detector(src, b, StageConfig{1, 1});
  CHECK(run.stages[0].bound == c);
  CHECK(run.stages[0].indicator);
}

TEST_CASE("block-sum path reproduces the full loop") {
  const StageConfig cfg{37, 300};
  std::vector<double> values(cfg.total_summands());
  const CounterRng rng(2);
  for (std::size_t k = 0; k < values.size(); ++k) {
    values[k] = rng.normal(StreamTag::NormalNoise, k) / (1.0 + static_cast<double>(k) / 37.0);
  }
  BufferSource a(values);
  BoundStrategy b(NonparametricState{0.3, 0.05, 0});
  const DetectorRun full = run_detector(a, b, cfg, Executor(3));

  BufferSource c(values);
  const auto sums = block_sums(c, cfg);
  const DetectorRun fast = run_on_block_sums(sums, NonparametricState{0.3, 0.05, 0});
  CHECK(csv(full) == csv(fast));
  CHECK(full.verdict.tail_mean == fast.verdict.tail_mean);
}

TEST_CASE("trajectory csv layout") {
  BufferSource src(std::vector<double>{0.0, 0.0});
  BoundStrategy b(NonparametricState{1.0, 0.05, 0});
  const auto run = run_detector(src, b, StageConfig{1, 2});
  const std::string text = csv(run);
  CHECK(text.rfind("stage,S_j,c_j,y_j,post_mean,post_var\n", 0) == 0);
  CHECK(text.find("\n1,0,1.4426950408889634,1,0.6666666666666666,0.05555555555555555\n") !=
        std::string::npos);
  CHECK(format_real(0.1) == "0.1");
  for (double v : {1.0 / 3.0, 1e-300, 123456789.125, -2.5e17, 0.725}) {
    CHECK(std::strtod(format_real(v).c_str(), nullptr) == v);
  }
}
