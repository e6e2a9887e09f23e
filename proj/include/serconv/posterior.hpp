#pragma once

// Stage-wise Beta-Bernoulli recursion.
//
// Stage j contributes a prior increment alpha_j = beta_j = 1/j^2 and one
// Bernoulli observation y_j. After k stages the posterior of p_k is
//   Beta(sum alpha + sum y, k + sum beta - sum y).

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "serconv/parallel.hpp"

namespace serconv {

struct StageConfig {
  std::size_t stage_size = 1000;  // n_j, constant across stages
  std::size_t stages = 2000;      // K

  void validate() const;
  std::uint64_t total_summands() const noexcept {
    return static_cast<std::uint64_t>(stage_size) * stages;
  }
};

struct PosteriorMoments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Mean and variance of Beta(sum_alpha + sum_y, k + sum_alpha - sum_y).
PosteriorMoments beta_posterior(std::size_t k, double sum_alpha, std::size_t sum_y) noexcept;

class DetectorState {
 public:
  /// Consume one stage indicator.
  void step(bool y);

  std::size_t stages() const noexcept { return k_; }
  std::size_t sum_y() const noexcept { return sum_y_; }
  double sum_alpha() const noexcept { return alpha_.value(); }
  const std::vector<PosteriorMoments>& trajectory() const noexcept { return trajectory_; }

 private:
  std::size_t k_ = 0;
  std::size_t sum_y_ = 0;
  CompensatedSum alpha_;
  std::vector<PosteriorMoments> trajectory_;
};

enum class Label { Convergent, Divergent, Inconclusive };

std::string_view to_string(Label label) noexcept;
Label parse_label(std::string_view text);

struct Thresholds {
  double upper = 0.9;
  double lower = 0.1;
  double tail_fraction = 0.1;
};

struct Verdict {
  Label label = Label::Inconclusive;
  double final_mean = 0.0;
  double tail_mean = 0.0;
};

/// Averages the posterior means over the last ceil(tail_fraction * K)
/// stages and compares the average with the thresholds.
Verdict classify(std::span<const PosteriorMoments> trajectory, const Thresholds& thresholds = {});

}  // namespace serconv
