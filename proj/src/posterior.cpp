#include "serconv/posterior.hpp"

#include <cmath>

#include "serconv/errors.hpp"

namespace serconv {

void StageConfig::validate() const {
  if (stage_size < 1) throw DomainError("stage size n_j must be at least 1");
  if (stages < 1) throw DomainError("stage count K must be at least 1");
}

PosteriorMoments beta_posterior(std::size_t k, double sum_alpha, std::size_t sum_y) noexcept {
  const double kd = static_cast<double>(k);
  const double yd = static_cast<double>(sum_y);
  const double a = sum_alpha + yd;
  const double b = kd + sum_alpha - yd;
  const double total = kd + 2.0 * sum_alpha;
  return {a / total, (a * b) / (total * total * (1.0 + total))};
}

void DetectorState::step(bool y) {
  ++k_;
  const double kd = static_cast<double>(k_);
  alpha_.add(1.0 / (kd * kd));
  if (y) ++sum_y_;
  trajectory_.push_back(beta_posterior(k_, alpha_.value(), sum_y_));
}

std::string_view to_string(Label label) noexcept {
  switch (label) {
    case Label::Convergent:
      return "convergent";
    case Label::Divergent:
      return "divergent";
    case Label::Inconclusive:
      break;
  }
  return "inconclusive";
}

Label parse_label(std::string_view text) {
  if (text == "convergent" || text == "Convergent") return Label::Convergent;
  if (text == "divergent" || text == "Divergent") return Label::Divergent;
  if (text == "inconclusive" || text == "Inconclusive") return Label::Inconclusive;
  throw ConfigError("unknown verdict label '" + std::string(text) + "'");
}

Verdict classify(std::span<const PosteriorMoments> trajectory, const Thresholds& thresholds) {
  if (trajectory.empty()) throw DomainError("cannot classify an empty trajectory");
  const std::size_t k = trajectory.size();
  auto window = static_cast<std::size_t>(std::ceil(thresholds.tail_fraction * static_cast<double>(k)));
  if (window < 1) window = 1;
  if (window > k) window = k;

  CompensatedSum acc;
  for (std::size_t s = k - window; s < k; ++s) acc.add(trajectory[s].mean);

  Verdict v;
  v.final_mean = trajectory.back().mean;
  v.tail_mean = acc.value() / static_cast<double>(window);
  if (v.tail_mean >= thresholds.upper) {
    v.label = Label::Convergent;
  } else if (v.tail_mean <= thresholds.lower) {
    v.label = Label::Divergent;
  } else {
    v.label = Label::Inconclusive;
  }
  return v;
}

}  // namespace serconv
