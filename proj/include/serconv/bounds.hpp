#pragma once

// Stage bounds c_j for the partial sums.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>

#include "serconv/parallel.hpp"
#include "serconv/rng.hpp"
#include "serconv/series.hpp"

namespace serconv {

/// r_i(eps) = min{ i^(1+eps), (1+eps)^i }.
double envelope_rate(std::uint64_t i, double eps);

/// log r_i(eps), computed without overflow for large i.
double log_envelope_rate(std::uint64_t i, double eps);

// ---------------------------------------------------------------------------
// Valid bound for non-negative hierarchical scale families.

enum class CouplingVariant { HierExponential, StateSpaceExp, StateSpaceHierExp };

struct ScaleCouplingState {
  ParamSchedule psi = ParamSchedule::power_law(2.0);
  double epsilon = 0.001;
  CounterRng star{0};  // U*_i, independent of every data-generating tag
  CouplingVariant variant = CouplingVariant::HierExponential;
};

/// Scales of the coupled pair driven by the same U*_i:
///   theta_psi = -psi_i log U*_i,  theta_tilde = -r_i^{-1} log U*_i.
struct CoupledScales {
  double theta_psi;
  double theta_tilde;
};

CoupledScales coupled_scales(std::uint64_t i, const ScaleCouplingState& state);

/// Envelope surrogate for one observed non-negative summand at index i.
double coupled_surrogate(double observed, std::uint64_t i, const ScaleCouplingState& state);

/// c_j = sum of the surrogates over the block that starts at first_index.
double scale_coupled_bound(std::span<const double> block, std::uint64_t first_index,
                           const ScaleCouplingState& state, const Executor& exec);

// ---------------------------------------------------------------------------
// General inflated parametric bound: |S~_j| + a/j.

enum class SurrogateKind { Normal, RandomDirichlet };

struct GeneralBoundState {
  double a = 0.1;
  double epsilon = 0.001;
  SurrogateKind kind = SurrogateKind::Normal;
  CounterRng rng{0};
  /// RDS only: draw fresh signs instead of reusing the observed ones.
  bool fresh_signs = false;
};

double general_surrogate(double observed, std::uint64_t i, const GeneralBoundState& state);

double general_parametric_bound(std::size_t stage, std::span<const double> block,
                                std::uint64_t first_index, const GeneralBoundState& state,
                                const Executor& exec);

// ---------------------------------------------------------------------------
// Adaptive nonparametric bound: c_j = max(C_j, 0) / log(j + 1).

struct NonparametricState {
  double c1 = 0.725;
  double step = 0.05;
  /// C_j = c1 + step * net_steps; kept as an integer count so every update
  /// moves C_j by exactly one step.
  long long net_steps = 0;

  double c_hat() const noexcept { return c1 + step * static_cast<double>(net_steps); }
};

/// Bound at stage j. At j = 1 prev_y must be empty and C_1 = c1; later
/// stages first move C_j up (prev_y = 1) or down (prev_y = 0) by one step.
std::pair<double, NonparametricState> nonparametric_bound(const NonparametricState& state,
                                                          std::size_t stage,
                                                          std::optional<bool> prev_y);

// ---------------------------------------------------------------------------

class BoundStrategy {
 public:
  using State = std::variant<ScaleCouplingState, GeneralBoundState, NonparametricState>;

  explicit BoundStrategy(State state) : state_(std::move(state)) {}

  /// c_j for the given block of observed summands.
  double bound(std::size_t stage, std::span<const double> block, std::uint64_t first_index,
               const Executor& exec);

  /// Feed back the indicator of the stage that was just bounded.
  void record(bool y);

  const State& state() const noexcept { return state_; }
  std::string name() const;

 private:
  State state_;
  std::optional<bool> last_y_;
};

}  // namespace serconv
