#include "serconv/bounds.hpp"

#include <cmath>
#include <limits>

#include "serconv/errors.hpp"

namespace serconv {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_rate_args(std::uint64_t i, double eps) {
  if (i < 1) throw DomainError("envelope index must be >= 1");
  if (!(eps > 0.0)) throw DomainError("envelope epsilon must be > 0");
}

// observed * ratio with 0 * inf treated as 0: a zero summand stays zero.
double scaled(double observed, double ratio) {
  if (observed == 0.0) return 0.0;
  return observed * ratio;
}

}  // namespace

double log_envelope_rate(std::uint64_t i, double eps) {
  check_rate_args(i, eps);
  const double id = static_cast<double>(i);
  const double polynomial = (1.0 + eps) * std::log(id);
  const double geometric = id * std::log1p(eps);
  return polynomial < geometric ? polynomial : geometric;
}

double envelope_rate(std::uint64_t i, double eps) { return std::exp(log_envelope_rate(i, eps)); }

CoupledScales coupled_scales(std::uint64_t i, const ScaleCouplingState& state) {
  const double w = -std::log(state.star.uniform(StreamTag::CouplingStar, i));
  const double psi = std::exp(state.psi.log_value(i));
  const double inv_rate = std::exp(-log_envelope_rate(i, state.epsilon));
  return {psi * w, inv_rate * w};
}

double coupled_surrogate(double observed, std::uint64_t i, const ScaleCouplingState& state) {
  if (observed < 0.0 || std::isnan(observed)) {
    throw NegativeSummand("scale-coupled bound needs non-negative summands (index " +
                          std::to_string(i) + ")");
  }
  switch (state.variant) {
    case CouplingVariant::HierExponential:
    case CouplingVariant::StateSpaceHierExp: {
      // log U_i = -x / theta_psi, surrogate = -theta_tilde log U_i
      //         = x * theta_tilde / theta_psi.
      const CoupledScales s = coupled_scales(i, state);
      if (s.theta_psi == 0.0) {
        return observed == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
      }
      return scaled(observed, s.theta_tilde / s.theta_psi);
    }
    case CouplingVariant::StateSpaceExp: {
      // Y_i = X*_i theta_i with theta_i = -psi_i log U_i gives
      // log U_i = -Y_i / (psi_i X*_i); the surrogate X*_i theta~_i then
      // equals Y_i / (r_i psi_i) and the latent X*_i drops out.
      const double psi = std::exp(state.psi.log_value(i));
      const double inv_rate = std::exp(-log_envelope_rate(i, state.epsilon));
      if (psi == 0.0) return observed == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
      return scaled(observed, inv_rate / psi);
    }
  }
  return observed;
}

double scale_coupled_bound(std::span<const double> block, std::uint64_t first_index,
                           const ScaleCouplingState& state, const Executor& exec) {
  for (std::size_t k = 0; k < block.size(); ++k) {
    if (block[k] < 0.0 || std::isnan(block[k])) {
      throw NegativeSummand("scale-coupled bound needs non-negative summands (index " +
                            std::to_string(first_index + k) + ")");
    }
  }
  return exec.ordered_sum(block.size(), [&](std::size_t k) {
    return coupled_surrogate(block[k], first_index + k, state);
  });
}

double general_surrogate(double observed, std::uint64_t i, const GeneralBoundState& state) {
  const double inv_rate = std::exp(-log_envelope_rate(i, state.epsilon));
  if (state.kind == SurrogateKind::Normal) {
    const double mu = std::sqrt(inv_rate) * state.rng.normal(StreamTag::SurrogateMean, i);
    const double var = state.rng.exponential(inv_rate, StreamTag::SurrogateVariance, i);
    return mu + std::sqrt(var) * state.rng.normal(StreamTag::SurrogateNoise, i);
  }
  double sign;
  if (state.fresh_signs) {
    sign = state.rng.uniform(StreamTag::SurrogateSign, i) < 0.5 ? -1.0 : 1.0;
  } else {
    sign = observed < 0.0 ? -1.0 : 1.0;
  }
  // Dirichlet term at exponent 1 + eps.
  return sign * std::exp(-(1.0 + state.epsilon) * std::log(static_cast<double>(i)));
}

double general_parametric_bound(std::size_t stage, std::span<const double> block,
                                std::uint64_t first_index, const GeneralBoundState& state,
                                const Executor& exec) {
  if (!(state.a > 0.0)) throw DomainError("inflation constant a must be > 0");
  if (stage < 1) throw DomainError("stage index must be >= 1");
  const double surrogate = exec.ordered_sum(block.size(), [&](std::size_t k) {
    return general_surrogate(block[k], first_index + k, state);
  });
  return std::abs(surrogate) + state.a / static_cast<double>(stage);
}

std::pair<double, NonparametricState> nonparametric_bound(const NonparametricState& state,
                                                          std::size_t stage,
                                                          std::optional<bool> prev_y) {
  if (stage < 1) throw DomainError("stage index must be >= 1");
  NonparametricState next = state;
  if (stage == 1) {
    if (prev_y) throw DomainError("stage 1 has no previous indicator");
    next.net_steps = 0;
  } else {
    if (!prev_y) throw DomainError("stages after the first need the previous indicator");
    next.net_steps += *prev_y ? 1 : -1;
  }
  const double c_hat = next.c_hat();
  const double bound = (c_hat > 0.0 ? c_hat : 0.0) / std::log(static_cast<double>(stage) + 1.0);
  return {bound, next};
}

double BoundStrategy::bound(std::size_t stage, std::span<const double> block,
                            std::uint64_t first_index, const Executor& exec) {
  return std::visit(
      Overloaded{
          [&](const ScaleCouplingState& s) {
            return scale_coupled_bound(block, first_index, s, exec);
          },
          [&](const GeneralBoundState& s) {
            return general_parametric_bound(stage, block, first_index, s, exec);
          },
          [&](NonparametricState& s) {
            auto [c, next] = nonparametric_bound(s, stage, stage == 1 ? std::nullopt : last_y_);
            s = next;
            return c;
          },
      },
      state_);
}

void BoundStrategy::record(bool y) { last_y_ = y; }

std::string BoundStrategy::name() const {
  return std::visit(Overloaded{
                        [](const ScaleCouplingState&) { return std::string("valid-scale"); },
                        [](const GeneralBoundState&) { return std::string("general-parametric"); },
                        [](const NonparametricState&) { return std::string("nonparametric"); },
                    },
                    state_);
}

}  // namespace serconv
