#pragma once

// Seeded generators for the random series families.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "serconv/parallel.hpp"
#include "serconv/rng.hpp"

namespace serconv {

/// Deterministic parameter sequence psi_i, i >= 1.
struct ParamSchedule {
  enum class Kind { PowerLaw, Geometric };

  Kind kind = Kind::PowerLaw;
  double parameter = 1.0;  // p for i^{-p}, q for q^{-i}

  static ParamSchedule power_law(double p) { return {Kind::PowerLaw, p}; }
  static ParamSchedule geometric(double q);

  /// log psi_i. Values are formed from the log so that psi_i and the
  /// envelope 1/r_i(eps) agree bit for bit when p == 1 + eps.
  double log_value(std::uint64_t i) const noexcept;
  double value(std::uint64_t i) const noexcept;

  std::string describe() const;
};

enum class Family {
  HierExponential,
  HierNormal,
  DepNormal,
  StateSpaceExp,
  StateSpaceHierExp,
  RandomDirichlet,
  DeterministicDirichlet,
};

std::string_view to_string(Family family) noexcept;
Family parse_family(std::string_view name);

struct SeriesSpec {
  Family family = Family::HierExponential;
  /// psi for the exponential families, phi (sd of mu_i) for the normal
  /// families, i^{-p} for the Dirichlet families.
  ParamSchedule schedule = ParamSchedule::power_law(2.0);
  /// vartheta (mean of sigma^2_i) for the normal families; unused otherwise.
  ParamSchedule secondary = ParamSchedule::power_law(2.0);
  double epsilon_prime = 0.001;
  std::uint64_t seed = 0;

  /// Exponent p of the Dirichlet families.
  double dirichlet_exponent() const noexcept { return schedule.parameter; }
  void validate() const;
  std::string describe() const;
};

/// Anything that yields summands X_1, X_2, ... in order.
class SummandSource {
 public:
  virtual ~SummandSource() = default;

  /// 1-based index of the next summand to be produced.
  virtual std::uint64_t next_index() const noexcept = 0;

  /// Fills as much of out as possible; returns the number written.
  virtual std::size_t read(std::span<double> out, const Executor& exec) = 0;
};

/// Standard normal conditioned on [lo, hi], by inversion of the truncated
/// cdf at u. Exact and uses exactly one uniform.
double truncated_normal_quantile(double lo, double hi, double u);

double truncated_normal_draw(double lo, double hi, const CounterRng& rng, StreamTag tag,
                             std::uint64_t index);

/// Realisation of one SeriesSpec. Restarting with the same spec gives the
/// same values.
class SeriesStream final : public SummandSource {
 public:
  explicit SeriesStream(SeriesSpec spec);

  const SeriesSpec& spec() const noexcept { return spec_; }
  std::uint64_t next_index() const noexcept override { return cursor_; }

  double next_summand();
  std::size_t read(std::span<double> out, const Executor& exec) override;

  // Latent quantities fixed at stream creation (index-0 keys).
  double dependence_scale() const noexcept { return xi_; }
  struct StateParams {
    double z0, alpha, beta, rho;
  };
  const StateParams& state_params() const noexcept { return state_; }

 private:
  bool is_state_space() const noexcept;
  double pure_summand(std::uint64_t i) const;
  double state_observation(std::uint64_t i, double z) const;

  SeriesSpec spec_;
  CounterRng rng_;
  std::uint64_t cursor_ = 1;
  double xi_ = 1.0;
  StateParams state_{};
  double z_prev_ = 0.0;
  std::vector<double> z_buffer_;
};

}  // namespace serconv
