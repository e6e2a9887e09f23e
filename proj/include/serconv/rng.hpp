#pragma once

// Counter-based random numbers.
//
// Every draw is a pure function of (seed, tag, index, draw). Nothing is
// carried from one call to the next, so a summand at index i is the same
// whether it is produced first, last, or by another worker.

#include <array>
#include <cstdint>

namespace serconv {

/// Philox4x32 with 10 rounds (Salmon et al., SC'11).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter ctr, Key key) noexcept;
};

/// Stream tags. Each latent quantity of each family gets its own tag so
/// that no two quantities ever share a uniform.
enum class StreamTag : std::uint32_t {
  HierTheta = 1,
  HierX = 2,
  NormalMean = 3,
  NormalVariance = 4,
  NormalNoise = 5,
  DepScale = 6,
  StateInit = 7,
  StateIntercept = 8,
  StateSlope = 9,
  StateRho = 10,
  StateInnovation = 11,
  StateObservation = 12,
  StateTheta = 13,
  StateHierScale = 14,
  DirichletSign = 15,

  CouplingStar = 100,
  SurrogateMean = 101,
  SurrogateVariance = 102,
  SurrogateNoise = 103,
  SurrogateSign = 104,
};

class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t seed = 0) noexcept : seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  /// Uniform on the open interval (0, 1), 53 bits of resolution.
  double uniform(StreamTag tag, std::uint64_t index, std::uint32_t draw = 0) const noexcept;

  /// Standard normal by inversion of the uniform at the same key.
  double normal(StreamTag tag, std::uint64_t index, std::uint32_t draw = 0) const;

  /// Exponential with the given mean, as -mean * log(U).
  double exponential(double mean, StreamTag tag, std::uint64_t index,
                     std::uint32_t draw = 0) const noexcept;

 private:
  std::uint64_t seed_;
};

/// Standard normal quantile, accurate into the far tails.
double normal_quantile(double u);

/// Standard normal cdf and survival function.
double normal_cdf(double x);
double normal_sf(double x);

}  // namespace serconv
