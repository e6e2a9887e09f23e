#include "serconv/rng.hpp"

#include <cmath>

#include <boost/math/special_functions/erf.hpp>

namespace serconv {
namespace {

constexpr std::uint32_t kMulA = 0xD2511F53u;
constexpr std::uint32_t kMulB = 0xCD9E8D57u;
constexpr std::uint32_t kWeylA = 0x9E3779B9u;
constexpr std::uint32_t kWeylB = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}

constexpr double kTwoPow53Inv = 1.0 / 9007199254740992.0;

}  // namespace

Philox4x32::Counter Philox4x32::generate(Counter ctr, Key key) noexcept {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMulA, ctr[0], hi0, lo0);
    mulhilo(kMulB, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeylA;
    key[1] += kWeylB;
  }
  return ctr;
}

double CounterRng::uniform(StreamTag tag, std::uint64_t index, std::uint32_t draw) const noexcept {
  const Philox4x32::Counter ctr = {static_cast<std::uint32_t>(index),
                                   static_cast<std::uint32_t>(index >> 32),
                                   static_cast<std::uint32_t>(tag), draw};
  const Philox4x32::Key key = {static_cast<std::uint32_t>(seed_),
                               static_cast<std::uint32_t>(seed_ >> 32)};
  const auto out = Philox4x32::generate(ctr, key);
  const std::uint64_t bits = (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
  // Midpoint of one of 2^53 equal cells: never 0, never 1.
  return (static_cast<double>(bits >> 11) + 0.5) * kTwoPow53Inv;
}

double CounterRng::normal(StreamTag tag, std::uint64_t index, std::uint32_t draw) const {
  return normal_quantile(uniform(tag, index, draw));
}

double CounterRng::exponential(double mean, StreamTag tag, std::uint64_t index,
                               std::uint32_t draw) const noexcept {
  return -mean * std::log(uniform(tag, index, draw));
}

double normal_quantile(double u) {
  // Phi^{-1}(u) = -sqrt(2) erfc^{-1}(2u); working on the smaller tail keeps
  // the relative accuracy of u near 1.
  if (u > 0.5) {
    return std::sqrt(2.0) * boost::math::erfc_inv(2.0 * (1.0 - u));
  }
  return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * u);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_sf(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

}  // namespace serconv
