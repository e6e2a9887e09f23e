#include <cmath>
#include <set>

#include "doctest.h"
#include "serconv/rng.hpp"

using namespace serconv;

TEST_CASE("philox4x32-10 known answers") {
  using C = Philox4x32::Counter;
  using K = Philox4x32::Key;
  CHECK(Philox4x32::generate(C{0, 0, 0, 0}, K{0, 0}) ==
        C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(Philox4x32::generate(C{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                             K{0xffffffff, 0xffffffff}) ==
        C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(Philox4x32::generate(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                             K{0xa4093822, 0x299f31d0}) ==
        C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("uniforms stay inside the open unit interval") {
  const CounterRng rng(7);
  double lo = 1.0, hi = 0.0, sum = 0.0;
  constexpr int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform(StreamTag::HierX, static_cast<std::uint64_t>(i));
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  CHECK(lo > 0.0);
  CHECK(hi < 1.0);
  // mean 1/2, sd of the mean sqrt(1/12/n)
  CHECK(std::abs(sum / n - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST_CASE("draws are keyed by seed, tag, index and draw number") {
  const CounterRng a(1), b(2);
  CHECK(a.uniform(StreamTag::HierX, 5) == a.uniform(StreamTag::HierX, 5));
  CHECK(a.uniform(StreamTag::HierX, 5) != b.uniform(StreamTag::HierX, 5));
  CHECK(a.uniform(StreamTag::HierX, 5) != a.uniform(StreamTag::HierTheta, 5));
  CHECK(a.uniform(StreamTag::HierX, 5) != a.uniform(StreamTag::HierX, 6));
  CHECK(a.uniform(StreamTag::HierX, 5, 0) != a.uniform(StreamTag::HierX, 5, 1));
  // the high half of the index is part of the key
  CHECK(a.uniform(StreamTag::HierX, 1) != a.uniform(StreamTag::HierX, (1ull << 32) + 1));

  std::set<double> seen;
  for (std::uint64_t i = 0; i < 10000; ++i) seen.insert(a.uniform(StreamTag::HierX, i));
  CHECK(seen.size() == 10000);
}

TEST_CASE("normal quantile") {
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-13));
  CHECK(normal_quantile(0.025) == doctest::Approx(-1.959963984540054).epsilon(1e-13));
  CHECK(normal_quantile(1e-300) < -37.0);
  for (double x : {-8.0, -3.0, -1.0, -0.1, 0.3, 2.0}) {
    const double u = normal_cdf(x);
    CHECK(normal_quantile(u) == doctest::Approx(x).epsilon(1e-10));
  }
  // upper tail through the survival function, where 1 - u keeps its digits
  CHECK(normal_quantile(normal_sf(6.0)) == doctest::Approx(-6.0).epsilon(1e-10));
  CHECK(normal_cdf(1.3) + normal_sf(1.3) == doctest::Approx(1.0));
}

TEST_CASE("exponential draws have the requested mean") {
  const CounterRng rng(3);
  constexpr int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += rng.exponential(2.5, StreamTag::HierTheta, i);
  // sd of one draw equals its mean
  CHECK(std::abs(sum / n - 2.5) < 4.0 * 2.5 / std::sqrt(double(n)));
}
