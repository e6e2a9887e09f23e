#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "serconv/errors.hpp"
#include "serconv/posterior.hpp"

using namespace serconv;

namespace {

// Closed form from scratch: Beta(A + s, k + A - s), A = sum_{j<=k} 1/j^2.
PosteriorMoments closed_form(std::size_t k, std::size_t s) {
  long double a = 0.0L;
  for (std::size_t j = k; j >= 1; --j) a += 1.0L / (static_cast<long double>(j) * j);
  const long double al = a + s;
  const long double be = k + a - s;
  const long double n = al + be;
  return {static_cast<double>(al / n), static_cast<double>(al * be / (n * n * (n + 1)))};
}

}  // namespace

TEST_CASE("first stages by hand") {
  DetectorState d;
  d.step(true);
  CHECK(d.trajectory()[0].mean == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(d.trajectory()[0].variance == doctest::Approx(1.0 / 18.0).epsilon(1e-15));
  d.step(true);
  CHECK(d.trajectory()[1].mean == doctest::Approx(3.25 / 4.5).epsilon(1e-15));

  DetectorState z;
  z.step(false);
  z.step(false);
  CHECK(z.trajectory()[1].mean == doctest::Approx(1.25 / 4.5).epsilon(1e-15));
  CHECK(z.sum_alpha() == doctest::Approx(1.25));
  CHECK(z.sum_y() == 0);
  CHECK(z.stages() == 2);
}

TEST_CASE("beta_posterior agrees with the recursion") {
  const auto m = beta_posterior(2, 1.25, 1);
  CHECK(m.mean == doctest::Approx(2.25 / 4.5));
  CHECK(m.variance == doctest::Approx(2.25 * 2.25 / (4.5 * 4.5 * 5.5)));
}

TEST_CASE("recursion matches the closed form on random indicator sequences") {
  std::mt19937_64 gen(20240611);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t len = 1 + gen() % 3000;
    const double p1 = std::uniform_real_distribution<double>(0, 1)(gen);
    std::bernoulli_distribution coin(p1);
    DetectorState d;
    std::size_t s = 0;
    for (std::size_t k = 1; k <= len; ++k) {
      const bool y = coin(gen);
      s += y;
      d.step(y);
      if (k % 97 == 0 || k == len) {
        const auto ref = closed_form(k, s);
        CHECK(std::abs(d.trajectory().back().mean - ref.mean) < 1e-12);
        CHECK(std::abs(d.trajectory().back().variance - ref.variance) < 1e-12);
      }
    }
  }
}

TEST_CASE("posterior mean moves toward the observed indicator") {
  DetectorState up, down;
  for (int k = 0; k < 10; ++k) {
    up.step(true);
    down.step(false);
  }
  for (std::size_t k = 1; k < up.trajectory().size(); ++k) {
    CHECK(up.trajectory()[k].mean > up.trajectory()[k - 1].mean);
    CHECK(down.trajectory()[k].mean < down.trajectory()[k - 1].mean);
  }
  DetectorState ones;
  for (int k = 0; k < 100000; ++k) ones.step(true);
  CHECK(ones.trajectory().back().mean > 0.9999);
}

TEST_CASE("classify averages the tail window") {
  std::vector<PosteriorMoments> t(10, {0.5, 0.0});
  t[9].mean = 0.95;
  // window = ceil(0.1 * 10) = 1
  CHECK(classify(t).label == Label::Convergent);
  CHECK(classify(t).tail_mean == doctest::Approx(0.95));
  t[9].mean = 0.1;
  CHECK(classify(t).label == Label::Divergent);
  t[9].mean = 0.5;
  CHECK(classify(t).label == Label::Inconclusive);

  std::vector<PosteriorMoments> u(20, {0.0, 0.0});
  u[18].mean = 1.0;
  u[19].mean = 0.875;  // window 2
  CHECK(classify(u).label == Label::Convergent);
  CHECK(classify(u).tail_mean == 0.9375);
  CHECK(classify(u).final_mean == 0.875);
  u[18].mean = 0.875;
  u[19].mean = 0.875;
  CHECK(classify(u).label == Label::Inconclusive);

  CHECK_THROWS_AS(classify(std::vector<PosteriorMoments>{}), DomainError);
}

TEST_CASE("labels round-trip") {
  for (Label l : {Label::Convergent, Label::Divergent, Label::Inconclusive}) {
    CHECK(parse_label(to_string(l)) == l);
  }
  CHECK_THROWS_AS(parse_label("maybe"), ConfigError);
}

TEST_CASE("stage config validation") {
  CHECK_THROWS(StageConfig{0, 10}.validate());
  CHECK_THROWS(StageConfig{10, 0}.validate());
  CHECK(StageConfig{1000, 2000}.total_summands() == 2000000u);
}
