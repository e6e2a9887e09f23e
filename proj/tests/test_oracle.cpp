#include <cmath>

#include "doctest.h"
#include "serconv/errors.hpp"
#include "serconv/oracle.hpp"
#include "serconv/rng.hpp"

using namespace serconv;

namespace {

SeriesSpec spec(Family f, ParamSchedule s, ParamSchedule s2 = ParamSchedule::power_law(2.0)) {
  SeriesSpec out;
  out.family = f;
  out.schedule = s;
  out.secondary = s2;
  return out;
}

}  // namespace

TEST_CASE("labels for the exponential families follow sum psi") {
  using P = ParamSchedule;
  CHECK(classify_family(spec(Family::HierExponential, P::power_law(2.0))).label == Label::Convergent);
  CHECK(classify_family(spec(Family::HierExponential, P::power_law(1.0))).label == Label::Divergent);
  CHECK(classify_family(spec(Family::HierExponential, P::geometric(1.5))).label == Label::Convergent);
  CHECK(classify_family(spec(Family::HierExponential, P::geometric(1.0))).label == Label::Divergent);
  CHECK(classify_family(spec(Family::StateSpaceExp, P::power_law(1.001))).label == Label::Convergent);
  CHECK(classify_family(spec(Family::StateSpaceHierExp, P::power_law(0.999))).label ==
        Label::Divergent);
  CHECK_FALSE(classify_family(spec(Family::HierExponential, P::power_law(3.0))).rationale.empty());
}

TEST_CASE("labels for the normal families need both schedules") {
  using P = ParamSchedule;
  CHECK(classify_family(spec(Family::HierNormal, P::power_law(2.0), P::power_law(0.5))).label ==
        Label::Divergent);
  CHECK(classify_family(spec(Family::HierNormal, P::power_law(1.5), P::power_law(1.5))).label ==
        Label::Convergent);
  // phi is a standard deviation: phi_i^2 = i^-1.6 is summable
  CHECK(classify_family(spec(Family::DepNormal, P::power_law(0.8), P::power_law(1.2))).label ==
        Label::Convergent);
  CHECK(classify_family(spec(Family::DepNormal, P::power_law(0.95), P::power_law(0.95))).label ==
        Label::Divergent);
}

TEST_CASE("labels for the Dirichlet families") {
  using P = ParamSchedule;
  CHECK(classify_family(spec(Family::RandomDirichlet, P::power_law(0.5))).label == Label::Divergent);
  CHECK(classify_family(spec(Family::RandomDirichlet, P::power_law(0.501))).label ==
        Label::Convergent);
  CHECK(classify_family(spec(Family::RandomDirichlet, P::power_law(0.0))).label == Label::Divergent);
  CHECK(classify_family(spec(Family::DeterministicDirichlet, P::power_law(0.5))).label ==
        Label::Divergent);
  CHECK(classify_family(spec(Family::DeterministicDirichlet, P::power_law(0.55))).label ==
        Label::Convergent);
}

TEST_CASE("deterministic Dirichlet partial sums agree with the labels") {
  for (double p : {0.3, 0.5, 0.6, 1.0}) {
    double s = 0.0;
    for (int i = 1; i <= 1000000; ++i) s += std::pow(double(i), -2.0 * p);
    const bool bounded = s < 10.0;  // harmonic sum at 1e6 terms is 14.39
    CHECK(bounded ==
          (classify_family(spec(Family::DeterministicDirichlet, ParamSchedule::power_law(p))).label ==
           Label::Convergent));
  }
}

TEST_CASE("truncated exponential mean") {
  CHECK(truncated_exp_mean(1.0, 1.0) == doctest::Approx(0.2642411177).epsilon(1e-9));
  CHECK(truncated_exp_mean(1.0, 50.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(truncated_exp_mean(2.0, 1.0) == doctest::Approx(0.1804080209).epsilon(1e-9));
  CHECK_THROWS_AS(truncated_exp_mean(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(truncated_exp_mean(1.0, -1.0), DomainError);
  // tiny R / psi keeps its relative precision: ~ R^2 / (2 psi)
  CHECK(truncated_exp_mean(1.0, 1e-6) == doctest::Approx(5e-13).epsilon(1e-5));
}

TEST_CASE("truncated exponential mean against Monte Carlo") {
  const CounterRng rng(99);
  constexpr int n = 1000000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double theta = rng.exponential(2.0, StreamTag::HierTheta, i);
    const double v = theta < 1.0 ? theta : 0.0;
    sum += v;
    sq += v * v;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sq / n - mean * mean) / n);
  CHECK(std::abs(mean - truncated_exp_mean(2.0, 1.0)) < 3.0 * se);
}

TEST_CASE("truncated exponential mean is at most min(psi, R) and increasing in R") {
  for (double psi : {0.01, 0.3, 1.0, 7.0}) {
    for (double r : {0.01, 0.5, 2.0, 30.0}) {
      const double m = truncated_exp_mean(psi, r);
      CHECK(m > 0.0);
      CHECK(m <= std::min(psi, r));
      CHECK(truncated_exp_mean(psi, r * 1.1) >= m);
      // R P(theta < R) dominates the partial mean
      CHECK(m <= r * -std::expm1(-r / psi) * (1.0 + 1e-12));
    }
  }
}
