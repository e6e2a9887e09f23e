#include <algorithm>
#include <cmath>
#include <cstring>
#include <vector>

#include "doctest.h"
#include "serconv/errors.hpp"
#include "serconv/series.hpp"

using namespace serconv;

namespace {

SeriesSpec make(Family f, ParamSchedule s, std::uint64_t seed = 5) {
  SeriesSpec spec;
  spec.family = f;
  spec.schedule = s;
  spec.secondary = s;
  spec.seed = seed;
  return spec;
}

std::vector<double> take(SeriesStream& s, std::size_t n, int workers = 1) {
  std::vector<double> v(n);
  CHECK(s.read(v, Executor(workers)) == n);
  return v;
}

bool same_bytes(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("schedules") {
  const auto p = ParamSchedule::power_law(1.5);
  CHECK(p.value(1) == 1.0);
  CHECK(p.value(4) == doctest::Approx(0.125));
  const auto g = ParamSchedule::geometric(2.0);
  CHECK(g.value(3) == doctest::Approx(0.125));
  CHECK_THROWS_AS(ParamSchedule::geometric(0.0), DomainError);
  CHECK(parse_family("hier-exp") == Family::HierExponential);
  CHECK(parse_family(to_string(Family::StateSpaceHierExp)) == Family::StateSpaceHierExp);
  CHECK_THROWS_AS(parse_family("cauchy"), ConfigError);
}

TEST_CASE("deterministic Dirichlet at p = 1/2 is the harmonic series") {
  SeriesStream s(make(Family::DeterministicDirichlet, ParamSchedule::power_law(0.5)));
  const auto v = take(s, 1000);
  for (std::size_t i = 1; i <= v.size(); ++i) {
    CHECK(v[i - 1] == doctest::Approx(1.0 / static_cast<double>(i)).epsilon(1e-14));
  }
}

TEST_CASE("random Dirichlet summands have unit magnitude after rescaling") {
  SeriesStream s(make(Family::RandomDirichlet, ParamSchedule::power_law(0.75), 42));
  const auto v = take(s, 100000);
  std::size_t positive = 0;
  for (std::size_t i = 1; i <= v.size(); ++i) {
    CHECK(std::abs(v[i - 1]) * std::pow(static_cast<double>(i), 0.75) ==
          doctest::Approx(1.0).epsilon(1e-12));
    positive += v[i - 1] > 0;
  }
  // sign frequency 1/2 within 3 standard errors
  const double n = static_cast<double>(v.size());
  CHECK(std::abs(static_cast<double>(positive) / n - 0.5) < 3.0 * 0.5 / std::sqrt(n));
}

TEST_CASE("state-space summands are positive and bounded") {
  SeriesSpec spec = make(Family::StateSpaceExp, ParamSchedule::power_law(1.5), 3);
  spec.epsilon_prime = 0.001;
  SeriesStream s(spec);
  const auto& sp = s.state_params();
  const double lo = spec.epsilon_prime, hi = lo + 1.0;
  for (double v : {sp.z0, sp.alpha, sp.beta, sp.rho}) {
    CHECK(v >= lo);
    CHECK(v <= hi);
  }
  REQUIRE(sp.rho < 1.0);
  const double z_max = std::max(sp.z0, hi / (1.0 - sp.rho));
  const double x_max = sp.alpha + sp.beta * z_max + hi;

  const auto y = take(s, 50000);
  const CounterRng rng(spec.seed);
  for (std::size_t k = 0; k < y.size(); ++k) {
    const std::uint64_t i = k + 1;
    CHECK(y[k] > 0.0);
    const double theta = rng.exponential(spec.schedule.value(i), StreamTag::StateTheta, i);
    const double x = y[k] / theta;
    CHECK(x > 2.0 * lo);
    CHECK(x <= x_max * (1.0 + 1e-12));
  }
}

TEST_CASE("truncated normal draws") {
  CHECK_THROWS_AS(truncated_normal_quantile(1.0, 1.0, 0.5), DomainError);
  CHECK_THROWS_AS(truncated_normal_quantile(2.0, 1.0, 0.5), DomainError);
  CHECK(truncated_normal_quantile(-1.0, 1.0, 0.5) == doctest::Approx(0.0).epsilon(1e-15));

  const CounterRng rng(9);
  constexpr int n = 100000;
  double wide = 0.0, half = 0.0;
  bool inside = true;
  for (int i = 0; i < n; ++i) {
    wide += truncated_normal_draw(-1e6, 1e6, rng, StreamTag::StateInnovation, i);
    half += truncated_normal_draw(0.0, 1e6, rng, StreamTag::StateObservation, i);
    const double t = truncated_normal_draw(0.001, 1.001, rng, StreamTag::StateInit, i);
    inside = inside && t >= 0.001 && t <= 1.001;
  }
  CHECK(inside);
  CHECK(std::abs(wide / n) < 0.01);
  CHECK(std::abs(half / n - std::sqrt(2.0 / M_PI)) < 0.01);

  // far upper tail keeps its precision
  const double tail = truncated_normal_quantile(30.0, 31.0, 0.5);
  CHECK(tail > 30.0);
  CHECK(tail < 30.1);
}

TEST_CASE("identical specs give identical streams") {
  for (Family f : {Family::HierExponential, Family::HierNormal, Family::DepNormal,
                   Family::StateSpaceExp, Family::StateSpaceHierExp, Family::RandomDirichlet}) {
    CAPTURE(to_string(f));
    SeriesStream a(make(f, ParamSchedule::power_law(1.2), 77));
    SeriesStream b(make(f, ParamSchedule::power_law(1.2), 77));
    CHECK(same_bytes(take(a, 1000000, 1), take(b, 1000000, 4)));
  }
}

TEST_CASE("summand i does not depend on how the stream was consumed") {
  for (Family f : {Family::HierExponential, Family::DepNormal, Family::StateSpaceHierExp}) {
    CAPTURE(to_string(f));
    const SeriesSpec spec = make(f, ParamSchedule::power_law(0.8), 123);
    SeriesStream whole(spec);
    const auto ref = take(whole, 30000, 3);

    SeriesStream pieces(spec);
    std::vector<double> got;
    for (std::size_t len : {1u, 4095u, 4097u, 7u, 21800u}) {
      const auto part = take(pieces, len, len % 2 ? 2 : 8);
      got.insert(got.end(), part.begin(), part.end());
    }
    CHECK(same_bytes(got, ref));
    CHECK(pieces.next_index() == 30001);
  }
  SeriesStream one(make(Family::RandomDirichlet, ParamSchedule::power_law(1.0), 1));
  const double first = one.next_summand();
  SeriesStream again(make(Family::RandomDirichlet, ParamSchedule::power_law(1.0), 1));
  CHECK(take(again, 1)[0] == first);
}

TEST_CASE("hierarchical exponential marginal mean equals psi_i") {
  // X_i at a fixed index over independent seeds; E X = psi, Var X = 3 psi^2.
  constexpr int n = 100000;
  const auto sched = ParamSchedule::power_law(1.0);
  const std::uint64_t i = 4;
  double sum = 0.0;
  for (int s = 0; s < n; ++s) {
    SeriesStream stream(make(Family::HierExponential, sched, static_cast<std::uint64_t>(s)));
    std::vector<double> v(i);
    stream.read(v, Executor(1));
    sum += v[i - 1];
  }
  const double psi = sched.value(i);
  CHECK(std::abs(sum / n - psi) < 3.0 * std::sqrt(3.0) * psi / std::sqrt(double(n)));
}

TEST_CASE("dependent normal squares are positively correlated through xi") {
  constexpr int n = 100000;
  std::vector<double> a(n), b(n);
  for (int s = 0; s < n; ++s) {
    SeriesStream stream(make(Family::DepNormal, ParamSchedule::power_law(1.0),
                             static_cast<std::uint64_t>(s)));
    std::vector<double> v(2);
    stream.read(v, Executor(1));
    a[s] = v[0] * v[0];
    b[s] = v[1] * v[1];
  }
  double ma = 0, mb = 0;
  for (int s = 0; s < n; ++s) {
    ma += a[s];
    mb += b[s];
  }
  ma /= n;
  mb /= n;
  double cov = 0, va = 0, vb = 0;
  for (int s = 0; s < n; ++s) {
    cov += (a[s] - ma) * (b[s] - mb);
    va += (a[s] - ma) * (a[s] - ma);
    vb += (b[s] - mb) * (b[s] - mb);
  }
  const double corr = cov / std::sqrt(va * vb);
  // 3 standard errors of a null correlation
  CHECK(corr > 3.0 / std::sqrt(double(n)));
}

TEST_CASE("spec validation") {
  SeriesSpec bad = make(Family::RandomDirichlet, ParamSchedule::geometric(2.0));
  CHECK_THROWS_AS(bad.validate(), DomainError);
  SeriesSpec ss = make(Family::StateSpaceExp, ParamSchedule::power_law(2.0));
  ss.epsilon_prime = 0.0;
  CHECK_THROWS_AS(SeriesStream{ss}, DomainError);
}
