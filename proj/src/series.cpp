#include "serconv/series.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "serconv/errors.hpp"

namespace serconv {

ParamSchedule ParamSchedule::geometric(double q) {
  if (!(q > 0.0)) throw DomainError("geometric schedule needs q > 0");
  return {Kind::Geometric, q};
}

double ParamSchedule::log_value(std::uint64_t i) const noexcept {
  const double id = static_cast<double>(i);
  if (kind == Kind::PowerLaw) return -parameter * std::log(id);
  return -id * std::log(parameter);
}

double ParamSchedule::value(std::uint64_t i) const noexcept { return std::exp(log_value(i)); }

std::string ParamSchedule::describe() const {
  std::ostringstream os;
  os.precision(12);
  if (kind == Kind::PowerLaw) {
    os << "i^-" << parameter;
  } else {
    os << parameter << "^-i";
  }
  return os.str();
}

std::string_view to_string(Family family) noexcept {
  switch (family) {
    case Family::HierExponential:
      return "hier-exp";
    case Family::HierNormal:
      return "hier-normal";
    case Family::DepNormal:
      return "dep-normal";
    case Family::StateSpaceExp:
      return "ss-exp";
    case Family::StateSpaceHierExp:
      return "ss-hier-exp";
    case Family::RandomDirichlet:
      return "rds";
    case Family::DeterministicDirichlet:
      break;
  }
  return "det-dirichlet";
}

Family parse_family(std::string_view name) {
  for (Family f : {Family::HierExponential, Family::HierNormal, Family::DepNormal,
                   Family::StateSpaceExp, Family::StateSpaceHierExp, Family::RandomDirichlet,
                   Family::DeterministicDirichlet}) {
    if (name == to_string(f)) return f;
  }
  throw ConfigError("unknown series family '" + std::string(name) + "'");
}

void SeriesSpec::validate() const {
  for (const ParamSchedule* s : {&schedule, &secondary}) {
    if (s->kind == ParamSchedule::Kind::Geometric && !(s->parameter > 0.0)) {
      throw DomainError("geometric schedule needs q > 0");
    }
    if (!std::isfinite(s->parameter)) throw DomainError("schedule parameter must be finite");
  }
  if ((family == Family::RandomDirichlet || family == Family::DeterministicDirichlet) &&
      schedule.kind != ParamSchedule::Kind::PowerLaw) {
    throw DomainError("Dirichlet families take a power-law exponent p");
  }
  if ((family == Family::StateSpaceExp || family == Family::StateSpaceHierExp) &&
      !(epsilon_prime > 0.0)) {
    throw DomainError("state-space families need epsilon' > 0");
  }
}

std::string SeriesSpec::describe() const {
  std::ostringstream os;
  os.precision(12);
  switch (family) {
    case Family::HierNormal:
    case Family::DepNormal:
      os << "phi=" << schedule.describe() << " vartheta=" << secondary.describe();
      break;
    case Family::RandomDirichlet:
    case Family::DeterministicDirichlet:
      os << "p=" << schedule.parameter;
      break;
    case Family::StateSpaceExp:
    case Family::StateSpaceHierExp:
      os << "psi=" << schedule.describe() << " eps'=" << epsilon_prime;
      break;
    case Family::HierExponential:
      os << "psi=" << schedule.describe();
      break;
  }
  os << " seed=" << seed;
  return os.str();
}

double truncated_normal_quantile(double lo, double hi, double u) {
  if (!(lo < hi)) throw DomainError("truncated normal needs lo < hi");
  double x;
  if (lo >= 0.0) {
    // Upper tail: invert the survival function to keep precision.
    const double s_lo = normal_sf(lo);
    const double s_hi = normal_sf(hi);
    x = -normal_quantile(s_lo - u * (s_lo - s_hi));
  } else {
    const double c_lo = normal_cdf(lo);
    const double c_hi = normal_cdf(hi);
    x = normal_quantile(c_lo + u * (c_hi - c_lo));
  }
  return std::clamp(x, lo, hi);
}

double truncated_normal_draw(double lo, double hi, const CounterRng& rng, StreamTag tag,
                             std::uint64_t index) {
  return truncated_normal_quantile(lo, hi, rng.uniform(tag, index));
}

SeriesStream::SeriesStream(SeriesSpec spec) : spec_(spec), rng_(spec.seed) {
  spec_.validate();
  xi_ = spec_.family == Family::DepNormal ? rng_.uniform(StreamTag::DepScale, 0) : 1.0;
  if (is_state_space()) {
    const double lo = spec_.epsilon_prime;
    auto draw = [&](StreamTag tag) { return lo + rng_.uniform(tag, 0); };
    state_ = {draw(StreamTag::StateInit), draw(StreamTag::StateIntercept),
              draw(StreamTag::StateSlope), draw(StreamTag::StateRho)};
    z_prev_ = state_.z0;
  }
}

bool SeriesStream::is_state_space() const noexcept {
  return spec_.family == Family::StateSpaceExp || spec_.family == Family::StateSpaceHierExp;
}

double SeriesStream::pure_summand(std::uint64_t i) const {
  switch (spec_.family) {
    case Family::HierExponential: {
      const double theta = rng_.exponential(spec_.schedule.value(i), StreamTag::HierTheta, i);
      return rng_.exponential(theta, StreamTag::HierX, i);
    }
    case Family::HierNormal:
    case Family::DepNormal: {
      const double mu = spec_.schedule.value(i) * rng_.normal(StreamTag::NormalMean, i);
      const double var =
          rng_.exponential(spec_.secondary.value(i), StreamTag::NormalVariance, i);
      return mu + std::sqrt(xi_ * var) * rng_.normal(StreamTag::NormalNoise, i);
    }
    case Family::RandomDirichlet: {
      const double sign = rng_.uniform(StreamTag::DirichletSign, i) < 0.5 ? -1.0 : 1.0;
      return sign * spec_.schedule.value(i);
    }
    case Family::DeterministicDirichlet:
      return std::exp(2.0 * spec_.schedule.log_value(i));
    case Family::StateSpaceExp:
    case Family::StateSpaceHierExp:
      break;
  }
  throw DomainError("state-space summands depend on the latent path");
}

double SeriesStream::state_observation(std::uint64_t i, double z) const {
  const double lo = spec_.epsilon_prime;
  const double hi = lo + 1.0;
  const double x = state_.alpha + state_.beta * z +
                   truncated_normal_draw(lo, hi, rng_, StreamTag::StateObservation, i);
  double theta;
  if (spec_.family == Family::StateSpaceExp) {
    theta = rng_.exponential(spec_.schedule.value(i), StreamTag::StateTheta, i);
  } else {
    const double scale = rng_.exponential(spec_.schedule.value(i), StreamTag::StateHierScale, i);
    theta = rng_.exponential(scale, StreamTag::StateTheta, i);
  }
  return x * theta;
}

double SeriesStream::next_summand() {
  double value = 0.0;
  read(std::span<double>(&value, 1), Executor(1));
  return value;
}

std::size_t SeriesStream::read(std::span<double> out, const Executor& exec) {
  const std::size_t n = out.size();
  const std::uint64_t first = cursor_;
  if (!is_state_space()) {
    exec.for_chunks(n, [&](std::size_t begin, std::size_t end, std::size_t) {
      for (std::size_t k = begin; k < end; ++k) out[k] = pure_summand(first + k);
    });
  } else {
    // Innovations are index-keyed and drawn in parallel; the AR recursion
    // itself runs serially; observations go back to the workers.
    const double lo = spec_.epsilon_prime;
    const double hi = lo + 1.0;
    z_buffer_.resize(n);
    exec.for_chunks(n, [&](std::size_t begin, std::size_t end, std::size_t) {
      for (std::size_t k = begin; k < end; ++k) {
        z_buffer_[k] = truncated_normal_draw(lo, hi, rng_, StreamTag::StateInnovation, first + k);
      }
    });
    double z = z_prev_;
    for (std::size_t k = 0; k < n; ++k) {
      z = state_.rho * z + z_buffer_[k];
      z_buffer_[k] = z;
    }
    z_prev_ = z;
    exec.for_chunks(n, [&](std::size_t begin, std::size_t end, std::size_t) {
      for (std::size_t k = begin; k < end; ++k) out[k] = state_observation(first + k, z_buffer_[k]);
    });
  }
  cursor_ += n;
  return n;
}

}  // namespace serconv
