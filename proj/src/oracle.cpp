#include "serconv/oracle.hpp"

#include <cmath>

#include "serconv/errors.hpp"

namespace serconv {

bool summable(const ParamSchedule& schedule) noexcept {
  // i^{-p} needs p > 1; q^{-i} needs q > 1.
  return schedule.parameter > 1.0;
}

bool square_summable(const ParamSchedule& schedule) noexcept {
  if (schedule.kind == ParamSchedule::Kind::PowerLaw) return 2.0 * schedule.parameter > 1.0;
  return schedule.parameter > 1.0;
}

OracleVerdict classify_family(const SeriesSpec& spec) {
  spec.validate();
  const auto verdict = [](bool convergent, std::string why) {
    return OracleVerdict{convergent ? Label::Convergent : Label::Divergent, std::move(why)};
  };
  switch (spec.family) {
    case Family::HierExponential:
    case Family::StateSpaceExp:
    case Family::StateSpaceHierExp: {
      const bool ok = summable(spec.schedule);
      return verdict(ok, std::string("three-series: sum psi_i ") +
                             (ok ? "finite" : "infinite") + " for psi=" +
                             spec.schedule.describe());
    }
    case Family::HierNormal:
    case Family::DepNormal: {
      // Var(mu_i) = phi_i^2 and E sigma^2_i = vartheta_i; both sums must be
      // finite. Mixing over xi leaves the label unchanged.
      const bool means = square_summable(spec.schedule);
      const bool variances = summable(spec.secondary);
      std::string why = std::string("three-series: sum phi_i^2 ") +
                        (means ? "finite" : "infinite") + ", sum vartheta_i " +
                        (variances ? "finite" : "infinite");
      if (spec.family == Family::DepNormal) why += " (conditionally on xi)";
      return verdict(means && variances, why);
    }
    case Family::RandomDirichlet: {
      const bool ok = spec.dirichlet_exponent() > 0.5;
      return verdict(ok, std::string("three-series: random signs over i^p converge iff p > 1/2"));
    }
    case Family::DeterministicDirichlet: {
      const bool ok = 2.0 * spec.dirichlet_exponent() > 1.0;
      return verdict(ok, std::string("p-series: sum i^{-2p} converges iff 2p > 1"));
    }
  }
  throw Unsupported("no analytic label for this family");
}

double truncated_exp_mean(double psi, double R) {
  if (!(psi > 0.0) || !(R > 0.0)) throw DomainError("truncated_exp_mean needs psi > 0 and R > 0");
  const double t = R / psi;
  if (t < 0.1) {
    // 1 - e^{-t}(1 + t) = sum_{k>=2} (-1)^k (k - 1) t^k / k!
    double term = t;  // t^k / k! at k = 1
    double core = 0.0;
    for (int k = 2; k < 30; ++k) {
      term *= t / k;
      core += ((k % 2) ? -1.0 : 1.0) * (k - 1) * term;
    }
    return psi * core;
  }
  return psi * (-std::expm1(-t) - t * std::exp(-t));
}

}  // namespace serconv
