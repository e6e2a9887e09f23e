#pragma once

// Analytic convergence labels for the simulated families.

#include <string>

#include "serconv/posterior.hpp"
#include "serconv/series.hpp"

namespace serconv {

struct OracleVerdict {
  Label label = Label::Divergent;  // never Inconclusive
  std::string rationale;
};

/// sum_i psi_i < infinity for the schedule.
bool summable(const ParamSchedule& schedule) noexcept;

/// sum_i psi_i^2 < infinity for the schedule.
bool square_summable(const ParamSchedule& schedule) noexcept;

OracleVerdict classify_family(const SeriesSpec& spec);

/// E[theta 1{theta < R}] for theta ~ Exp(mean psi):
///   psi * [1 - exp(-R/psi) (1 + R/psi)].
double truncated_exp_mean(double psi, double R);

}  // namespace serconv
