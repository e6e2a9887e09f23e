#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <vector>

#include "serconv/bounds.hpp"
#include "serconv/climate.hpp"
#include "serconv/errors.hpp"
#include "serconv/harness.hpp"
#include "serconv/oracle.hpp"
#include "serconv/posterior.hpp"

namespace py = pybind11;
using namespace serconv;

namespace {

ExperimentPlan plan_from_text(const std::string& text) {
  std::istringstream in(text);
  return ExperimentPlan::parse(in);
}

py::dict verdict_dict(const Verdict& v) {
  py::dict d;
  d["label"] = std::string(to_string(v.label));
  d["tail_mean"] = v.tail_mean;
  d["final_mean"] = v.final_mean;
  return d;
}

py::dict run(const std::string& text) {
  const ExperimentPlan plan = plan_from_text(text);
  PlanResult r;
  {
    py::gil_scoped_release release;
    r = run_plan(plan);
  }
  py::dict d = verdict_dict(r.run.verdict);
  d["id"] = r.id;
  std::vector<double> partial_sums, bounds, means, variances;
  std::vector<bool> indicators;
  for (const auto& s : r.run.stages) {
    partial_sums.push_back(s.partial_sum);
    bounds.push_back(s.bound);
    indicators.push_back(s.indicator);
    means.push_back(s.mean);
    variances.push_back(s.variance);
  }
  d["partial_sums"] = partial_sums;
  d["bounds"] = bounds;
  d["indicators"] = indicators;
  d["means"] = means;
  d["variances"] = variances;
  std::vector<std::string> artifacts;
  for (const auto& p : r.artifacts) artifacts.push_back(p.string());
  d["artifacts"] = artifacts;
  return d;
}

py::tuple oracle(const std::string& text) {
  const OracleVerdict v = classify_family(plan_from_text(text).spec);
  return py::make_tuple(std::string(to_string(v.label)), v.rationale);
}

py::dict calibrate(std::vector<double> c1_grid, std::vector<double> p_grid, std::size_t n_j,
                   std::size_t stages, double step, double floor, int workers) {
  CalibrationConfig cfg;
  cfg.c1_grid = std::move(c1_grid);
  cfg.p_grid = std::move(p_grid);
  cfg.stage = {n_j, stages};
  cfg.step = step;
  cfg.agreement_floor = floor;
  CalibrationResult r;
  {
    py::gil_scoped_release release;
    r = calibrate_c1(cfg, Executor(workers));
  }
  py::dict d;
  d["c1"] = r.c1;
  d["agreement"] = r.agreement;
  d["best_lo"] = r.best_lo;
  d["best_hi"] = r.best_hi;
  d["curve"] = r.curve;
  return d;
}

py::list sweep_values(std::vector<double> values, std::vector<double> thetas,
                      std::vector<double> c1s, std::size_t n_j, std::size_t stages, int workers) {
  ClimateSeries series;
  series.values = std::move(values);
  series.provenance = "python";
  SweepConfig cfg;
  cfg.stage = {n_j, stages};
  SweepReport report;
  {
    py::gil_scoped_release release;
    report = sweep_cells(series, thetas, c1s, cfg, Executor(workers));
  }
  py::list out;
  for (const auto& c : report.cells) {
    out.append(py::make_tuple(c.theta0, c.c1, std::string(to_string(c.verdict.label)),
                              c.verdict.tail_mean));
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_serconv, m) {
  m.doc() = "Bayesian convergence detector for infinite series";

  static py::exception<Error> base(m, "SerconvError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(base, e.what());
    }
  });

  m.def("run_plan", &run, py::arg("config"),
        "Run a plan given as 'key = value' text; returns the verdict and the trajectory.");
  m.def("normalize_plan", [](const std::string& text) { return plan_from_text(text).serialize(); },
        py::arg("config"));
  m.def("oracle", &oracle, py::arg("config"), "Analytic (label, rationale) for the plan's series.");
  m.def(
      "beta_posterior",
      [](std::size_t k, double sum_alpha, std::size_t sum_y) {
        const PosteriorMoments pm = beta_posterior(k, sum_alpha, sum_y);
        return py::make_tuple(pm.mean, pm.variance);
      },
      py::arg("k"), py::arg("sum_alpha"), py::arg("sum_y"));
  m.def(
      "posterior_trajectory",
      [](const std::vector<bool>& ys) {
        DetectorState state;
        for (bool y : ys) state.step(y);
        std::vector<std::pair<double, double>> out;
        for (const auto& pm : state.trajectory()) out.emplace_back(pm.mean, pm.variance);
        return out;
      },
      py::arg("indicators"));
  m.def(
      "classify",
      [](const std::vector<double>& means, double upper, double lower, double tail) {
        std::vector<PosteriorMoments> traj;
        for (double v : means) traj.push_back({v, 0.0});
        return verdict_dict(classify(traj, {upper, lower, tail}));
      },
      py::arg("means"), py::arg("upper") = 0.9, py::arg("lower") = 0.1, py::arg("tail") = 0.1);
  m.def("envelope_rate", &envelope_rate, py::arg("i"), py::arg("epsilon"));
  m.def("calibrate_c1", &calibrate, py::arg("c1_grid"), py::arg("p_grid"), py::arg("n_j") = 1000,
        py::arg("K") = 2000, py::arg("step") = 0.05, py::arg("floor") = 0.0,
        py::arg("workers") = 1);
  m.def("sweep", &sweep_values, py::arg("values"), py::arg("thetas"), py::arg("c1s"),
        py::arg("n_j"), py::arg("K"), py::arg("workers") = 1,
        "theta0 x c1 sweep over a temperature series; rows (theta0, c1, label, tail_mean).");
  m.def(
      "transform",
      [](std::vector<double> values, double theta0) {
        ClimateSeries series;
        series.values = std::move(values);
        return transform(series, theta0);
      },
      py::arg("values"), py::arg("theta0"));
}
