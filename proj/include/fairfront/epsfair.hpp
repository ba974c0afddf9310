#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fairfront/common.hpp"
#include "fairfront/data.hpp"
#include "fairfront/model.hpp"
#include "fairfront/objectives.hpp"
#include "fairfront/pareto.hpp"

namespace fairfront {

// Augmented-Lagrangian settings for
//   min f1(x)  s.t.  |cov_i(x)| <= eps  for the constrained categories i.
// A binary attribute constrains its category-1 covariance; a multi-valued one
// constrains every category.
struct EpsSweepConfig {
  std::size_t n_thresholds = 100;
  double lambda_reg = 0.0;
  double stationarity_tolerance = 1e-5;
  double feasibility_tolerance = 1e-6;
  std::size_t max_outer_iterations = 60;
  std::size_t max_newton_iterations = 200;
  double penalty_initial = 10.0;
  double penalty_growth = 10.0;
  double penalty_max = 1e12;
  // Thresholds are cut into this many contiguous chains; each chain is
  // warm-started sequentially, chains run in parallel. Fixed so the output
  // does not depend on the worker count.
  std::size_t chains = 8;
  std::size_t workers = 1;

  void validate() const;
};

struct ConstrainedSolution {
  LinearModel model;
  double max_abs_covariance = 0;
  double stationarity = 0;
  std::size_t newton_iterations = 0;
  std::size_t gradient_evaluations = 0;
};

// Unconstrained minimizer of f1 (Newton, gradient norm <= 1e-6), then the
// largest |cov_i| at it. Throws NumericalError on non-convergence.
double epsilon_upper_bound(const Dataset& data, std::size_t attribute, double lambda_reg = 0.0,
                           LinearModel* minimizer = nullptr);

// Throws NumericalError carrying the final residuals when the tolerances in
// `cfg` are not met.
ConstrainedSolution solve_constrained(const Dataset& data, std::size_t attribute, double epsilon,
                                      const EpsSweepConfig& cfg, const std::optional<LinearModel>& warm_start = {});

struct EpsRecord {
  double epsilon = 0;
  bool ok = false;
  std::string message;
  std::optional<FrontPoint> point;
};

struct EpsSweepResult {
  ParetoFront front;
  std::vector<EpsRecord> records;  // one per threshold, in epsilon order
  double upper_bound = 0;
  std::size_t gradient_evaluations = 0;
};

// Solves at n_thresholds evenly spaced eps in [0, upper bound], evaluates
// `objectives` at each solution and filters dominated points. Failed
// thresholds are recorded and skipped; throws NumericalError if all fail.
EpsSweepResult sweep_front(const Dataset& data, std::size_t attribute, const ObjectiveSet& objectives,
                           const EpsSweepConfig& cfg);

}  // namespace fairfront
