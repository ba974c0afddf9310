#pragma once

#include <vector>

#include "fairfront/common.hpp"
#include "fairfront/data.hpp"
#include "fairfront/model.hpp"
#include "fairfront/objectives.hpp"

namespace fairfront {

struct MinNormOptions {
  double tolerance = 1e-8;
  std::size_t max_iterations = 10000;
};

struct MinNormResult {
  Vector weights;          // on the simplex
  Vector direction;        // sum_i weights_i g_i
  double kkt_residual = 0; // Frank-Wolfe gap |d|^2 - min_i <g_i, d>
  std::size_t iterations = 0;
};

// Minimum-norm point of the convex hull of `gradients`.
//
// m = 1 is trivial, m = 2 uses the closed form, m >= 3 runs Frank-Wolfe with
// away steps and exact line search on the Gram matrix, followed by an exact
// solve on the identified support. Degenerate problems (all gradients equal,
// all zero) return uniform weights. Throws ConfigError when m = 0 or the
// dimensions differ.
MinNormResult solve_minnorm(std::span<const Vector> gradients, const MinNormOptions& options = {});

// |d|^2 - min_i <g_i, d> for d = sum_i w_i g_i. Zero exactly at the optimum.
double minnorm_kkt_residual(std::span<const Vector> gradients, const Vector& weights);

// alpha_k = alpha0 * decay_factor^floor(k / decay_period)
struct StepSchedule {
  double alpha0 = 1.0;
  double decay_factor = 1.0;
  std::size_t decay_period = 1;

  double at(std::size_t k) const;
  void validate() const;
};

struct SmgSchedules {
  StepSchedule step;
  // One schedule per objective, or a single schedule shared by all.
  std::vector<BatchSchedule> batches{BatchSchedule{}};

  const BatchSchedule& batch_for(std::size_t objective) const;
  void validate(std::size_t objectives) const;
};

struct SmgStepResult {
  LinearModel next;
  Vector weights;
  double direction_norm = 0;
  std::size_t gradient_evaluations = 0;
};

// One stochastic multi-gradient step at iterate index k. Each objective draws
// its own batch; deterministic objectives use their exact gradient.
SmgStepResult smg_step(const LinearModel& x, const ObjectiveSet& objectives, const SmgSchedules& schedules,
                       std::size_t k, Rng& rng);

struct SmgRunResult {
  LinearModel final_point;
  std::size_t iterations = 0;
  std::size_t gradient_evaluations = 0;
};

// `iterations` sequential steps with iterate indices k0, k0+1, ... . Throws
// NumericalError when an iterate becomes non-finite.
SmgRunResult smg_run(const LinearModel& x0, const ObjectiveSet& objectives, const SmgSchedules& schedules,
                     std::size_t iterations, Rng& rng, std::size_t k0 = 0);

}  // namespace fairfront
