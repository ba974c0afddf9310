#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fairfront/common.hpp"
#include "fairfront/objectives.hpp"
#include "fairfront/pareto.hpp"
#include "fairfront/smg.hpp"

namespace fairfront {

struct PfsmgConfig {
  std::size_t initial_points = 5;
  std::size_t perturbations_per_point = 2;  // r
  std::size_t runs_per_point = 3;           // SMG runs appended per list point
  std::size_t iters_per_run = 2;            // SMG iterations in each run
  std::size_t point_budget = 1500;
  std::size_t iterate_budget = 1000;
  double perturbation_radius = 0.1;
  double cell_fraction = 1.0 / 200.0;  // <= 0 disables thinning
  // Standard deviation of the random initial parameters.
  double init_scale = 1.0;
  // Hard cap on outer iterations in case neither budget is ever reached.
  std::size_t max_outer_iterations = 100000;
  std::uint64_t seed = 1;
  // 0 picks the hardware concurrency.
  std::size_t workers = 1;
  SmgSchedules smg;

  void validate(std::size_t objectives) const;
};

struct PfsmgProgress {
  std::size_t iteration = 0;
  std::size_t list_size = 0;
  std::size_t max_iterate_count = 0;
  double hypervolume = 0.0;  // NaN for m > 3
};

struct PfsmgResult {
  ParetoFront front;
  std::size_t outer_iterations = 0;
  std::size_t gradient_evaluations = 0;
  std::vector<PfsmgProgress> progress;
  // Reference used for the progress hypervolume.
  std::optional<Vector> reference;
  // Set when an SMG trajectory aborted; `front` then holds the last list.
  std::optional<std::string> error;
};

struct PfsmgOptions {
  // Starting list (decision vectors only); random points when empty.
  std::vector<LinearModel> start;
  // Fixed reference for the progress hypervolume (m = 2 or 3). When absent it
  // is frozen from the starting list: max + 10% of the range.
  std::optional<Vector> reference;
  std::function<void(const PfsmgProgress&)> on_progress;
};

// Runs the perturb / SMG / filter / thin loop until the list exceeds the
// point budget or some lineage exceeds the iterate budget. Trajectory RNG
// streams depend only on (seed, iteration, point, run), so the front does
// not depend on the worker count.
PfsmgResult pfsmg_run(const ObjectiveSet& objectives, const PfsmgConfig& config, const PfsmgOptions& options = {});

}  // namespace fairfront
