#include "fairfront/pfsmg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fairfront/metrics.hpp"
#include "parallel.hpp"

namespace fairfront {

namespace {

constexpr std::uint64_t kInitStream = 0x1417;
constexpr std::uint64_t kPerturbStream = 0xfe77;

struct Task {
  std::size_t source;
  std::size_t run;
};

double progress_hypervolume(const ParetoFront& front, const std::optional<Vector>& reference) {
  if (!reference) return std::numeric_limits<double>::quiet_NaN();
  ObjectiveValues inside;
  for (const auto& p : front.points) {
    if ((p.f.array() <= reference->array()).all()) inside.push_back(p.f);
  }
  return hypervolume(inside, *reference);
}

}  // namespace

void PfsmgConfig::validate(std::size_t objectives) const {
  if (initial_points < 1) throw ConfigError("pfsmg: initial_points must be >= 1");
  if (runs_per_point < 1) throw ConfigError("pfsmg: runs_per_point must be >= 1");
  if (iters_per_run < 1) throw ConfigError("pfsmg: iters_per_run must be >= 1");
  if (point_budget < 1) throw ConfigError("pfsmg: point_budget must be >= 1");
  if (iterate_budget < 1) throw ConfigError("pfsmg: iterate_budget must be >= 1");
  if (max_outer_iterations < 1) throw ConfigError("pfsmg: max_outer_iterations must be >= 1");
  if (!(perturbation_radius > 0.0)) throw ConfigError("pfsmg: perturbation_radius must be positive");
  if (!(init_scale > 0.0)) throw ConfigError("pfsmg: init_scale must be positive");
  smg.validate(objectives);
}

PfsmgResult pfsmg_run(const ObjectiveSet& objectives, const PfsmgConfig& config, const PfsmgOptions& options) {
  if (objectives.size() < 1) throw ConfigError("pfsmg: empty objective set");
  config.validate(objectives.size());
  const std::size_t dim = objectives.parameter_dim();
  if (options.reference && static_cast<std::size_t>(options.reference->size()) != objectives.size()) {
    throw ConfigError("pfsmg: reference point length differs from the number of objectives");
  }

  PfsmgResult result;

  // Initial list.
  std::vector<FrontPoint> start;
  if (options.start.empty()) {
    Rng rng(derive_seed(config.seed, {kInitStream}));
    std::normal_distribution<double> normal(0.0, config.init_scale);
    for (std::size_t i = 0; i < config.initial_points; ++i) {
      Vector p(static_cast<Eigen::Index>(dim));
      for (auto& v : p) v = normal(rng);
      start.push_back({LinearModel::from_params(std::move(p)), Vector(), 0});
    }
  } else {
    for (const auto& x : options.start) {
      if (x.params().size() != static_cast<Eigen::Index>(dim)) {
        throw ConfigError("pfsmg: starting point dimension differs from the objectives");
      }
      start.push_back({x, Vector(), 0});
    }
  }
  detail::parallel_for(start.size(), config.workers, [&](std::size_t i) { start[i].f = objectives.evaluate(start[i].x); });
  std::erase_if(start, [](const FrontPoint& p) { return !p.f.allFinite(); });
  ParetoFront list = filter_nondominated(std::move(start));
  if (list.empty()) throw NumericalError("pfsmg: no starting point has finite objective values");

  std::optional<Vector> reference = options.reference;
  if (!reference && (objectives.size() == 2 || objectives.size() == 3)) {
    // Frozen from the starting list so progress values are comparable.
    Vector lo = list.points.front().f, hi = lo;
    for (const auto& p : list.points) {
      lo = lo.cwiseMin(p.f);
      hi = hi.cwiseMax(p.f);
    }
    reference = hi;
    for (Eigen::Index i = 0; i < hi.size(); ++i) {
      const double range = hi[i] - lo[i];
      (*reference)[i] += range > 0.0 ? 0.1 * range : 0.1 * std::max(1.0, std::abs(hi[i]));
    }
  }
  result.reference = reference;

  for (std::size_t it = 0; it < config.max_outer_iterations; ++it) {
    // Copy, then perturb every point.
    std::vector<FrontPoint> work = list.points;
    {
      const std::size_t n = list.size();
      std::vector<std::vector<FrontPoint>> extra(n);
      for (std::size_t j = 0; j < n; ++j) {
        Rng rng(derive_seed(config.seed, {kPerturbStream, it, j}));
        extra[j] = perturb(list.points[j], config.perturbations_per_point, config.perturbation_radius, rng);
      }
      const std::size_t first_new = work.size();
      for (auto& e : extra) std::move(e.begin(), e.end(), std::back_inserter(work));
      detail::parallel_for(work.size() - first_new, config.workers,
                           [&](std::size_t i) { work[first_new + i].f = objectives.evaluate(work[first_new + i].x); });
    }

    // SMG runs from every point in the expanded list.
    std::vector<Task> tasks;
    tasks.reserve(work.size() * config.runs_per_point);
    for (std::size_t j = 0; j < work.size(); ++j) {
      for (std::size_t t = 0; t < config.runs_per_point; ++t) tasks.push_back({j, t});
    }
    std::vector<FrontPoint> children(tasks.size());
    std::vector<std::size_t> evals(tasks.size(), 0);
    std::vector<std::string> failures(tasks.size());
    detail::parallel_for(tasks.size(), config.workers, [&](std::size_t q) {
      const auto& parent = work[tasks[q].source];
      Rng rng(derive_seed(config.seed, {it, tasks[q].source, tasks[q].run}));
      try {
        auto run = smg_run(parent.x, objectives, config.smg, config.iters_per_run, rng, parent.iterate_count);
        evals[q] = run.gradient_evaluations;
        children[q] = {std::move(run.final_point), Vector(), parent.iterate_count + run.iterations};
        children[q].f = objectives.evaluate(children[q].x);
      } catch (const NumericalError& e) {
        failures[q] = e.what();
      }
    });
    for (auto e : evals) result.gradient_evaluations += e;
    for (const auto& msg : failures) {
      if (!msg.empty()) {
        result.error = "outer iteration " + std::to_string(it) + ": " + msg;
        result.front = list;
        result.outer_iterations = it;
        return result;
      }
    }

    // Children go first so that a child matching its parent exactly replaces
    // it in the duplicate rule and the lineage keeps advancing.
    std::move(work.begin(), work.end(), std::back_inserter(children));
    std::erase_if(children, [](const FrontPoint& p) { return !p.f.allFinite(); });
    list = density_thin(filter_nondominated(std::move(children)), config.cell_fraction);
    result.outer_iterations = it + 1;

    PfsmgProgress prog;
    prog.iteration = it + 1;
    prog.list_size = list.size();
    for (const auto& p : list.points) prog.max_iterate_count = std::max(prog.max_iterate_count, p.iterate_count);
    prog.hypervolume = progress_hypervolume(list, reference);
    result.progress.push_back(prog);
    if (options.on_progress) options.on_progress(prog);

    if (list.size() > config.point_budget || prog.max_iterate_count > config.iterate_budget) break;
  }
  result.front = std::move(list);
  return result;
}

}  // namespace fairfront
