#include "fairfront/streaming.hpp"

#include <algorithm>

#include "fairfront/metrics.hpp"

namespace fairfront {

namespace {

double clipped_hypervolume(const ParetoFront& front, const Vector& reference) {
  ObjectiveValues inside;
  for (const auto& p : front.points) {
    if ((p.f.array() <= reference.array()).all()) inside.push_back(p.f);
  }
  return hypervolume(inside, reference);
}

}  // namespace

Dataset StreamState::normalized() const { return apply_scaling(raw, scaling); }

LinearModel rescale_model(const LinearModel& x, const FeatureScaling& from, const FeatureScaling& to) {
  // margin = c . (z - mu) / s + b
  const Vector c_raw = x.weights().cwiseQuotient(from.scale);
  const double b_raw = x.intercept() - c_raw.dot(from.mean);
  const Vector c_new = c_raw.cwiseProduct(to.scale);
  const double b_new = b_raw + c_raw.dot(to.mean);
  return LinearModel(c_new, b_new);
}

StreamState stream_update(StreamState state, const Dataset& batch, const StreamConfig& config) {
  if (state.updates == 0) {
    if (batch.empty()) throw DataError("stream_update: the first batch is empty");
    state.raw = batch;
  } else {
    if (!state.raw.same_schema(batch)) throw DataError("stream_update: batch schema differs from the stream");
    if (!batch.empty()) state.raw = state.raw.concat(batch);
  }

  const FeatureScaling old_scaling = state.scaling;
  state.scaling = config.normalize ? fit_scaling(state.raw) : FeatureScaling::identity(state.raw.feature_dim());
  auto data = std::make_shared<const Dataset>(state.normalized());
  const ObjectiveSet objectives(config.objectives, data);

  // Old front re-expressed and re-evaluated on the cumulative data.
  std::vector<FrontPoint> carried;
  for (const auto& p : state.front.points) {
    FrontPoint q{rescale_model(p.x, old_scaling, state.scaling), Vector(), 0};
    q.f = objectives.evaluate(q.x);
    if (q.f.allFinite()) carried.push_back(std::move(q));
  }
  ParetoFront old_front = filter_nondominated(std::move(carried));

  PfsmgConfig pcfg = config.pfsmg;
  if (state.updates > 0) pcfg.seed = derive_seed(config.pfsmg.seed, {state.updates});
  PfsmgOptions opts;
  if (!old_front.empty()) {
    const std::size_t k = std::min(config.start_count, old_front.size());
    const ParetoFront seeds = k >= 2 ? downsample(old_front, k) : old_front;
    for (const auto& p : seeds.points) opts.start.push_back(p.x);
  }
  auto run = pfsmg_run(objectives, pcfg, opts);
  if (run.error) throw NumericalError("stream update " + std::to_string(state.updates) + ": " + *run.error);
  state.gradient_evaluations += run.gradient_evaluations;

  std::vector<FrontPoint> merged = std::move(run.front.points);
  for (auto& p : old_front.points) merged.push_back(std::move(p));
  state.front = filter_nondominated(std::move(merged));

  if (!state.reference) {
    state.reference = hypervolume_reference({state.front.objective_values()}, config.reference_margin);
  }
  if (static_cast<std::size_t>(state.reference->size()) == objectives.size() &&
      (objectives.size() == 2 || objectives.size() == 3)) {
    state.hypervolume_history.push_back(clipped_hypervolume(state.front, *state.reference));
  }
  state.sizes.push_back(state.raw.size());
  ++state.updates;
  return state;
}

StreamResult stream_run(const std::vector<Dataset>& batches, const StreamConfig& config,
                        const std::function<void(std::size_t, const StreamState&)>& on_snapshot) {
  if (batches.empty()) throw ConfigError("stream_run: no batches");
  StreamResult res;
  for (std::size_t u = 0; u < batches.size(); ++u) {
    res.state = stream_update(std::move(res.state), batches[u], config);
    res.snapshots.push_back(res.state.front);
    if (on_snapshot) on_snapshot(u, res.state);
  }
  return res;
}

std::vector<Dataset> load_shards(const std::filesystem::path& dir, CsvSchema schema) {
  if (!std::filesystem::is_directory(dir)) throw DataError("shard directory not found: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end(), [](const auto& a, const auto& b) { return a.filename() < b.filename(); });
  if (files.empty()) throw DataError("no .csv shards in " + dir.string());
  schema.normalize = false;
  std::vector<Dataset> out;
  for (const auto& f : files) out.push_back(load_csv(f, schema));
  return out;
}

std::vector<Dataset> synthetic_chunks(std::size_t count, std::size_t chunk_size, std::uint64_t seed,
                                      const SyntheticParams& params) {
  std::vector<Dataset> out;
  for (std::size_t u = 0; u < count; ++u) out.push_back(generate_synthetic(chunk_size, derive_seed(seed, {u}), params));
  return out;
}

}  // namespace fairfront
