#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

#include "fairfront/data.hpp"
#include "fairfront/objectives.hpp"
#include "fairfront/pareto.hpp"
#include "fairfront/pfsmg.hpp"

namespace fairfront {

struct StreamConfig {
  std::vector<ObjectiveDescriptor> objectives;
  PfsmgConfig pfsmg;
  std::size_t start_count = 5;
  // Refit z-score statistics on the cumulative data at every update.
  bool normalize = true;
  double reference_margin = 0.1;
};

// Cumulative raw data plus the current front, whose models live in the space
// normalized by `scaling`.
struct StreamState {
  Dataset raw;
  FeatureScaling scaling;
  ParetoFront front;
  std::optional<Vector> reference;
  std::vector<double> hypervolume_history;
  std::vector<std::size_t> sizes;
  std::size_t updates = 0;
  std::size_t gradient_evaluations = 0;

  // Normalized cumulative data the front is evaluated on.
  Dataset normalized() const;
};

// Re-expresses a model fitted on data normalized with `from` so that it gives
// the same margins on data normalized with `to`.
LinearModel rescale_model(const LinearModel& x, const FeatureScaling& from, const FeatureScaling& to);

// Appends `batch` (raw features), refreshes the scaling, re-evaluates the
// current front, warm-starts PF-SMG from start_count downsampled points and
// keeps the nondominated union of old and new points. The first update is a
// cold run. Throws DataError on schema mismatch; propagates PF-SMG errors.
StreamState stream_update(StreamState state, const Dataset& batch, const StreamConfig& config);

struct StreamResult {
  std::vector<ParetoFront> snapshots;
  StreamState state;
};

// One update per batch; `on_snapshot(u, state)` is called after each.
StreamResult stream_run(const std::vector<Dataset>& batches, const StreamConfig& config,
                        const std::function<void(std::size_t, const StreamState&)>& on_snapshot = {});

// CSV shards in lexicographic file-name order, loaded with `schema` (its
// normalize flag is ignored; streaming normalizes itself).
std::vector<Dataset> load_shards(const std::filesystem::path& dir, CsvSchema schema);

// `count` synthetic chunks of `chunk_size` samples; chunk u uses a seed
// derived from (seed, u).
std::vector<Dataset> synthetic_chunks(std::size_t count, std::size_t chunk_size, std::uint64_t seed,
                                      const SyntheticParams& params = {});

}  // namespace fairfront
