#include <doctest.h>

#include "fairfront/metrics.hpp"
#include "fairfront/streaming.hpp"
#include "support.hpp"

using namespace fairfront;
using testing::vec;

namespace {

StreamConfig small_config() {
  StreamConfig cfg;
  cfg.objectives = {{ObjectiveKind::Logistic, "", 8.0, 0.0}, {ObjectiveKind::DisparateImpactBinary, "s", 8.0, 0.0}};
  cfg.pfsmg.smg.batches = {BatchSchedule{40, 1.0}};
  cfg.pfsmg.smg.step = {0.5, 1.0, 1};
  cfg.pfsmg.iterate_budget = 15;
  cfg.pfsmg.seed = 3;
  return cfg;
}

}  // namespace

TEST_SUITE("streaming") {
  TEST_CASE("rescaled models keep raw-space margins") {
    const auto raw = testing::random_dataset(30, 3, 1);
    const auto a = fit_scaling(raw.subset(std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9}));
    const auto b = fit_scaling(raw);
    const LinearModel x(vec({0.3, -1.2, 2.0}), 0.4);
    const LinearModel y = rescale_model(x, a, b);
    const Vector ma = margins(x, apply_scaling(raw, a));
    const Vector mb = margins(y, apply_scaling(raw, b));
    CHECK((ma - mb).cwiseAbs().maxCoeff() < 1e-12);
  }

  TEST_CASE("single batch equals a cold run") {
    const auto batch = generate_synthetic(300, 4);
    const auto cfg = small_config();
    const auto res = stream_run({batch}, cfg);
    REQUIRE(res.snapshots.size() == 1);

    auto data = std::make_shared<const Dataset>(apply_scaling(batch, fit_scaling(batch)));
    const ObjectiveSet objs(cfg.objectives, data);
    const auto cold = pfsmg_run(objs, cfg.pfsmg);
    REQUIRE(cold.front.size() == res.snapshots[0].size());
    for (std::size_t i = 0; i < cold.front.size(); ++i) CHECK(cold.front.points[i].x == res.snapshots[0].points[i].x);
  }

  TEST_CASE("updates accumulate data and record hypervolume") {
    const auto chunks = synthetic_chunks(3, 200, 5);
    REQUIRE(chunks.size() == 3);
    CHECK_FALSE(chunks[0] == chunks[1]);
    std::vector<std::size_t> seen;
    const auto res = stream_run(chunks, small_config(), [&](std::size_t u, const StreamState& s) {
      CHECK(u == seen.size());
      seen.push_back(s.raw.size());
    });
    CHECK(seen == std::vector<std::size_t>{200, 400, 600});
    CHECK(res.state.hypervolume_history.size() == 3);
    CHECK(res.state.sizes == seen);
    REQUIRE(res.state.reference);
    for (const auto& p : res.state.front.points) {
      CHECK(p.f == ObjectiveSet(small_config().objectives, std::make_shared<const Dataset>(res.state.normalized()))
                       .evaluate(p.x));
    }
  }

  TEST_CASE("empty batch cannot lose hypervolume") {
    auto cfg = small_config();
    cfg.pfsmg.cell_fraction = 0.0;
    const auto first = generate_synthetic(300, 6);
    auto state = stream_update(StreamState{}, first, cfg);
    const double before = state.hypervolume_history.back();
    const auto empty = first.subset(std::vector<std::size_t>{});
    state = stream_update(std::move(state), empty, cfg);
    CHECK(state.raw.size() == 300);
    CHECK(state.hypervolume_history.back() >= before - 1e-9);
  }

  TEST_CASE("schema mismatch is rejected") {
    const auto cfg = small_config();
    auto state = stream_update(StreamState{}, generate_synthetic(100, 1), cfg);
    const auto other = testing::random_dataset(50, 3, 1);
    CHECK_THROWS_AS(stream_update(std::move(state), other, cfg), DataError);
  }

  TEST_CASE("shards load in name order") {
    testing::TempDir dir("shards");
    const auto a = generate_synthetic(50, 1), b = generate_synthetic(60, 2);
    write_csv(b, dir.path / "part_b.csv");
    write_csv(a, dir.path / "part_a.csv");
    const auto shards = load_shards(dir.path, canonical_schema(a));
    REQUIRE(shards.size() == 2);
    CHECK(shards[0] == a);
    CHECK(shards[1] == b);
    CHECK_THROWS_AS(load_shards(dir.path / "none", canonical_schema(a)), DataError);
  }
}
