#include <doctest.h>

#include <random>

#include "fairfront/smg.hpp"
#include "support.hpp"

using namespace fairfront;
using testing::vec;

namespace {

// Brute force over the simplex on a grid of step h (m = 2 or 3).
double grid_min_norm(const std::vector<Vector>& g, double h) {
  const auto n = static_cast<int>(std::lround(1.0 / h));
  double best = std::numeric_limits<double>::infinity();
  if (g.size() == 2) {
    for (int i = 0; i <= n; ++i) {
      const double w = i * h;
      best = std::min(best, (w * g[0] + (1 - w) * g[1]).squaredNorm());
    }
  } else {
    for (int i = 0; i <= n; ++i) {
      for (int j = 0; i + j <= n; ++j) {
        const double a = i * h, b = j * h;
        best = std::min(best, (a * g[0] + b * g[1] + (1 - a - b) * g[2]).squaredNorm());
      }
    }
  }
  return best;
}

ObjectiveSet toy_pair() {
  return ObjectiveSet({std::make_shared<QuadraticObjective>(vec({1, 0})),
                       std::make_shared<QuadraticObjective>(vec({-1, 0}))});
}

}  // namespace

TEST_SUITE("smg") {
  TEST_CASE("min-norm closed-form cases") {
    std::vector<Vector> g = {vec({1, 0}), vec({0, 1})};
    auto r = solve_minnorm(g);
    CHECK(r.weights[0] == doctest::Approx(0.5));
    CHECK(r.direction[1] == doctest::Approx(0.5));
    g = {vec({1, 0}), vec({2, 0})};
    r = solve_minnorm(g);
    CHECK(r.weights[0] == 1.0);
    CHECK(r.weights[1] == 0.0);
    g = {vec({3, 1}), vec({3, 1})};
    r = solve_minnorm(g);
    CHECK(r.weights[0] == 0.5);
    g = {vec({0, 0}), vec({0, 0}), vec({0, 0})};
    r = solve_minnorm(g);
    for (int i = 0; i < 3; ++i) CHECK(r.weights[i] == doctest::Approx(1.0 / 3));
    CHECK_THROWS_AS(solve_minnorm(std::vector<Vector>{}), ConfigError);
    g = {vec({1, 0}), vec({1, 0, 0})};
    CHECK_THROWS_AS(solve_minnorm(g), ConfigError);
  }

  TEST_CASE("min-norm against the simplex grid") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> nd;
    for (std::size_t m : {2u, 3u}) {
      for (int t = 0; t < 100; ++t) {
        std::vector<Vector> g(m, Vector(4));
        for (auto& v : g) {
          for (auto& x : v) x = nd(rng);
        }
        const auto r = solve_minnorm(g);
        CHECK(r.weights.minCoeff() >= 0.0);
        CHECK(r.weights.sum() == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(minnorm_kkt_residual(g, r.weights) <= 1e-8);
        CHECK(r.direction.squaredNorm() <= grid_min_norm(g, 1e-3) + 1e-6);
      }
    }
  }

  TEST_CASE("step schedule") {
    const StepSchedule s{2.1, 1.0 / 3.0, 500};
    CHECK(s.at(0) == 2.1);
    CHECK(s.at(600) == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(s.at(1000) == doctest::Approx(2.1 / 9).epsilon(1e-15));
    CHECK_THROWS_AS((StepSchedule{0.0, 1.0, 1}.validate()), ConfigError);
  }

  TEST_CASE("single objective is a gradient step") {
    const ObjectiveSet one({std::make_shared<QuadraticObjective>(vec({1, 2}))});
    SmgSchedules sch;
    sch.step = {0.1, 1.0, 1};
    Rng rng(1);
    const auto r = smg_step(LinearModel::from_params(vec({0, 0})), one, sch, 0, rng);
    CHECK(r.next.params()[0] == doctest::Approx(0.2));
    CHECK(r.next.params()[1] == doctest::Approx(0.4));
  }

  TEST_CASE("zero combined gradient leaves the point") {
    SmgSchedules sch;
    Rng rng(1);
    const auto x = LinearModel::from_params(vec({0.3, 0}));
    const auto r = smg_step(x, toy_pair(), sch, 0, rng);
    CHECK(r.next == x);
  }

  TEST_CASE("full-batch step descends in both objectives") {
    const auto objs = toy_pair();
    SmgSchedules sch;
    sch.step = {0.01, 1.0, 1};
    std::mt19937_64 gen(5);
    std::normal_distribution<double> nd(0.0, 2.0);
    for (int t = 0; t < 50; ++t) {
      const auto x = LinearModel::from_params(vec({nd(gen), nd(gen)}));
      Rng rng(1);
      const auto r = smg_step(x, objs, sch, 0, rng);
      const Vector f0 = objs.evaluate(x), f1 = objs.evaluate(r.next);
      CHECK_FALSE(((f1.array() > f0.array()).all()));
    }
  }

  TEST_CASE("fixed seed fixes the trajectory") {
    auto data = std::make_shared<const Dataset>(testing::random_dataset(200, 2, 3));
    const ObjectiveSet objs({{ObjectiveKind::Logistic, "", 8.0, 0.0}, {ObjectiveKind::DisparateImpactBinary, "s", 8.0, 0.0}},
                            data);
    SmgSchedules sch;
    sch.batches = {BatchSchedule{20, 1.0}};
    Rng a(42), b(42);
    const auto ra = smg_run(LinearModel::zeros(2), objs, sch, 30, a);
    const auto rb = smg_run(LinearModel::zeros(2), objs, sch, 30, b);
    CHECK(ra.final_point == rb.final_point);
    CHECK(ra.iterations == 30);
    CHECK(ra.gradient_evaluations > 0);
  }

  TEST_CASE("non-finite iterate aborts") {
    const ObjectiveSet one({std::make_shared<QuadraticObjective>(vec({0, 0}))});
    SmgSchedules sch;
    sch.step = {1e308, 1.0, 1};
    Rng rng(1);
    CHECK_THROWS_AS(smg_run(LinearModel::from_params(vec({1e10, 1e10})), one, sch, 5, rng), NumericalError);
  }
}
