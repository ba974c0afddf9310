// Prints one PASS / FAIL / SKIP line per acceptance criterion. Exit status is
// nonzero when any criterion fails.
//
//   acceptance [N ...]      run only the listed criteria
//
// Datasets for 8 and 9: FAIRFRONT_ADULT_DIR (adult.data, adult.test) and
// FAIRFRONT_COMPAS_CSV; defaults under <source>/data/.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "app/commands.hpp"
#include "fairfront/epsfair.hpp"
#include "fairfront/metrics.hpp"
#include "fairfront/pfsmg.hpp"
#include "fairfront/smg.hpp"
#include "fairfront/streaming.hpp"

using namespace fairfront;
namespace fs = std::filesystem;

namespace {

enum class Status { Pass, Fail, Skip };

struct Outcome {
  Status status;
  std::string detail;
};

Outcome verdict(bool ok, std::string detail) { return {ok ? Status::Pass : Status::Fail, std::move(detail)}; }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Vector random_vector(std::size_t n, std::mt19937_64& rng, double sd = 1.0) {
  std::normal_distribution<double> nd(0.0, sd);
  Vector v(static_cast<Eigen::Index>(n));
  for (auto& x : v) x = nd(rng);
  return v;
}

Dataset random_data(std::mt19937_64& rng, std::size_t n, std::size_t d, std::size_t k) {
  std::normal_distribution<double> nd;
  std::uniform_int_distribution<int> bit(0, 1);
  RowMatrix X(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (Eigen::Index j = 0; j < X.rows(); ++j) {
    for (Eigen::Index i = 0; i < X.cols(); ++i) X(j, i) = nd(rng);
  }
  std::vector<int> y(n), s(n), g(n);
  for (std::size_t j = 0; j < n; ++j) {
    y[j] = bit(rng) ? 1 : -1;
    s[j] = static_cast<int>(j % 2);
    g[j] = static_cast<int>(j % k);
  }
  std::vector<std::string> names, cats;
  for (std::size_t i = 0; i < d; ++i) names.push_back("z" + std::to_string(i));
  for (std::size_t c = 0; c < k; ++c) cats.push_back("g" + std::to_string(c));
  return Dataset(std::move(X), names, std::vector<bool>(d, true), {{"s", {"0", "1"}}, {"g", cats}}, {s, g}, y);
}

// --- 1 ---------------------------------------------------------------------

Outcome gradients() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2024);
  const char* names[] = {"f1", "f2_di", "f3_di", "f4_fnr"};
  double worst[4] = {0, 0, 0, 0};
  for (int t = 0; t < 20; ++t) {
    auto data = std::make_shared<const Dataset>(random_data(rng, 80, 4, 3));
    const LinearModel x = LinearModel::from_params(random_vector(5, rng));
    const ObjectivePtr objs[] = {std::make_shared<LogisticLoss>(data, 0.1), std::make_shared<DisparateImpactBinary>(data, "s"),
                                 std::make_shared<DisparateImpactMulti>(data, "g", 8.0),
                                 std::make_shared<EqualOpportunityFnr>(data, "s", 8.0)};
    for (int o = 0; o < 4; ++o) {
      const Vector g = objs[o]->gradient(x);
      Vector fd(g.size());
      const double h = 1e-6;
      for (Eigen::Index i = 0; i < g.size(); ++i) {
        Vector a = x.params(), b = x.params();
        a[i] += h;
        b[i] -= h;
        fd[i] = (objs[o]->value(LinearModel::from_params(a)) - objs[o]->value(LinearModel::from_params(b))) / (2 * h);
      }
      worst[o] = std::max(worst[o], (g - fd).norm() / std::max(g.norm(), 1e-12));
    }
  }
  const double secs = seconds_since(t0);
  const double w = *std::max_element(worst, worst + 4);
  std::string detail = "max relative error";
  for (int o = 0; o < 4; ++o) detail += fmt(" %s %.1e", names[o], worst[o]);
  return verdict(w < 1e-5 && secs < 10, detail + fmt(", %.2f s", secs));
}

// --- 2 ---------------------------------------------------------------------

Outcome minnorm() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(7);
  double kkt = 0, gap = 0;
  for (std::size_t m : {2u, 3u}) {
    for (int t = 0; t < 100; ++t) {
      std::vector<Vector> g;
      for (std::size_t i = 0; i < m; ++i) g.push_back(random_vector(5, rng));
      const auto r = solve_minnorm(g);
      kkt = std::max(kkt, std::abs(minnorm_kkt_residual(g, r.weights)));
      double grid = std::numeric_limits<double>::infinity();
      const int n = 1000;
      for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= (m == 3 ? n - i : 0); ++j) {
          const double a = i / double(n);
          const double b = m == 3 ? j / double(n) : 1.0 - a;
          Vector d = a * g[0] + b * g[1];
          if (m == 3) d += (1.0 - a - b) * g[2];
          grid = std::min(grid, d.squaredNorm());
        }
      }
      gap = std::max(gap, r.direction.squaredNorm() - grid);
    }
  }
  const double secs = seconds_since(t0);
  return verdict(kkt <= 1e-8 && gap <= 1e-6 && secs < 10,
                 fmt("max KKT residual %.1e, worst excess over grid %.1e, %.2f s", kkt, gap, secs));
}

// --- 3 ---------------------------------------------------------------------

bool weakly_strictly_dominates(const Vector& a, const Vector& b) {
  return (a.array() <= b.array()).all() && (a.array() < b.array()).any();
}

Outcome dominance() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(3);
  int mismatches = 0;
  for (int t = 0; t < 1000; ++t) {
    const int m = 2 + t % 2;
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 300)(rng);
    std::uniform_int_distribution<int> coarse(0, 6);
    std::uniform_real_distribution<double> fine(0.0, 1.0);
    std::vector<FrontPoint> pts;
    for (std::size_t j = 0; j < n; ++j) {
      Vector f(m);
      for (auto& c : f) c = t % 4 == 0 ? coarse(rng) : fine(rng);
      pts.push_back({LinearModel::zeros(1), f, j});
    }
    std::vector<std::size_t> brute;
    for (std::size_t i = 0; i < n; ++i) {
      bool out = false;
      for (std::size_t j = 0; j < n && !out; ++j) {
        out = (j != i && weakly_strictly_dominates(pts[j].f, pts[i].f)) || (j < i && pts[j].f == pts[i].f);
      }
      if (!out) brute.push_back(i);
    }
    const auto front = filter_nondominated(pts);
    std::vector<std::size_t> got;
    for (const auto& p : front.points) got.push_back(p.iterate_count);
    std::sort(got.begin(), got.end());
    if (got != brute) ++mismatches;
  }
  return verdict(mismatches == 0, fmt("%d of 1000 sets differ from the pairwise oracle, %.2f s", mismatches,
                                      seconds_since(t0)));
}

// --- 4 ---------------------------------------------------------------------

Outcome hypervolume_check() {
  const auto t0 = std::chrono::steady_clock::now();
  const double worked = hypervolume({Vector{{1.0, 3.0}}, Vector{{2.0, 2.0}}, Vector{{3.0, 1.0}}}, Vector{{4.0, 4.0}});
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_z = 0;
  int outside = 0;
  for (int t = 0; t < 50; ++t) {
    const int m = 2 + t % 2;
    std::vector<Vector> raw;
    for (int j = 0; j < 40; ++j) {
      Vector v(m);
      for (auto& c : v) c = u(rng);
      raw.push_back(v);
    }
    ObjectiveValues f;
    for (auto i : nondominated_indices(raw)) f.push_back(raw[i]);
    const Vector ref = Vector::Constant(m, 1.0);
    Vector lo = f.front();
    for (const auto& v : f) lo = lo.cwiseMin(v);
    double box = (ref - lo).prod();
    const std::size_t samples = 1000000;
    std::size_t hit = 0;
    Vector s(m);
    for (std::size_t k = 0; k < samples; ++k) {
      for (int i = 0; i < m; ++i) s[i] = lo[i] + u(rng) * (ref[i] - lo[i]);
      for (const auto& v : f) {
        if ((v.array() <= s.array()).all()) {
          ++hit;
          break;
        }
      }
    }
    const double p = static_cast<double>(hit) / samples;
    const double est = box * p;
    const double se = box * std::sqrt(p * (1 - p) / samples);
    const double z = std::abs(hypervolume(f, ref) - est) / std::max(se, 1e-300);
    worst_z = std::max(worst_z, z);
    if (z > 3) ++outside;
  }
  const double secs = seconds_since(t0);
  return verdict(std::abs(worked - 6.0) <= 1e-12 && outside == 0,
                 fmt("worked example %.15g; %d of 50 fronts outside 3 SE (worst %.2f SE), %.1f s", worked, outside,
                     worst_z, secs));
}

// --- 5 ---------------------------------------------------------------------

Outcome toy() {
  const auto t0 = std::chrono::steady_clock::now();
  const ObjectiveSet objs({std::make_shared<QuadraticObjective>(Vector{{1.0, 0.0}}),
                           std::make_shared<QuadraticObjective>(Vector{{-1.0, 0.0}})});
  PfsmgConfig cfg;
  cfg.smg.step = {0.2, 1.0, 1};
  cfg.iters_per_run = 10;
  cfg.runs_per_point = 2;
  cfg.perturbations_per_point = 2;
  cfg.perturbation_radius = 0.1;
  cfg.seed = 7;
  cfg.workers = 0;
  const auto res = pfsmg_run(objs, cfg);
  double worst = 0;
  for (const auto& p : res.front.points) {
    const Vector& x = p.x.params();
    worst = std::max(worst, std::hypot(x[0] - std::clamp(x[0], -1.0, 1.0), x[1]));
  }
  // sqrt(f1) + sqrt(f2) = 2 on the front; dominated area inside [0,4]^2 is 40/3
  const double exact = 40.0 / 3.0;
  const double hv = hypervolume(res.front.objective_values(), Vector{{4.0, 4.0}});
  const double rel = std::abs(hv - exact) / exact;
  const double secs = seconds_since(t0);
  return verdict(res.front.size() >= 50 && worst <= 1e-2 && rel <= 0.02 && secs < 60,
                 fmt("%zu points, max distance to segment %.1e, hypervolume %.4f vs %.4f (%.2f%%), %.1f s",
                     res.front.size(), worst, hv, exact, 100 * rel, secs));
}

// --- 6, 7 ------------------------------------------------------------------

struct SyntheticProblem {
  std::shared_ptr<const Dataset> train;
  Dataset test;
  std::vector<ObjectiveDescriptor> objectives;
};

SyntheticProblem synthetic_problem(std::uint64_t seed) {
  const auto raw = generate_synthetic(2000, seed);
  SplitSpec spec;
  spec.seed = seed;
  const auto parts = split(raw, spec);
  const auto sc = fit_scaling(parts.train);
  return {std::make_shared<const Dataset>(apply_scaling(parts.train, sc)), apply_scaling(parts.test, sc),
          {{ObjectiveKind::Logistic, "", 8.0, 0.0}, {ObjectiveKind::DisparateImpactBinary, "s", 8.0, 0.0}}};
}

// Desk-scale settings tuned on the synthetic data (see README).
PfsmgConfig synthetic_pfsmg(std::uint64_t seed) {
  PfsmgConfig cfg;
  cfg.smg.step = {1.0, 1.0 / 3.0, 50};
  cfg.smg.batches = {BatchSchedule{80, 1.0}, BatchSchedule{50, 1.0}};
  cfg.runs_per_point = 2;
  cfg.iters_per_run = 5;
  cfg.iterate_budget = 100;
  cfg.cell_fraction = 0.01;
  cfg.perturbation_radius = 0.1;
  cfg.seed = seed;
  cfg.workers = 0;
  return cfg;
}

Outcome synthetic_conflict() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto prob = synthetic_problem(1);
  const ObjectiveSet objs(prob.objectives, prob.train);
  const auto res = pfsmg_run(objs, synthetic_pfsmg(1));
  double lo = 1, hi = 0;
  for (const auto& p : res.front.points) {
    const double cv = fairness_report(p.x, prob.test, 0).cv;
    lo = std::min(lo, cv);
    hi = std::max(hi, cv);
  }
  auto f = res.front.objective_values();
  std::sort(f.begin(), f.end(), [](const Vector& a, const Vector& b) { return a[1] < b[1]; });
  bool strict = true;
  for (std::size_t i = 0; i + 1 < f.size(); ++i) strict &= f[i + 1][1] > f[i][1] && f[i + 1][0] < f[i][0];
  return verdict(hi - lo >= 0.15 && strict && f.size() >= 2,
                 fmt("%zu points, test CV range %.3f (%.3f to %.3f), f1 strictly decreasing in f2: %s, %.1f s",
                     f.size(), hi - lo, lo, hi, strict ? "yes" : "no", seconds_since(t0)));
}

// Smallest eps such that every point of `b` (inside the overlap) is matched
// by some point of `a` within eps * range in each objective.
double additive_eps(const ObjectiveValues& a, const ObjectiveValues& b, const Vector& range, double lo, double hi) {
  double eps = 0;
  for (const auto& q : b) {
    if (q[1] < lo || q[1] > hi) continue;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : a) best = std::min(best, ((p - q).array() / range.array()).maxCoeff());
    eps = std::max(eps, best);
  }
  return eps;
}

Outcome baseline_agreement() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto prob = synthetic_problem(1);
  const ObjectiveSet objs(prob.objectives, prob.train);
  const auto pf = pfsmg_run(objs, synthetic_pfsmg(1)).front.objective_values();
  EpsSweepConfig ec;
  ec.n_thresholds = 50;
  ec.workers = 0;
  const auto ep = sweep_front(*prob.train, 0, objs, ec).front.objective_values();
  const double secs = seconds_since(t0);

  auto f2_range = [](const ObjectiveValues& f) {
    double lo = f[0][1], hi = f[0][1];
    for (const auto& v : f) {
      lo = std::min(lo, v[1]);
      hi = std::max(hi, v[1]);
    }
    return std::pair{lo, hi};
  };
  const auto [plo, phi] = f2_range(pf);
  const auto [elo, ehi] = f2_range(ep);
  const double lo = std::max(plo, elo), hi = std::min(phi, ehi);
  Vector mn = Vector::Constant(2, std::numeric_limits<double>::infinity());
  Vector mx = -mn;
  for (const auto* f : {&pf, &ep}) {
    for (const auto& v : *f) {
      if (v[1] < lo || v[1] > hi) continue;
      mn = mn.cwiseMin(v);
      mx = mx.cwiseMax(v);
    }
  }
  const Vector range = mx - mn;
  if (!(hi > lo) || !(range.minCoeff() > 0)) return {Status::Fail, "fronts do not overlap in f2"};
  const double e_pf = additive_eps(ep, pf, range, lo, hi);
  const double pf_e = additive_eps(pf, ep, range, lo, hi);
  return verdict(e_pf <= 0.02 && pf_e <= 0.02 && secs < 300,
                 fmt("eps(EPS covers PF-SMG) %.2f%%, eps(PF-SMG covers EPS) %.2f%% over f2 in [%.3g, %.3g], "
                     "%zu vs %zu points, %.1f s",
                     100 * e_pf, 100 * pf_e, lo, hi, pf.size(), ep.size(), secs));
}

// --- 8, 9 ------------------------------------------------------------------

fs::path data_path(const char* env, const char* fallback) {
  if (const char* v = std::getenv(env)) return v;
  return fs::path(FAIRFRONT_SOURCE_DIR) / "data" / fallback;
}

struct RealProblem {
  std::shared_ptr<const Dataset> train;
  Dataset test;
};

RealProblem real_problem(const Dataset& raw, std::uint64_t seed) {
  SplitSpec spec;
  spec.seed = seed;
  const auto parts = split(raw, spec);
  const auto sc = fit_scaling(parts.train);
  return {std::make_shared<const Dataset>(apply_scaling(parts.train, sc)), apply_scaling(parts.test, sc)};
}

Outcome adult() {
  const fs::path dir = data_path("FAIRFRONT_ADULT_DIR", "adult");
  if (!fs::exists(dir / "adult.data") || !fs::exists(dir / "adult.test")) {
    return {Status::Skip, "Adult files not found in " + dir.string()};
  }
  const auto t0 = std::chrono::steady_clock::now();
  const Dataset raw = preprocess_adult(dir);
  auto count = [&](const std::string& attr, const std::string& cat) {
    const auto a = raw.attribute_index(attr);
    const auto& cats = raw.attributes()[a].categories;
    const auto k = static_cast<int>(std::find(cats.begin(), cats.end(), cat) - cats.begin());
    return static_cast<std::size_t>(std::count(raw.codes(a).begin(), raw.codes(a).end(), k));
  };
  std::size_t high = 0;
  for (Eigen::Index j = 0; j < raw.labels().size(); ++j) high += raw.labels()[j] > 0;
  const bool counts_ok = raw.size() == 45222 && count("gender", "Male") == 30527 && count("gender", "Female") == 14695 &&
                         count("race", "White") == 38903 && count("race", "Black") == 4228 &&
                         count("race", "Asian-Pac-Islander") == 1303 && count("race", "Amer-Indian-Eskimo") == 435 &&
                         count("race", "Other") == 353 && high == 11208;

  const auto prob = real_problem(raw, 1);
  const ObjectiveSet objs({{ObjectiveKind::Logistic, "", 8.0, 0.0}, {ObjectiveKind::DisparateImpactBinary, "gender", 8.0, 0.0}},
                          prob.train);
  PfsmgConfig cfg;
  cfg.runs_per_point = 3;  // p2 in the caption
  cfg.iters_per_run = 2;  // p1
  cfg.smg.step = {2.1, 1.0 / 3.0, 500};
  cfg.smg.batches = {BatchSchedule{80, 1.018}, BatchSchedule{50, 1.018}};
  cfg.workers = 0;
  const auto res = pfsmg_run(objs, cfg);
  const auto g = prob.test.attribute_index("gender");
  double best_acc = -1, acc_at_best = 0, min_cv = 1, acc_at_min_cv = 0;
  for (const auto& p : res.front.points) {
    const double acc = accuracy(p.x, prob.test);
    const double cv = fairness_report(p.x, prob.test, g).cv;
    if (acc > best_acc) {
      best_acc = acc;
      acc_at_best = acc;
    }
    if (cv < min_cv) {
      min_cv = cv;
      acc_at_min_cv = acc;
    }
  }
  const double drop = 100 * (acc_at_best - acc_at_min_cv);
  return verdict(counts_ok && drop <= 2.5 && min_cv < 0.03,
                 fmt("rows %zu, group counts %s; accuracy drop %.2f pp to test CV %.4f, %.0f s", raw.size(),
                     counts_ok ? "match" : "differ", drop, min_cv, seconds_since(t0)));
}

Outcome compas() {
  const fs::path path = data_path("FAIRFRONT_COMPAS_CSV", "compas-scores-two-years.csv");
  if (!fs::exists(path)) return {Status::Skip, "COMPAS file not found at " + path.string()};
  const auto t0 = std::chrono::steady_clock::now();
  const Dataset raw = load_compas(path);
  const auto prob = real_problem(raw, 1);
  const ObjectiveSet objs({{ObjectiveKind::Logistic, "", 8.0, 0.0}, {ObjectiveKind::EqualOpportunityFnr, "race", 8.0, 0.0}},
                          prob.train);
  PfsmgConfig cfg;
  cfg.runs_per_point = 3;
  cfg.iters_per_run = 3;
  cfg.smg.step = {4.0, 1.0 / 3.0, 100};
  cfg.smg.batches = {BatchSchedule{80, 1.005}};
  cfg.workers = 0;
  const auto res = pfsmg_run(objs, cfg);
  const auto r = prob.test.attribute_index("race");
  const auto& cats = prob.test.attributes()[r].categories;
  const auto black = static_cast<std::size_t>(std::find(cats.begin(), cats.end(), "Black") - cats.begin());
  const auto white = static_cast<std::size_t>(std::find(cats.begin(), cats.end(), "White") - cats.begin());
  const FrontPoint* best = nullptr;
  const FrontPoint* fairest = nullptr;
  double best_acc = -1;
  for (const auto& p : res.front.points) {
    const double acc = accuracy(p.x, prob.test);
    if (acc > best_acc) {
      best_acc = acc;
      best = &p;
    }
    if (!fairest || p.f[1] < fairest->f[1]) fairest = &p;
  }
  const auto rb = fairness_report(best->x, prob.test, r);
  const auto rf = fairness_report(fairest->x, prob.test, r);
  if (!rb.fnr || !rf.fnr) return {Status::Fail, "a race group has no positive test samples"};
  const double ratio = (*rb.fnr)[black] / std::max((*rb.fnr)[white], 1e-12);
  const double gap_b = std::abs((*rb.fnr)[black] - (*rb.fnr)[white]);
  const double gap_f = std::abs((*rf.fnr)[black] - (*rf.fnr)[white]);
  return verdict(ratio >= 1.6 && gap_f <= 0.5 * gap_b,
                 fmt("Black/White FNR ratio at max accuracy %.2f; FNR gap %.3f -> %.3f at min f2, %.0f s", ratio,
                     gap_b, gap_f, seconds_since(t0)));
}

// --- 10 --------------------------------------------------------------------

Outcome streaming() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto chunks = synthetic_chunks(6, 2000, 11);
  StreamConfig sc;
  sc.objectives = {{ObjectiveKind::Logistic, "", 8.0, 0.0}, {ObjectiveKind::DisparateImpactBinary, "s", 8.0, 0.0}};
  sc.pfsmg = synthetic_pfsmg(11);
  sc.pfsmg.iterate_budget = 50;
  sc.pfsmg.cell_fraction = 0.02;
  const auto streamed = stream_run(chunks, sc);

  Dataset all = chunks[0];
  for (std::size_t u = 1; u < chunks.size(); ++u) all = all.concat(chunks[u]);
  auto data = std::make_shared<const Dataset>(apply_scaling(all, fit_scaling(all)));
  const ObjectiveSet objs(sc.objectives, data);
  PfsmgConfig cold_cfg = sc.pfsmg;
  cold_cfg.iterate_budget = 50 * chunks.size();
  const auto cold = pfsmg_run(objs, cold_cfg);

  const auto fs_ = streamed.state.front.objective_values();
  const auto fc = cold.front.objective_values();
  const Vector ref = hypervolume_reference({fs_, fc});
  const double hs = hypervolume(fs_, ref), hc = hypervolume(fc, ref);
  const double rel = std::abs(hs - hc) / hc;
  return verdict(rel <= 0.05, fmt("streamed hypervolume %.5f vs cold %.5f (%.2f%%), %zu vs %zu points, %.1f s", hs, hc,
                                  100 * rel, fs_.size(), fc.size(), seconds_since(t0)));
}

// --- 11 --------------------------------------------------------------------

Outcome metrics_sanity() {
  ObjectiveValues uniform;
  // dyadic spacing so every gap is exact in floating point
  for (int i = 0; i <= 64; ++i) uniform.push_back(Vector{{i / 64.0, 1.0 - i / 64.0}});
  const double delta = spread_delta(uniform);
  const auto pur = purity({{Vector{{1.0, 3.0}}, Vector{{2.0, 2.0}}}, {Vector{{2.5, 2.5}}, Vector{{3.0, 1.0}}}});
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  bool ones = true;
  for (bool higher : {false, true}) {
    std::vector<std::vector<double>> table;
    for (int p = 0; p < 40; ++p) {
      const double v = u(rng);
      table.push_back({v, v, v});
    }
    const auto prof = performance_profile(table, higher);
    for (const auto& row : prof.fraction) {
      for (double f : row) ones &= f == 1.0;
    }
    for (double tau : {1.0, 1.5, 10.0}) {
      for (std::size_t a = 0; a < 3; ++a) ones &= prof.at(a, tau) == 1.0;
    }
  }
  return verdict(delta == 0.0 && pur[0] == 1.0 && pur[1] == 0.5 && ones,
                 fmt("uniform Delta %.3g, purity A %.3g B %.3g, identical-input profiles all 1: %s", delta, pur[0],
                     pur[1], ones ? "yes" : "no"));
}

// --- 12 --------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome reproducibility() {
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path root = fs::temp_directory_path() / ("fairfront_acceptance_" + std::to_string(std::random_device{}()));
  fs::create_directories(root);
  std::vector<std::string> differing;
  for (const char* alg : {"pfsmg", "epsfair"}) {
    app::CommandOptions opts;
    opts.config = fs::path(FAIRFRONT_SOURCE_DIR) / "configs" / "synthetic.json";
    opts.seed = 5;
    opts.workers = 1;
    nlohmann::json cfg = nlohmann::json::parse(slurp(*opts.config));
    cfg["algorithm"] = alg;
    const fs::path cpath = root / (std::string(alg) + ".json");
    std::ofstream(cpath) << cfg.dump();
    opts.config = cpath;
    for (const char* run : {"a", "b"}) {
      opts.out = root / alg / run;
      app::cmd_front(opts);
    }
    const auto a = slurp(root / alg / "a" / "synthetic.csv");
    if (a.empty() || a != slurp(root / alg / "b" / "synthetic.csv")) differing.push_back(alg);
  }
  std::error_code ec;
  fs::remove_all(root, ec);
  std::string which;
  for (const auto& d : differing) which += " " + d;
  return verdict(differing.empty(), differing.empty()
                                        ? fmt("pfsmg and epsfair front files byte identical, %.1f s", seconds_since(t0))
                                        : "front files differ for" + which);
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"gradient correctness", gradients},
      {"min-norm subproblem", minnorm},
      {"dominance filter", dominance},
      {"hypervolume", hypervolume_check},
      {"toy Pareto recovery", toy},
      {"synthetic trade-off conflict", synthetic_conflict},
      {"baseline agreement (convex case)", baseline_agreement},
      {"Adult headline", adult},
      {"COMPAS headline", compas},
      {"streaming consistency", streaming},
      {"metrics sanity", metrics_sanity},
      {"reproducibility", reproducibility},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!only.empty() && !only.count(id)) continue;
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out = {Status::Fail, std::string("threw: ") + e.what()};
    }
    const char* tag = out.status == Status::Pass ? "PASS" : out.status == Status::Fail ? "FAIL" : "SKIP";
    std::printf("%s %2d %s: %s\n", tag, id, criteria[i].first, out.detail.c_str());
    std::fflush(stdout);
    failed += out.status == Status::Fail;
  }
  return failed == 0 ? 0 : 1;
}
