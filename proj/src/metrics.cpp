#include "fairfront/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace fairfront {

namespace {

void check_same_dim(const ObjectiveValues& front, const char* what) {
  for (const auto& v : front) {
    if (v.size() != front.front().size()) throw ConfigError(std::string(what) + ": objective vectors differ in length");
  }
}

bool close(const Vector& a, const Vector& b, double tol) {
  if (a.size() != b.size()) return false;
  if (tol <= 0.0) return a == b;
  return (a - b).cwiseAbs().maxCoeff() <= tol;
}

// Per-coordinate sorted values with the two extreme points appended.
std::vector<std::vector<double>> sorted_with_extremes(const ObjectiveValues& front) {
  const auto [lo, hi] = extreme_points(front);
  const auto m = front.front().size();
  std::vector<std::vector<double>> cols(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) {
    auto& c = cols[static_cast<std::size_t>(i)];
    c.reserve(front.size() + 2);
    c.push_back(front[lo][i]);
    for (const auto& v : front) c.push_back(v[i]);
    c.push_back(front[hi][i]);
    std::sort(c.begin(), c.end());
  }
  return cols;
}

double hv2(std::vector<std::pair<double, double>> pts, double r0, double r1) {
  std::sort(pts.begin(), pts.end());
  double area = 0.0;
  double floor_y = r1;
  for (const auto& [x, y] : pts) {
    if (y < floor_y) {
      area += (r0 - x) * (floor_y - y);
      floor_y = y;
    }
  }
  return area;
}

}  // namespace

std::vector<double> purity(const std::vector<ObjectiveValues>& fronts, double tolerance) {
  if (fronts.empty()) throw ConfigError("purity: no fronts given");
  ObjectiveValues all;
  for (std::size_t a = 0; a < fronts.size(); ++a) {
    if (fronts[a].empty()) throw ConfigError("purity: front " + std::to_string(a) + " is empty");
    all.insert(all.end(), fronts[a].begin(), fronts[a].end());
  }
  check_same_dim(all, "purity");
  ObjectiveValues reference;
  for (auto i : nondominated_indices(all)) reference.push_back(all[i]);

  std::vector<double> out;
  for (const auto& front : fronts) {
    std::size_t hits = 0;
    for (const auto& v : front) {
      if (std::any_of(reference.begin(), reference.end(), [&](const Vector& r) { return close(v, r, tolerance); })) {
        ++hits;
      }
    }
    out.push_back(static_cast<double>(hits) / static_cast<double>(front.size()));
  }
  return out;
}

std::pair<std::size_t, std::size_t> extreme_points(const ObjectiveValues& front) {
  if (front.size() < 2) throw ConfigError("extreme_points: need at least 2 points");
  check_same_dim(front, "extreme_points");
  const auto m = front.front().size();
  std::pair<std::size_t, std::size_t> best{0, 0};
  double best_range = -1.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    std::size_t lo = 0, hi = 0;
    for (std::size_t j = 1; j < front.size(); ++j) {
      if (front[j][i] < front[lo][i]) lo = j;
      if (front[j][i] > front[hi][i]) hi = j;
    }
    const double range = front[hi][i] - front[lo][i];
    if (range > best_range) {
      best_range = range;
      best = {lo, hi};
    }
  }
  return best;
}

double spread_gamma(const ObjectiveValues& front) {
  if (front.empty()) throw ConfigError("spread_gamma: empty front");
  if (front.size() == 1) return 0.0;
  double gamma = 0.0;
  for (const auto& c : sorted_with_extremes(front)) {
    for (std::size_t j = 0; j + 1 < c.size(); ++j) gamma = std::max(gamma, c[j + 1] - c[j]);
  }
  return gamma;
}

double spread_delta(const ObjectiveValues& front) {
  if (front.size() < 2) throw ConfigError("spread_delta: need at least 2 points");
  const std::size_t M = front.size();
  double delta = 0.0;
  for (const auto& c : sorted_with_extremes(front)) {
    // c holds M + 2 values, gaps d_0 .. d_M.
    std::vector<double> d(M + 1);
    for (std::size_t j = 0; j <= M; ++j) d[j] = c[j + 1] - c[j];
    double mean = 0.0;
    for (std::size_t j = 1; j < M; ++j) mean += d[j];
    mean /= static_cast<double>(M - 1);
    double num = d[0] + d[M];
    for (std::size_t j = 1; j < M; ++j) num += std::abs(d[j] - mean);
    const double den = d[0] + d[M] + static_cast<double>(M - 1) * mean;
    if (den > 0.0) delta = std::max(delta, num / den);
  }
  return delta;
}

double hypervolume(const ObjectiveValues& front, const Vector& reference) {
  const auto m = reference.size();
  if (m != 2 && m != 3) throw ConfigError("hypervolume: only 2 or 3 objectives are supported");
  for (std::size_t j = 0; j < front.size(); ++j) {
    if (front[j].size() != m) throw ConfigError("hypervolume: point and reference differ in length");
    for (Eigen::Index i = 0; i < m; ++i) {
      if (!(front[j][i] <= reference[i])) {
        throw ConfigError("hypervolume: point " + std::to_string(j) + " exceeds the reference point");
      }
    }
  }
  if (front.empty()) return 0.0;

  if (m == 2) {
    std::vector<std::pair<double, double>> pts;
    pts.reserve(front.size());
    for (const auto& v : front) pts.emplace_back(v[0], v[1]);
    return hv2(std::move(pts), reference[0], reference[1]);
  }

  // Slices between consecutive distinct f_3 levels.
  std::vector<std::size_t> order(front.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return front[a][2] < front[b][2]; });
  double volume = 0.0;
  std::vector<std::pair<double, double>> active;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto& v = front[order[k]];
    active.emplace_back(v[0], v[1]);
    const double z_next = k + 1 < order.size() ? front[order[k + 1]][2] : reference[2];
    const double depth = z_next - v[2];
    if (depth > 0.0) volume += depth * hv2(active, reference[0], reference[1]);
  }
  return volume;
}

Vector hypervolume_reference(const std::vector<ObjectiveValues>& fronts, double margin) {
  Vector lo, hi;
  for (const auto& front : fronts) {
    for (const auto& v : front) {
      if (lo.size() == 0) {
        lo = hi = v;
      } else {
        if (v.size() != lo.size()) throw ConfigError("hypervolume_reference: objective vectors differ in length");
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
      }
    }
  }
  if (lo.size() == 0) throw ConfigError("hypervolume_reference: no points");
  return hi + margin * (hi - lo);
}

std::vector<std::size_t> downsample_indices(const ObjectiveValues& front, std::size_t M) {
  if (M < 2) throw ConfigError("downsample: target size must be at least 2");
  if (M > front.size()) throw ConfigError("downsample: target size exceeds front size");
  std::vector<std::size_t> order(front.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
    return std::lexicographical_compare(front[a].begin(), front[a].end(), front[b].begin(), front[b].end());
  });
  const double n1 = static_cast<double>(front.size() - 1);
  std::vector<std::size_t> out;
  out.reserve(M);
  for (std::size_t j = 0; j < M; ++j) {
    const auto rank = static_cast<std::size_t>(std::llround(static_cast<double>(j) * n1 / static_cast<double>(M - 1)));
    out.push_back(order[rank]);
  }
  return out;
}

ParetoFront downsample(const ParetoFront& front, std::size_t M) {
  ParetoFront out;
  for (auto i : downsample_indices(front.objective_values(), M)) out.points.push_back(front.points[i]);
  return out;
}

double PerformanceProfile::at(std::size_t algorithm, double tau) const {
  const auto it = std::upper_bound(taus.begin(), taus.end(), tau);
  if (it == taus.begin()) return 0.0;
  return fraction.at(algorithm)[static_cast<std::size_t>(it - taus.begin() - 1)];
}

PerformanceProfile performance_profile(const std::vector<std::vector<double>>& table, bool higher_is_better) {
  if (table.empty()) throw ConfigError("performance_profile: no problems");
  const std::size_t A = table.front().size();
  if (A == 0) throw ConfigError("performance_profile: no algorithms");
  std::vector<std::vector<double>> ratio(table.size(), std::vector<double>(A));
  for (std::size_t p = 0; p < table.size(); ++p) {
    if (table[p].size() != A) throw ConfigError("performance_profile: ragged metric table");
    std::vector<double> cost(A);
    for (std::size_t a = 0; a < A; ++a) {
      const double v = table[p][a];
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw ConfigError("performance_profile: metric values must be positive and finite");
      }
      cost[a] = higher_is_better ? 1.0 / v : v;
    }
    const double best = *std::min_element(cost.begin(), cost.end());
    for (std::size_t a = 0; a < A; ++a) ratio[p][a] = cost[a] / best;
  }

  PerformanceProfile prof;
  prof.taus.push_back(1.0);
  for (const auto& row : ratio) prof.taus.insert(prof.taus.end(), row.begin(), row.end());
  std::sort(prof.taus.begin(), prof.taus.end());
  prof.taus.erase(std::unique(prof.taus.begin(), prof.taus.end()), prof.taus.end());
  prof.fraction.assign(A, std::vector<double>(prof.taus.size(), 0.0));
  const double P = static_cast<double>(table.size());
  for (std::size_t a = 0; a < A; ++a) {
    for (std::size_t t = 0; t < prof.taus.size(); ++t) {
      std::size_t count = 0;
      for (const auto& row : ratio) count += row[a] <= prof.taus[t] ? 1 : 0;
      prof.fraction[a][t] = static_cast<double>(count) / P;
    }
  }
  return prof;
}

}  // namespace fairfront
