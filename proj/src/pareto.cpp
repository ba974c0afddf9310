#include "fairfront/pareto.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace fairfront {

bool dominates(const Vector& u, const Vector& v) {
  if (u.size() != v.size()) throw ConfigError("dominates: objective vectors differ in length");
  bool strict = false;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (u[i] > v[i]) return false;
    strict = strict || u[i] < v[i];
  }
  return strict;
}

std::vector<std::size_t> nondominated_indices(std::span<const Vector> values) {
  const std::size_t n = values.size();
  if (n == 0) return {};
  const auto m = values.front().size();
  for (const auto& v : values) {
    if (v.size() != m) throw ConfigError("objective vectors differ in length");
  }
  // A dominator precedes what it dominates in lexicographic order, and every
  // dominated vector is dominated by some nondominated one; so a single pass
  // against the kept set suffices.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(values[a].begin(), values[a].end(), values[b].begin(), values[b].end());
  });
  std::vector<std::size_t> kept;
  if (m == 2) {
    double best_f2 = std::numeric_limits<double>::infinity();
    for (auto i : order) {
      if (values[i][1] < best_f2) {
        kept.push_back(i);
        best_f2 = values[i][1];
      }
    }
  } else {
    for (auto i : order) {
      bool drop = false;
      for (auto k : kept) {
        if (values[k] == values[i] || dominates(values[k], values[i])) {
          drop = true;
          break;
        }
      }
      if (!drop) kept.push_back(i);
    }
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

std::vector<Vector> ParetoFront::objective_values() const {
  std::vector<Vector> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.f);
  return out;
}

ParetoFront filter_nondominated(std::vector<FrontPoint> points) {
  std::vector<Vector> f;
  f.reserve(points.size());
  for (const auto& p : points) f.push_back(p.f);
  ParetoFront front;
  for (auto i : nondominated_indices(f)) front.points.push_back(std::move(points[i]));
  return front;
}

ParetoFront density_thin(const ParetoFront& front, double cell_fraction) {
  if (front.empty() || !(cell_fraction > 0.0)) return front;
  const auto m = front.points.front().f.size();
  Vector lo = front.points.front().f;
  Vector hi = lo;
  for (const auto& p : front.points) {
    lo = lo.cwiseMin(p.f);
    hi = hi.cwiseMax(p.f);
  }
  const Vector edge = (hi - lo) * cell_fraction;
  const auto cells_per_axis = static_cast<long long>(std::ceil(1.0 / cell_fraction));

  std::vector<bool> keep(front.size(), false);
  for (Eigen::Index i = 0; i < m; ++i) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < front.size(); ++j) {
      if (front.points[j].f[i] < front.points[best].f[i]) best = j;
    }
    keep[best] = true;
  }

  std::map<std::vector<long long>, std::size_t> winner;
  for (std::size_t j = 0; j < front.size(); ++j) {
    std::vector<long long> key(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) {
      long long c = 0;
      if (edge[i] > 0.0) {
        c = static_cast<long long>(std::floor((front.points[j].f[i] - lo[i]) / edge[i]));
        c = std::clamp(c, 0LL, cells_per_axis - 1);
      }
      key[static_cast<std::size_t>(i)] = c;
    }
    auto [it, inserted] = winner.emplace(std::move(key), j);
    if (!inserted && front.points[j].f[0] < front.points[it->second].f[0]) it->second = j;
  }
  for (const auto& [key, j] : winner) keep[j] = true;

  ParetoFront out;
  for (std::size_t j = 0; j < front.size(); ++j) {
    if (keep[j]) out.points.push_back(front.points[j]);
  }
  return out;
}

std::vector<FrontPoint> perturb(const FrontPoint& point, std::size_t r, double radius, Rng& rng) {
  if (!(radius >= 0.0)) throw ConfigError("perturbation radius must be nonnegative");
  std::uniform_real_distribution<double> noise(-radius, radius);
  std::vector<FrontPoint> out;
  out.reserve(r);
  for (std::size_t t = 0; t < r; ++t) {
    Vector p = point.x.params();
    if (radius > 0.0) {
      for (Eigen::Index i = 0; i < p.size(); ++i) p[i] += noise(rng);
    }
    out.push_back({LinearModel::from_params(std::move(p)), Vector(), point.iterate_count});
  }
  return out;
}

}  // namespace fairfront
