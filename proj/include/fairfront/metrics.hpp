#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fairfront/common.hpp"
#include "fairfront/pareto.hpp"

namespace fairfront {

using ObjectiveValues = std::vector<Vector>;

// Fraction of each front's points that survive in the nondominated subset of
// the union. Membership is equality within `tolerance` per coordinate (exact
// by default). Throws ConfigError for fewer than one front or an empty one.
std::vector<double> purity(const std::vector<ObjectiveValues>& fronts, double tolerance = 0.0);

// Indices (argmin f_k, argmax f_k) for the objective k with the widest range;
// ties go to the lowest k. Throws ConfigError for fewer than 2 points.
std::pair<std::size_t, std::size_t> extreme_points(const ObjectiveValues& front);

// Largest gap between consecutive sorted values of any objective, extremes
// included.
double spread_gamma(const ObjectiveValues& front);

// Gap non-uniformity including the extreme gaps; 0 when every coordinate
// collapses. Requires at least 2 points.
double spread_delta(const ObjectiveValues& front);

// Exact dominated volume for m = 2 (sweep) and m = 3 (slicing). Throws
// ConfigError when a point exceeds the reference or m is not 2 or 3.
double hypervolume(const ObjectiveValues& front, const Vector& reference);

// Componentwise max over all fronts plus `margin` times the coordinate range.
Vector hypervolume_reference(const std::vector<ObjectiveValues>& fronts, double margin = 0.1);

// Indices of M points at evenly spaced ranks of the f_1-sorted order, both
// f_1 extremes included. Throws ConfigError when M < 2 or M > size.
std::vector<std::size_t> downsample_indices(const ObjectiveValues& front, std::size_t M);
ParetoFront downsample(const ParetoFront& front, std::size_t M);

// Dolan-More profile. `table[p][a]` is the metric of algorithm a on problem
// p. `taus` are the breakpoints (sorted, first is 1); `fraction[a][t]` is the
// share of problems with ratio <= taus[t].
struct PerformanceProfile {
  std::vector<double> taus;
  std::vector<std::vector<double>> fraction;

  double at(std::size_t algorithm, double tau) const;
};

// Higher-is-better metrics are inverted before ratios are formed. Throws
// ConfigError on nonpositive entries or a ragged table.
PerformanceProfile performance_profile(const std::vector<std::vector<double>>& table, bool higher_is_better);

struct FrontMetrics {
  std::string algorithm;
  double purity = 0;
  double gamma = 0;
  double delta = 0;
  double hypervolume = 0;
  double cpu_seconds = 0;
  double gradient_evaluations = 0;
  std::size_t points = 0;
};

}  // namespace fairfront
