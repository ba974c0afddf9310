#pragma once

#include <vector>

#include "fairfront/common.hpp"
#include "fairfront/model.hpp"

namespace fairfront {

// u <= v element-wise with at least one strict coordinate.
// Throws ConfigError on length mismatch.
bool dominates(const Vector& u, const Vector& v);

// Indices (ascending) of the vectors not dominated by any other. Among exact
// duplicates only the first occurrence is kept.
std::vector<std::size_t> nondominated_indices(std::span<const Vector> values);

struct FrontPoint {
  LinearModel x;
  Vector f;
  // Total SMG iterations along this point's lineage.
  std::size_t iterate_count = 0;
};

struct ParetoFront {
  std::vector<FrontPoint> points;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  std::vector<Vector> objective_values() const;
};

ParetoFront filter_nondominated(std::vector<FrontPoint> points);

// Grid thinning: cells of edge cell_fraction * range per objective over the
// bounding box; keeps the point with the smallest f_1 in each occupied cell
// and always keeps the per-objective minimizers. cell_fraction <= 0 disables.
ParetoFront density_thin(const ParetoFront& front, double cell_fraction);

// r copies of `point` with i.i.d. uniform noise in [-radius, radius] on each
// parameter; f is left empty and iterate_count inherited.
std::vector<FrontPoint> perturb(const FrontPoint& point, std::size_t r, double radius, Rng& rng);

}  // namespace fairfront
