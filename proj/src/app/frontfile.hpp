#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fairfront/data.hpp"
#include "fairfront/objectives.hpp"
#include "fairfront/pareto.hpp"

namespace fairfront::app {

// %.17g; round-trips every double.
std::string format_number(double v);

// Writes c_0..c_{d-1}, b, f_1..f_m, accuracy, cv_score[, cv_fnr], then
// per-group pos_rate_<g>[ and fnr_<g>] on `diag`. Further attributes used by
// the objectives add cv_score_<attr> columns. Rows follow ascending f_1.
void write_front_csv(const std::filesystem::path& path, const ParetoFront& front, const Dataset& diag,
                     const std::vector<ObjectiveDescriptor>& objectives);

struct FrontTable {
  std::vector<std::string> header;
  std::size_t d = 0;
  std::size_t m = 0;
  std::vector<LinearModel> models;
  std::vector<Vector> f;
  std::vector<std::vector<double>> rows;
};

// Reads a front file; d and m come from the header. Throws DataError on a
// malformed file.
FrontTable read_front_csv(const std::filesystem::path& path);

}  // namespace fairfront::app
