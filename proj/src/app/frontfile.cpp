#include "app/frontfile.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "csv.hpp"

namespace fairfront::app {

namespace fs = std::filesystem;

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

struct DiagPlan {
  std::size_t primary = 0;
  bool has_primary = false;
  bool fnr = false;
  std::vector<std::size_t> extra;
};

DiagPlan plan_diagnostics(const Dataset& diag, const std::vector<ObjectiveDescriptor>& objectives) {
  DiagPlan plan;
  bool wants_fnr = false;
  for (const auto& o : objectives) {
    if (o.attribute.empty()) continue;
    const auto a = diag.attribute_index(o.attribute);
    if (!plan.has_primary) {
      plan.primary = a;
      plan.has_primary = true;
    } else if (a != plan.primary && std::find(plan.extra.begin(), plan.extra.end(), a) == plan.extra.end()) {
      plan.extra.push_back(a);
    }
    if (o.kind == ObjectiveKind::EqualOpportunityFnr) wants_fnr = true;
  }
  if (!plan.has_primary && !diag.attributes().empty()) plan.has_primary = true;
  if (plan.has_primary && wants_fnr) {
    // FNR needs positives in every group of the diagnostics data.
    const auto& codes = diag.codes(plan.primary);
    std::vector<bool> seen(diag.attributes()[plan.primary].cardinality(), false);
    for (std::size_t j = 0; j < diag.size(); ++j) {
      if (diag.labels()[static_cast<Eigen::Index>(j)] > 0) seen[static_cast<std::size_t>(codes[j])] = true;
    }
    plan.fnr = std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
  }
  return plan;
}

}  // namespace

void write_front_csv(const fs::path& path, const ParetoFront& front, const Dataset& diag,
                     const std::vector<ObjectiveDescriptor>& objectives) {
  if (front.empty()) throw DataError("refusing to write an empty front to " + path.string());
  const std::size_t d = front.points.front().x.feature_dim();
  const auto m = static_cast<std::size_t>(front.points.front().f.size());
  if (diag.feature_dim() != d) throw DataError("diagnostics data dimension differs from the front models");
  const DiagPlan plan = plan_diagnostics(diag, objectives);

  std::vector<std::string> header;
  for (std::size_t i = 0; i < d; ++i) header.push_back("c_" + std::to_string(i));
  header.push_back("b");
  for (std::size_t i = 0; i < m; ++i) header.push_back("f_" + std::to_string(i + 1));
  header.push_back("accuracy");
  if (plan.has_primary) {
    const auto& attr = diag.attributes()[plan.primary];
    header.push_back("cv_score");
    if (plan.fnr) header.push_back("cv_fnr");
    for (const auto& g : attr.categories) header.push_back("pos_rate_" + g);
    if (plan.fnr) {
      for (const auto& g : attr.categories) header.push_back("fnr_" + g);
    }
    for (auto a : plan.extra) header.push_back("cv_score_" + diag.attributes()[a].name);
  }

  std::vector<std::size_t> order(front.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
    const auto& fa = front.points[a].f;
    const auto& fb = front.points[b].f;
    return std::lexicographical_compare(fa.begin(), fa.end(), fb.begin(), fb.end());
  });

  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
  out << csv::join(header) << '\n';
  for (auto idx : order) {
    const auto& p = front.points[idx];
    if (!p.f.allFinite() || !p.x.is_finite()) throw NumericalError("front point with non-finite values");
    std::vector<std::string> row;
    for (auto v : p.x.params()) row.push_back(format_number(v));
    for (auto v : p.f) row.push_back(format_number(v));
    row.push_back(format_number(accuracy(p.x, diag)));
    if (plan.has_primary) {
      const auto rep = fairness_report(p.x, diag, plan.primary);
      row.push_back(format_number(rep.cv));
      if (plan.fnr) row.push_back(format_number(rep.cv_fnr.value_or(0.0)));
      for (auto r : rep.positive_rate) row.push_back(format_number(r));
      if (plan.fnr) {
        for (auto r : *rep.fnr) row.push_back(format_number(r));
      }
      for (auto a : plan.extra) row.push_back(format_number(fairness_report(p.x, diag, a).cv));
    }
    out << csv::join(row) << '\n';
  }
  if (!out) throw DataError("write to '" + path.string() + "' failed");
}

FrontTable read_front_csv(const fs::path& path) {
  const auto table = csv::read_file(path);
  FrontTable ft;
  ft.header = table.header;
  std::size_t col = 0;
  while (col < ft.header.size() && ft.header[col] == "c_" + std::to_string(col)) ++col;
  ft.d = col;
  if (col >= ft.header.size() || ft.header[col] != "b") {
    throw DataError(path.string() + ": header must start with c_0..c_{d-1}, b");
  }
  ++col;
  while (col < ft.header.size() && ft.header[col] == "f_" + std::to_string(ft.m + 1)) {
    ++ft.m;
    ++col;
  }
  if (ft.m == 0) throw DataError(path.string() + ": no objective columns f_1..f_m");

  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& cells = table.rows[r];
    if (cells.size() != ft.header.size()) {
      throw DataError(path.string() + ": row " + std::to_string(r + 1) + " has " + std::to_string(cells.size()) +
                      " fields, expected " + std::to_string(ft.header.size()));
    }
    std::vector<double> vals(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      try {
        std::size_t used = 0;
        vals[c] = std::stod(cells[c], &used);
        if (used != cells[c].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw DataError(path.string() + ": row " + std::to_string(r + 1) + ", column '" + ft.header[c] +
                        "' is not a number");
      }
    }
    Vector params(static_cast<Eigen::Index>(ft.d + 1));
    for (std::size_t i = 0; i <= ft.d; ++i) params[static_cast<Eigen::Index>(i)] = vals[i];
    Vector f(static_cast<Eigen::Index>(ft.m));
    for (std::size_t i = 0; i < ft.m; ++i) f[static_cast<Eigen::Index>(i)] = vals[ft.d + 1 + i];
    ft.models.push_back(LinearModel::from_params(std::move(params)));
    ft.f.push_back(std::move(f));
    ft.rows.push_back(std::move(vals));
  }
  return ft;
}

}  // namespace fairfront::app
