#pragma once

#include "fairfront/common.hpp"
#include "fairfront/data.hpp"

#include <json.hpp>

namespace fairfront {

// Linear classifier with margin c.z + b. Stored as one parameter vector
// (c_0..c_{d-1}, b) so optimizers can treat it as a point in R^{d+1}.
class LinearModel {
 public:
  LinearModel() = default;
  LinearModel(const Vector& weights, double intercept);
  // From a packed parameter vector (weights then intercept); size >= 1.
  static LinearModel from_params(Vector params);
  static LinearModel zeros(std::size_t feature_dim);

  std::size_t feature_dim() const { return params_.size() == 0 ? 0 : static_cast<std::size_t>(params_.size() - 1); }
  auto weights() const { return params_.head(params_.size() - 1); }
  double intercept() const { return params_[params_.size() - 1]; }
  const Vector& params() const { return params_; }

  bool is_finite() const { return params_.allFinite(); }

  friend bool operator==(const LinearModel& a, const LinearModel& b) { return a.params_ == b.params_; }

 private:
  Vector params_;
};

// c.z + b; throws DataError on dimension mismatch.
double margin(const LinearModel& model, const Vector& z);
// +1 iff margin >= 0.
int predict(const LinearModel& model, const Vector& z);

// Margins for every row of `data`.
Vector margins(const LinearModel& model, const Dataset& data);

// Fraction of samples whose prediction equals the label; throws on empty data.
double accuracy(const LinearModel& model, const Dataset& data);

nlohmann::json to_json(const LinearModel& model);
LinearModel model_from_json(const nlohmann::json& j);

}  // namespace fairfront
