#include "fairfront/model.hpp"

namespace fairfront {

LinearModel::LinearModel(const Vector& weights, double intercept) : params_(weights.size() + 1) {
  params_.head(weights.size()) = weights;
  params_[weights.size()] = intercept;
}

LinearModel LinearModel::from_params(Vector params) {
  if (params.size() < 1) throw ConfigError("model parameter vector must include the intercept");
  LinearModel m;
  m.params_ = std::move(params);
  return m;
}

LinearModel LinearModel::zeros(std::size_t feature_dim) {
  return from_params(Vector::Zero(static_cast<Eigen::Index>(feature_dim) + 1));
}

double margin(const LinearModel& model, const Vector& z) {
  if (static_cast<std::size_t>(z.size()) != model.feature_dim()) {
    throw DataError("margin: feature vector has length " + std::to_string(z.size()) + ", model expects " +
                    std::to_string(model.feature_dim()));
  }
  return model.weights().dot(z) + model.intercept();
}

int predict(const LinearModel& model, const Vector& z) { return margin(model, z) >= 0.0 ? 1 : -1; }

Vector margins(const LinearModel& model, const Dataset& data) {
  if (data.feature_dim() != model.feature_dim()) {
    throw DataError("model dimension " + std::to_string(model.feature_dim()) + " does not match dataset dimension " +
                    std::to_string(data.feature_dim()));
  }
  Vector m = data.features() * model.weights();
  m.array() += model.intercept();
  return m;
}

double accuracy(const LinearModel& model, const Dataset& data) {
  if (data.empty()) throw DataError("accuracy of an empty dataset is undefined");
  const Vector m = margins(model, data);
  std::size_t correct = 0;
  for (Eigen::Index j = 0; j < m.size(); ++j) {
    const double pred = m[j] >= 0.0 ? 1.0 : -1.0;
    correct += pred == data.labels()[j] ? 1 : 0;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

nlohmann::json to_json(const LinearModel& model) {
  std::vector<double> c(model.weights().begin(), model.weights().end());
  return {{"c", c}, {"b", model.intercept()}};
}

LinearModel model_from_json(const nlohmann::json& j) {
  try {
    const auto c = j.at("c").get<std::vector<double>>();
    Vector w = Eigen::Map<const Vector>(c.data(), static_cast<Eigen::Index>(c.size()));
    return LinearModel(w, j.at("b").get<double>());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid model JSON: ") + e.what());
  }
}

}  // namespace fairfront
