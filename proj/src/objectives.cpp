#include "fairfront/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fairfront {

double softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double soft_max(std::span<const double> values, double beta) {
  if (values.empty()) throw ConfigError("soft_max of an empty set");
  const double mx = *std::max_element(values.begin(), values.end());
  double num = 0.0;
  double den = 0.0;
  for (double v : values) {
    const double e = std::exp(beta * (v - mx));
    num += v * e;
    den += e;
  }
  return num / den;
}

std::vector<double> soft_max_gradient(std::span<const double> values, double beta) {
  if (values.empty()) throw ConfigError("soft_max of an empty set");
  const double mx = *std::max_element(values.begin(), values.end());
  std::vector<double> w(values.size());
  double den = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    w[i] = std::exp(beta * (values[i] - mx));
    den += w[i];
  }
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    w[i] /= den;
    s += w[i] * values[i];
  }
  for (std::size_t i = 0; i < values.size(); ++i) w[i] *= 1.0 + beta * (values[i] - s);
  return w;
}

double soft_min_zero(double t, double beta) { return -softplus(-beta * t) / beta; }

namespace {

void check_dims(const LinearModel& x, const Dataset& data) {
  if (x.feature_dim() != data.feature_dim()) {
    throw DataError("model dimension " + std::to_string(x.feature_dim()) + " does not match dataset dimension " +
                    std::to_string(data.feature_dim()));
  }
}

std::size_t batch_size(const Dataset& data, Batch batch) {
  const std::size_t b = batch.empty() ? data.size() : batch.size();
  if (b == 0) throw DataError("objective evaluated on an empty dataset");
  return b;
}

std::size_t row_at(Batch batch, std::size_t r) { return batch.empty() ? r : batch[r]; }

Vector batch_margins(const LinearModel& x, const Dataset& data, Batch batch) {
  if (batch.empty()) return margins(x, data);
  Vector m(static_cast<Eigen::Index>(batch.size()));
  const auto w = x.weights();
  const double b = x.intercept();
  for (std::size_t r = 0; r < batch.size(); ++r) {
    if (batch[r] >= data.size()) throw DataError("batch index out of range");
    m[static_cast<Eigen::Index>(r)] = data.features().row(static_cast<Eigen::Index>(batch[r])).dot(w) + b;
  }
  return m;
}

// grad = sum_r coef_r * (z_{j_r}, 1)
void combine_rows(const Dataset& data, Batch batch, const Vector& coef, Vector& grad) {
  const auto d = static_cast<Eigen::Index>(data.feature_dim());
  grad.setZero(d + 1);
  if (batch.empty()) {
    grad.head(d).noalias() = data.features().transpose() * coef;
  } else {
    for (std::size_t r = 0; r < batch.size(); ++r) {
      grad.head(d) += coef[static_cast<Eigen::Index>(r)] *
                      data.features().row(static_cast<Eigen::Index>(batch[r])).transpose();
    }
  }
  grad[d] = coef.sum();
}

double logistic_kernel(const LinearModel& x, const Dataset& data, double lambda, Batch batch, Vector* grad) {
  check_dims(x, data);
  const auto n = batch_size(data, batch);
  const Vector m = batch_margins(x, data, batch);
  Vector coef(m.size());
  double loss = 0.0;
  for (Eigen::Index r = 0; r < m.size(); ++r) {
    const double y = data.labels()[static_cast<Eigen::Index>(row_at(batch, static_cast<std::size_t>(r)))];
    loss += softplus(-y * m[r]);
    coef[r] = -y * sigmoid(-y * m[r]) / static_cast<double>(n);
  }
  loss /= static_cast<double>(n);
  const auto w = x.weights();
  loss += 0.5 * lambda * w.squaredNorm();
  if (grad) {
    combine_rows(data, batch, coef, *grad);
    grad->head(w.size()) += lambda * w;
  }
  return loss;
}

std::size_t require_binary(const Dataset& data, std::size_t attribute, const char* what) {
  if (attribute >= data.attributes().size()) throw ConfigError("attribute index out of range");
  if (data.attributes()[attribute].cardinality() != 2) {
    throw ConfigError(std::string(what) + " requires a binary attribute; '" + data.attributes()[attribute].name +
                      "' has " + std::to_string(data.attributes()[attribute].cardinality()) +
                      " categories (use di_multi)");
  }
  return attribute;
}

// Centered indicator of category `cat` on the batch rows.
Vector centered_indicator(const Dataset& data, std::size_t attribute, std::size_t cat, Batch batch) {
  const auto& ind = data.indicator(attribute, cat);
  const double mean = data.indicator_mean(attribute, cat);
  if (batch.empty()) return ind.array() - mean;
  Vector a(static_cast<Eigen::Index>(batch.size()));
  for (std::size_t r = 0; r < batch.size(); ++r) a[static_cast<Eigen::Index>(r)] = ind[static_cast<Eigen::Index>(batch[r])] - mean;
  return a;
}

double di_binary_kernel(const LinearModel& x, const Dataset& data, std::size_t attribute, Batch batch, Vector* grad) {
  check_dims(x, data);
  require_binary(data, attribute, "di_binary");
  const auto n = static_cast<double>(batch_size(data, batch));
  const Vector m = batch_margins(x, data, batch);
  const Vector a = centered_indicator(data, attribute, 1, batch);
  const double cov = a.dot(m) / n;
  if (grad) combine_rows(data, batch, (2.0 * cov / n) * a, *grad);
  return cov * cov;
}

double di_multi_kernel(const LinearModel& x, const Dataset& data, std::size_t attribute, double beta, Batch batch,
                       Vector* grad) {
  check_dims(x, data);
  if (attribute >= data.attributes().size()) throw ConfigError("attribute index out of range");
  if (!(beta > 0.0)) throw ConfigError("beta must be positive");
  const auto k = data.attributes()[attribute].cardinality();
  const auto n = static_cast<double>(batch_size(data, batch));
  const Vector m = batch_margins(x, data, batch);
  const auto& codes = data.codes(attribute);

  // cov_i = (1/B) sum_r ([c_r == i] - abar_i) m_r
  std::vector<double> cov(k, 0.0);
  std::vector<double> abar(k);
  for (std::size_t i = 0; i < k; ++i) abar[i] = data.indicator_mean(attribute, i);
  const double msum = m.sum();
  for (Eigen::Index r = 0; r < m.size(); ++r) {
    cov[static_cast<std::size_t>(codes[row_at(batch, static_cast<std::size_t>(r))])] += m[r];
  }
  std::vector<double> sq(k);
  for (std::size_t i = 0; i < k; ++i) {
    cov[i] = (cov[i] - abar[i] * msum) / n;
    sq[i] = cov[i] * cov[i];
  }
  const double value = soft_max(sq, beta);
  if (grad) {
    const auto ds = soft_max_gradient(sq, beta);
    std::vector<double> per_cat(k);
    double shared = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      per_cat[i] = 2.0 * ds[i] * cov[i] / n;
      shared += per_cat[i] * abar[i];
    }
    Vector coef(m.size());
    for (Eigen::Index r = 0; r < m.size(); ++r) {
      coef[r] = per_cat[static_cast<std::size_t>(codes[row_at(batch, static_cast<std::size_t>(r))])] - shared;
    }
    combine_rows(data, batch, coef, *grad);
  }
  return value;
}

double fnr_kernel(const LinearModel& x, const Dataset& data, std::size_t attribute, double beta, Batch batch,
                  Vector* grad) {
  check_dims(x, data);
  require_binary(data, attribute, "eq_opp_fnr");
  if (!(beta > 0.0)) throw ConfigError("beta must be positive");
  if ((data.labels().array() > 0.0).count() == 0) {
    throw DataError("eq_opp_fnr requires at least one positive label");
  }
  const auto n = static_cast<double>(batch_size(data, batch));
  const Vector m = batch_margins(x, data, batch);
  const Vector a = centered_indicator(data, attribute, 1, batch);
  Vector psi(m.size());
  Vector dpsi(m.size());
  for (Eigen::Index r = 0; r < m.size(); ++r) {
    const bool positive = data.labels()[static_cast<Eigen::Index>(row_at(batch, static_cast<std::size_t>(r)))] > 0.0;
    // ((1+y)/2) * y * margin is the margin for y = +1 and 0 otherwise.
    const double t = positive ? m[r] : 0.0;
    psi[r] = soft_min_zero(t, beta);
    dpsi[r] = positive ? sigmoid(-beta * t) : 0.0;
  }
  const double cov = a.dot(psi) / n;
  if (grad) combine_rows(data, batch, (2.0 * cov / n) * a.cwiseProduct(dpsi), *grad);
  return cov * cov;
}

}  // namespace

double eval_f1(const LinearModel& x, const Dataset& data, double lambda_reg, Batch batch) {
  return logistic_kernel(x, data, lambda_reg, batch, nullptr);
}

double eval_f2_di(const LinearModel& x, const Dataset& data, std::size_t attribute, Batch batch) {
  return di_binary_kernel(x, data, attribute, batch, nullptr);
}

double eval_f3_di(const LinearModel& x, const Dataset& data, std::size_t attribute, double beta, Batch batch) {
  return di_multi_kernel(x, data, attribute, beta, batch, nullptr);
}

double eval_f4_fnr(const LinearModel& x, const Dataset& data, std::size_t attribute, double beta, Batch batch) {
  return fnr_kernel(x, data, attribute, beta, batch, nullptr);
}

double boundary_covariance(const LinearModel& x, const Dataset& data, std::size_t attribute, std::size_t category,
                           Batch batch) {
  check_dims(x, data);
  const auto n = static_cast<double>(batch_size(data, batch));
  return centered_indicator(data, attribute, category, batch).dot(batch_margins(x, data, batch)) / n;
}

// --- classes ----------------------------------------------------------------

LogisticLoss::LogisticLoss(std::shared_ptr<const Dataset> data, double lambda_reg)
    : data_(std::move(data)), lambda_reg_(lambda_reg) {
  if (!(lambda_reg_ >= 0.0)) throw ConfigError("lambda_reg must be nonnegative");
}

double LogisticLoss::value(const LinearModel& x, Batch batch) const {
  return logistic_kernel(x, *data_, lambda_reg_, batch, nullptr);
}

double LogisticLoss::value_and_gradient(const LinearModel& x, Batch batch, Vector& grad) const {
  return logistic_kernel(x, *data_, lambda_reg_, batch, &grad);
}

DisparateImpactBinary::DisparateImpactBinary(std::shared_ptr<const Dataset> data, const std::string& attribute)
    : data_(std::move(data)), attribute_(data_->attribute_index(attribute)) {
  require_binary(*data_, attribute_, "di_binary");
}

double DisparateImpactBinary::value(const LinearModel& x, Batch batch) const {
  return di_binary_kernel(x, *data_, attribute_, batch, nullptr);
}

double DisparateImpactBinary::value_and_gradient(const LinearModel& x, Batch batch, Vector& grad) const {
  return di_binary_kernel(x, *data_, attribute_, batch, &grad);
}

DisparateImpactMulti::DisparateImpactMulti(std::shared_ptr<const Dataset> data, const std::string& attribute,
                                           double beta)
    : data_(std::move(data)), attribute_(data_->attribute_index(attribute)), beta_(beta) {
  if (!(beta_ > 0.0)) throw ConfigError("beta must be positive");
}

double DisparateImpactMulti::value(const LinearModel& x, Batch batch) const {
  return di_multi_kernel(x, *data_, attribute_, beta_, batch, nullptr);
}

double DisparateImpactMulti::value_and_gradient(const LinearModel& x, Batch batch, Vector& grad) const {
  return di_multi_kernel(x, *data_, attribute_, beta_, batch, &grad);
}

EqualOpportunityFnr::EqualOpportunityFnr(std::shared_ptr<const Dataset> data, const std::string& attribute,
                                         double beta)
    : data_(std::move(data)), attribute_(data_->attribute_index(attribute)), beta_(beta) {
  require_binary(*data_, attribute_, "eq_opp_fnr");
  if (!(beta_ > 0.0)) throw ConfigError("beta must be positive");
  if ((data_->labels().array() > 0.0).count() == 0) {
    throw DataError("eq_opp_fnr requires at least one positive label");
  }
}

double EqualOpportunityFnr::value(const LinearModel& x, Batch batch) const {
  return fnr_kernel(x, *data_, attribute_, beta_, batch, nullptr);
}

double EqualOpportunityFnr::value_and_gradient(const LinearModel& x, Batch batch, Vector& grad) const {
  return fnr_kernel(x, *data_, attribute_, beta_, batch, &grad);
}

QuadraticObjective::QuadraticObjective(Vector center, double scale) : center_(std::move(center)), scale_(scale) {
  if (center_.size() < 1) throw ConfigError("quadratic objective needs a nonempty center");
}

double QuadraticObjective::value(const LinearModel& x, Batch) const {
  if (x.params().size() != center_.size()) throw DataError("quadratic objective: dimension mismatch");
  return scale_ * (x.params() - center_).squaredNorm();
}

double QuadraticObjective::value_and_gradient(const LinearModel& x, Batch batch, Vector& grad) const {
  const double v = value(x, batch);
  grad = 2.0 * scale_ * (x.params() - center_);
  return v;
}

std::string to_string(ObjectiveKind kind) {
  switch (kind) {
    case ObjectiveKind::Logistic:
      return "logistic";
    case ObjectiveKind::DisparateImpactBinary:
      return "di_binary";
    case ObjectiveKind::DisparateImpactMulti:
      return "di_multi";
    case ObjectiveKind::EqualOpportunityFnr:
      return "eq_opp_fnr";
  }
  return "unknown";
}

ObjectiveKind parse_objective_kind(const std::string& s) {
  if (s == "logistic") return ObjectiveKind::Logistic;
  if (s == "di_binary") return ObjectiveKind::DisparateImpactBinary;
  if (s == "di_multi") return ObjectiveKind::DisparateImpactMulti;
  if (s == "eq_opp_fnr") return ObjectiveKind::EqualOpportunityFnr;
  throw ConfigError("unknown objective kind '" + s + "' (expected logistic, di_binary, di_multi, eq_opp_fnr)");
}

ObjectivePtr make_objective(const ObjectiveDescriptor& desc, std::shared_ptr<const Dataset> data) {
  switch (desc.kind) {
    case ObjectiveKind::Logistic:
      return std::make_shared<LogisticLoss>(std::move(data), desc.lambda_reg);
    case ObjectiveKind::DisparateImpactBinary:
      return std::make_shared<DisparateImpactBinary>(std::move(data), desc.attribute);
    case ObjectiveKind::DisparateImpactMulti:
      return std::make_shared<DisparateImpactMulti>(std::move(data), desc.attribute, desc.beta);
    case ObjectiveKind::EqualOpportunityFnr:
      return std::make_shared<EqualOpportunityFnr>(std::move(data), desc.attribute, desc.beta);
  }
  throw ConfigError("unknown objective kind");
}

ObjectiveSet::ObjectiveSet(std::vector<ObjectivePtr> objectives) : objectives_(std::move(objectives)) {
  if (objectives_.empty()) throw ConfigError("objective set is empty");
  for (const auto& o : objectives_) {
    if (!o) throw ConfigError("null objective");
    if (o->parameter_dim() != objectives_.front()->parameter_dim()) {
      throw ConfigError("objectives disagree on parameter dimension");
    }
  }
}

ObjectiveSet::ObjectiveSet(const std::vector<ObjectiveDescriptor>& descriptors, std::shared_ptr<const Dataset> data) {
  std::vector<ObjectivePtr> objs;
  for (const auto& d : descriptors) objs.push_back(make_objective(d, data));
  *this = ObjectiveSet(std::move(objs));
}

Vector ObjectiveSet::evaluate(const LinearModel& x) const {
  Vector f(static_cast<Eigen::Index>(objectives_.size()));
  for (std::size_t i = 0; i < objectives_.size(); ++i) f[static_cast<Eigen::Index>(i)] = objectives_[i]->value(x);
  return f;
}

// --- diagnostics -------------------------------------------------------------

FairnessReport fairness_report(const LinearModel& x, const Dataset& data, std::size_t attribute) {
  if (attribute >= data.attributes().size()) throw ConfigError("attribute index out of range");
  const auto& attr = data.attributes()[attribute];
  const auto k = attr.cardinality();
  const Vector m = margins(x, data);
  const auto& codes = data.codes(attribute);
  std::vector<std::size_t> count(k, 0), pos_pred(k, 0), pos_label(k, 0), false_neg(k, 0);
  for (std::size_t j = 0; j < data.size(); ++j) {
    const auto c = static_cast<std::size_t>(codes[j]);
    const bool pred_pos = m[static_cast<Eigen::Index>(j)] >= 0.0;
    const bool label_pos = data.labels()[static_cast<Eigen::Index>(j)] > 0.0;
    ++count[c];
    pos_pred[c] += pred_pos ? 1 : 0;
    if (label_pos) {
      ++pos_label[c];
      false_neg[c] += pred_pos ? 0 : 1;
    }
  }
  FairnessReport rep;
  bool fnr_ok = true;
  for (std::size_t i = 0; i < k; ++i) {
    if (count[i] == 0) {
      throw DataError("group '" + attr.categories[i] + "' of attribute '" + attr.name + "' is empty");
    }
    rep.positive_rate.push_back(static_cast<double>(pos_pred[i]) / static_cast<double>(count[i]));
    fnr_ok = fnr_ok && pos_label[i] > 0;
  }
  auto spread = [](const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi - *lo;
  };
  rep.cv = spread(rep.positive_rate);
  if (fnr_ok) {
    std::vector<double> fnr;
    for (std::size_t i = 0; i < k; ++i) {
      fnr.push_back(static_cast<double>(false_neg[i]) / static_cast<double>(pos_label[i]));
    }
    rep.cv_fnr = spread(fnr);
    rep.fnr = std::move(fnr);
  }
  return rep;
}

}  // namespace fairfront
