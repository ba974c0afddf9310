#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fairfront/common.hpp"
#include "fairfront/data.hpp"
#include "fairfront/model.hpp"

namespace fairfront {

// --- scalar helpers --------------------------------------------------------

// log(1 + e^x) without overflow.
double softplus(double x);
// 1 / (1 + e^-x) without overflow.
double sigmoid(double x);

// Soft maximum sum_i x_i e^{b x_i} / sum_i e^{b x_i}. Stable for large b*x.
double soft_max(std::span<const double> values, double beta);
// Partial derivatives of soft_max with respect to each argument.
std::vector<double> soft_max_gradient(std::span<const double> values, double beta);

// Smoothed min{0, t}: -softplus(-beta t) / beta. Within log(2)/beta of the
// hard min everywhere, exact in the limit |t| -> inf.
double soft_min_zero(double t, double beta);

// --- objective functions ---------------------------------------------------
//
// Each evaluates over `batch` (all samples when empty). Centering always uses
// the full-dataset attribute means stored on the Dataset. `attribute` is the
// position of the sensitive attribute in data.attributes().

// Mean logistic loss log(1 + exp(-y(c.z + b))) plus (lambda/2)|c|^2.
double eval_f1(const LinearModel& x, const Dataset& data, double lambda_reg, Batch batch = {});

// Squared decision-boundary covariance with a binary attribute, using the
// indicator of category 1. Throws ConfigError for non-binary attributes.
double eval_f2_di(const LinearModel& x, const Dataset& data, std::size_t attribute, Batch batch = {});

// Soft maximum (parameter beta) of the K per-category squared covariances.
double eval_f3_di(const LinearModel& x, const Dataset& data, std::size_t attribute, double beta,
                  Batch batch = {});

// Squared covariance of a binary attribute with the smoothed clipped margin
// of truly positive samples. Throws DataError when the dataset has no
// positive labels.
double eval_f4_fnr(const LinearModel& x, const Dataset& data, std::size_t attribute, double beta,
                   Batch batch = {});

// Plain decision-boundary covariance (1/B) sum (a_j - mean a) (c.z_j + b) for
// one category indicator; the quantity constrained by the epsilon baseline.
double boundary_covariance(const LinearModel& x, const Dataset& data, std::size_t attribute, std::size_t category,
                           Batch batch = {});

// --- objective interface ---------------------------------------------------

class Objective {
 public:
  virtual ~Objective() = default;

  virtual std::string name() const = 0;
  // Length of the packed parameter vector (c, b).
  virtual std::size_t parameter_dim() const = 0;
  // Population that batches index into; 0 for deterministic objectives,
  // which ignore the batch argument.
  virtual std::size_t sample_count() const = 0;

  virtual double value(const LinearModel& x, Batch batch = {}) const = 0;
  // Writes the gradient with respect to (c, b) into `grad` and returns the value.
  virtual double value_and_gradient(const LinearModel& x, Batch batch, Vector& grad) const = 0;

  Vector gradient(const LinearModel& x, Batch batch = {}) const {
    Vector g;
    value_and_gradient(x, batch, g);
    return g;
  }
};

using ObjectivePtr = std::shared_ptr<const Objective>;

class LogisticLoss final : public Objective {
 public:
  LogisticLoss(std::shared_ptr<const Dataset> data, double lambda_reg = 0.0);
  std::string name() const override { return "logistic"; }
  std::size_t parameter_dim() const override { return data_->feature_dim() + 1; }
  std::size_t sample_count() const override { return data_->size(); }
  double value(const LinearModel& x, Batch batch = {}) const override;
  double value_and_gradient(const LinearModel& x, Batch batch, Vector& grad) const override;

  double lambda_reg() const { return lambda_reg_; }

 private:
  std::shared_ptr<const Dataset> data_;
  double lambda_reg_;
};

class DisparateImpactBinary final : public Objective {
 public:
  DisparateImpactBinary(std::shared_ptr<const Dataset> data, const std::string& attribute);
  std::string name() const override { return "di_binary"; }
  std::size_t parameter_dim() const override { return data_->feature_dim() + 1; }
  std::size_t sample_count() const override { return data_->size(); }
  double value(const LinearModel& x, Batch batch = {}) const override;
  double value_and_gradient(const LinearModel& x, Batch batch, Vector& grad) const override;

 private:
  std::shared_ptr<const Dataset> data_;
  std::size_t attribute_;
};

class DisparateImpactMulti final : public Objective {
 public:
  DisparateImpactMulti(std::shared_ptr<const Dataset> data, const std::string& attribute, double beta = 8.0);
  std::string name() const override { return "di_multi"; }
  std::size_t parameter_dim() const override { return data_->feature_dim() + 1; }
  std::size_t sample_count() const override { return data_->size(); }
  double value(const LinearModel& x, Batch batch = {}) const override;
  double value_and_gradient(const LinearModel& x, Batch batch, Vector& grad) const override;

 private:
  std::shared_ptr<const Dataset> data_;
  std::size_t attribute_;
  double beta_;
};

class EqualOpportunityFnr final : public Objective {
 public:
  EqualOpportunityFnr(std::shared_ptr<const Dataset> data, const std::string& attribute, double beta = 8.0);
  std::string name() const override { return "eq_opp_fnr"; }
  std::size_t parameter_dim() const override { return data_->feature_dim() + 1; }
  std::size_t sample_count() const override { return data_->size(); }
  double value(const LinearModel& x, Batch batch = {}) const override;
  double value_and_gradient(const LinearModel& x, Batch batch, Vector& grad) const override;

 private:
  std::shared_ptr<const Dataset> data_;
  std::size_t attribute_;
  double beta_;
};

// scale * |x - center|^2 over the packed parameter vector. Deterministic;
// used for toy problems with a known Pareto set.
class QuadraticObjective final : public Objective {
 public:
  explicit QuadraticObjective(Vector center, double scale = 1.0);
  std::string name() const override { return "quadratic"; }
  std::size_t parameter_dim() const override { return static_cast<std::size_t>(center_.size()); }
  std::size_t sample_count() const override { return 0; }
  double value(const LinearModel& x, Batch batch = {}) const override;
  double value_and_gradient(const LinearModel& x, Batch batch, Vector& grad) const override;

 private:
  Vector center_;
  double scale_;
};

enum class ObjectiveKind { Logistic, DisparateImpactBinary, DisparateImpactMulti, EqualOpportunityFnr };

std::string to_string(ObjectiveKind kind);
// Accepts "logistic", "di_binary", "di_multi", "eq_opp_fnr".
ObjectiveKind parse_objective_kind(const std::string& s);

struct ObjectiveDescriptor {
  ObjectiveKind kind = ObjectiveKind::Logistic;
  std::string attribute;
  double beta = 8.0;
  double lambda_reg = 0.0;
};

ObjectivePtr make_objective(const ObjectiveDescriptor& desc, std::shared_ptr<const Dataset> data);

// Ordered objectives sharing one parameter space.
class ObjectiveSet {
 public:
  ObjectiveSet() = default;
  explicit ObjectiveSet(std::vector<ObjectivePtr> objectives);
  ObjectiveSet(const std::vector<ObjectiveDescriptor>& descriptors, std::shared_ptr<const Dataset> data);

  std::size_t size() const { return objectives_.size(); }
  const Objective& operator[](std::size_t i) const { return *objectives_[i]; }
  std::size_t parameter_dim() const { return objectives_.empty() ? 0 : objectives_.front()->parameter_dim(); }

  // Full-batch objective vector.
  Vector evaluate(const LinearModel& x) const;

 private:
  std::vector<ObjectivePtr> objectives_;
};

// --- diagnostics -----------------------------------------------------------

struct FairnessReport {
  std::vector<double> positive_rate;               // per category
  std::optional<std::vector<double>> fnr;          // per category, when every group has positives
  double cv = 0.0;                                 // max - min positive rate
  std::optional<double> cv_fnr;                    // max - min FNR
};

// Empirical group rates of the predictor on `data`. Throws DataError naming
// the group when a category has no samples.
FairnessReport fairness_report(const LinearModel& x, const Dataset& data, std::size_t attribute);

}  // namespace fairfront
