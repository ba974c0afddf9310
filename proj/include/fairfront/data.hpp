#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fairfront/common.hpp"

namespace fairfront {

// Categorical sensitive attribute; sample codes index into `categories`.
struct SensitiveAttribute {
  std::string name;
  std::vector<std::string> categories;

  std::size_t cardinality() const { return categories.size(); }
};

// One row of a dataset, materialized.
struct Sample {
  Vector features;
  std::vector<int> sensitive;
  int label = 1;
};

// Encoded classification data: real features, one or more categorical
// sensitive attributes and +-1 labels. Immutable after construction.
//
// The indicator cache holds, per attribute and category, the 0/1 column a^i
// and its mean. The mean is always taken over the whole dataset, so objectives
// bound to a dataset use the full-data mean even when evaluated on a batch.
class Dataset {
 public:
  Dataset() = default;

  // Throws DataError when an invariant is violated (label not +-1, code out
  // of range, shape mismatch).
  Dataset(RowMatrix features, std::vector<std::string> feature_names, std::vector<bool> continuous,
          std::vector<SensitiveAttribute> attributes, std::vector<std::vector<int>> codes,
          std::vector<int> labels);

  std::size_t size() const { return static_cast<std::size_t>(features_.rows()); }
  std::size_t feature_dim() const { return static_cast<std::size_t>(features_.cols()); }
  bool empty() const { return size() == 0; }

  const RowMatrix& features() const { return features_; }
  const Vector& labels() const { return labels_; }
  const std::vector<std::string>& feature_names() const { return feature_names_; }
  const std::vector<bool>& continuous() const { return continuous_; }

  const std::vector<SensitiveAttribute>& attributes() const { return attributes_; }
  // Position of the named attribute; throws ConfigError when absent.
  std::size_t attribute_index(const std::string& name) const;
  const std::vector<int>& codes(std::size_t attribute) const { return codes_.at(attribute); }

  const Vector& indicator(std::size_t attribute, std::size_t category) const {
    return indicators_.at(attribute).at(category);
  }
  double indicator_mean(std::size_t attribute, std::size_t category) const {
    return indicator_means_.at(attribute).at(category);
  }

  Sample sample(std::size_t i) const;

  // Rows at `indices`, in that order. Indicator means are recomputed.
  Dataset subset(std::span<const std::size_t> indices) const;

  // Rows of `other` appended; schemas (feature names, attributes) must match.
  Dataset concat(const Dataset& other) const;

  // Same schema, features replaced.
  Dataset with_features(RowMatrix features) const;

  bool same_schema(const Dataset& other) const;

  friend bool operator==(const Dataset& a, const Dataset& b);

 private:
  void build_cache();

  RowMatrix features_;
  std::vector<std::string> feature_names_;
  std::vector<bool> continuous_;
  std::vector<SensitiveAttribute> attributes_;
  std::vector<std::vector<int>> codes_;
  Vector labels_;
  std::vector<std::vector<Vector>> indicators_;
  std::vector<std::vector<double>> indicator_means_;
};

// Sensitive column description for CSV loading. When `categories` is empty
// the distinct values are taken in sorted order.
struct SensitiveColumn {
  std::string column;
  std::vector<std::string> categories;
};

struct CsvSchema {
  std::string label;
  // Cell value mapped to +1; when empty the label must be numeric and values
  // > 0 map to +1.
  std::string positive_label;
  std::vector<SensitiveColumn> sensitive;
  std::vector<std::string> categorical;
  std::vector<std::string> continuous;
  // Numeric columns copied verbatim as non-continuous features.
  std::vector<std::string> passthrough;
  // Tokens treated as missing; rows containing them in used columns are dropped.
  std::vector<std::string> missing_tokens{"", "?", "NA"};
  bool normalize = true;
};

// Per-column affine map z' = (z - mean) / scale. Identity on one-hot columns.
struct FeatureScaling {
  Vector mean;
  Vector scale;

  static FeatureScaling identity(std::size_t dim);
  bool is_identity() const;
};

// Z-score statistics of the continuous columns of `data` (population std).
// Zero-variance columns get scale 1, which maps them to the constant 0.
FeatureScaling fit_scaling(const Dataset& data, std::vector<std::string>* warnings = nullptr);
Dataset apply_scaling(const Dataset& data, const FeatureScaling& scaling);

Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema,
                 std::vector<std::string>* warnings = nullptr);

// Writes the encoded dataset with a header; together with canonical_schema()
// the file reloads to an identical Dataset.
void write_csv(const Dataset& data, const std::filesystem::path& path);
CsvSchema canonical_schema(const Dataset& data);

// UCI Adult: adult.data + adult.test from `raw_dir`. Rows with missing values
// are dropped, country merged to US / non-US, low education levels merged.
// Sensitive attributes: gender (Male, Female) and race (White, Black,
// Asian-Pac-Islander, Amer-Indian-Eskimo, Other). Features are not normalized
// here; callers fit scaling on their training split.
Dataset preprocess_adult(const std::filesystem::path& raw_dir);

// ProPublica COMPAS two-year file: Black and White defendants only, the
// standard ProPublica row filters when their columns are present, label +1
// for non-recidivists. Sensitive attribute: race (White, Black).
Dataset load_compas(const std::filesystem::path& path);

struct SyntheticParams {
  double mean_pos[2] = {2.0, 2.0};
  double cov_pos[2][2] = {{5.0, 1.0}, {1.0, 5.0}};
  double mean_neg[2] = {-2.0, -2.0};
  double cov_neg[2][2] = {{10.0, 1.0}, {1.0, 3.0}};
  // Rotation applied to z before evaluating the likelihood ratio for A.
  double rotation = 0.78539816339744830962;
};

// Labels uniform on {-1,+1}; 2-D class-conditional Gaussian features; binary
// attribute "s" drawn from Bernoulli(p(Rz)) with p the posterior of the
// positive class under the same Gaussians.
Dataset generate_synthetic(std::size_t n, std::uint64_t seed, const SyntheticParams& params = {});

struct SplitSpec {
  double train = 0.6;
  double valid = 0.1;
  double test = 0.3;
  std::uint64_t seed = 1;
};

struct SplitResult {
  Dataset train;
  Dataset valid;
  Dataset test;
};

// Seeded shuffle then contiguous cut. Part sizes are rounded fractions of N
// (the test part takes the remainder). A part with a nonzero fraction that
// ends up empty is an error.
SplitResult split(const Dataset& data, const SplitSpec& spec);

// Effective size ceil(base * growth^k), capped at N.
struct BatchSchedule {
  std::size_t base = 1;
  double growth = 1.0;

  std::size_t size_at(std::size_t k, std::size_t population) const;
};

// Uniform indices with replacement into a population of size `population`.
IndexList sample_batch(std::size_t population, const BatchSchedule& schedule, std::size_t k, Rng& rng);

}  // namespace fairfront
