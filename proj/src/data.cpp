#include "fairfront/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "csv.hpp"

namespace fairfront {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Dataset

Dataset::Dataset(RowMatrix features, std::vector<std::string> feature_names, std::vector<bool> continuous,
                 std::vector<SensitiveAttribute> attributes, std::vector<std::vector<int>> codes,
                 std::vector<int> labels)
    : features_(std::move(features)),
      feature_names_(std::move(feature_names)),
      continuous_(std::move(continuous)),
      attributes_(std::move(attributes)),
      codes_(std::move(codes)) {
  const auto n = static_cast<std::size_t>(features_.rows());
  const auto d = static_cast<std::size_t>(features_.cols());
  if (feature_names_.size() != d) throw DataError("feature name count does not match feature dimension");
  if (continuous_.size() != d) throw DataError("continuous flag count does not match feature dimension");
  if (labels.size() != n) throw DataError("label count does not match sample count");
  if (codes_.size() != attributes_.size()) throw DataError("one code column per sensitive attribute is required");
  for (std::size_t a = 0; a < attributes_.size(); ++a) {
    const auto k = attributes_[a].cardinality();
    if (k < 2) throw DataError("sensitive attribute '" + attributes_[a].name + "' needs at least 2 categories");
    if (codes_[a].size() != n) throw DataError("code column for '" + attributes_[a].name + "' has wrong length");
    for (std::size_t j = 0; j < n; ++j) {
      const int c = codes_[a][j];
      if (c < 0 || static_cast<std::size_t>(c) >= k) {
        throw DataError("sample " + std::to_string(j) + ": code " + std::to_string(c) + " out of range for '" +
                        attributes_[a].name + "'");
      }
    }
  }
  labels_.resize(static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) {
    if (labels[j] != 1 && labels[j] != -1) {
      throw DataError("sample " + std::to_string(j) + ": label must be -1 or +1");
    }
    labels_[static_cast<Eigen::Index>(j)] = labels[j];
  }
  if (!features_.allFinite()) throw DataError("features contain non-finite values");
  build_cache();
}

void Dataset::build_cache() {
  const auto n = static_cast<Eigen::Index>(size());
  indicators_.assign(attributes_.size(), {});
  indicator_means_.assign(attributes_.size(), {});
  for (std::size_t a = 0; a < attributes_.size(); ++a) {
    const auto k = attributes_[a].cardinality();
    indicators_[a].assign(k, Vector::Zero(n));
    for (Eigen::Index j = 0; j < n; ++j) {
      indicators_[a][static_cast<std::size_t>(codes_[a][static_cast<std::size_t>(j)])][j] = 1.0;
    }
    indicator_means_[a].resize(k);
    for (std::size_t i = 0; i < k; ++i) {
      indicator_means_[a][i] = n == 0 ? 0.0 : indicators_[a][i].sum() / static_cast<double>(n);
    }
  }
}

std::size_t Dataset::attribute_index(const std::string& name) const {
  for (std::size_t a = 0; a < attributes_.size(); ++a) {
    if (attributes_[a].name == name) return a;
  }
  throw ConfigError("unknown sensitive attribute '" + name + "'");
}

Sample Dataset::sample(std::size_t i) const {
  Sample s;
  s.features = features_.row(static_cast<Eigen::Index>(i)).transpose();
  for (const auto& col : codes_) s.sensitive.push_back(col.at(i));
  s.label = static_cast<int>(labels_[static_cast<Eigen::Index>(i)]);
  return s;
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  RowMatrix f(static_cast<Eigen::Index>(indices.size()), features_.cols());
  std::vector<std::vector<int>> codes(codes_.size());
  std::vector<int> labels;
  labels.reserve(indices.size());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    const auto j = indices[r];
    if (j >= size()) throw DataError("subset index out of range");
    f.row(static_cast<Eigen::Index>(r)) = features_.row(static_cast<Eigen::Index>(j));
    for (std::size_t a = 0; a < codes_.size(); ++a) codes[a].push_back(codes_[a][j]);
    labels.push_back(static_cast<int>(labels_[static_cast<Eigen::Index>(j)]));
  }
  return Dataset(std::move(f), feature_names_, continuous_, attributes_, std::move(codes), std::move(labels));
}

bool Dataset::same_schema(const Dataset& other) const {
  if (feature_names_ != other.feature_names_ || continuous_ != other.continuous_) return false;
  if (attributes_.size() != other.attributes_.size()) return false;
  for (std::size_t a = 0; a < attributes_.size(); ++a) {
    if (attributes_[a].name != other.attributes_[a].name ||
        attributes_[a].categories != other.attributes_[a].categories) {
      return false;
    }
  }
  return true;
}

Dataset Dataset::concat(const Dataset& other) const {
  if (!same_schema(other)) throw DataError("cannot concatenate datasets with different schemas");
  RowMatrix f(features_.rows() + other.features_.rows(), features_.cols());
  f.topRows(features_.rows()) = features_;
  f.bottomRows(other.features_.rows()) = other.features_;
  std::vector<std::vector<int>> codes = codes_;
  for (std::size_t a = 0; a < codes.size(); ++a) {
    codes[a].insert(codes[a].end(), other.codes_[a].begin(), other.codes_[a].end());
  }
  std::vector<int> labels;
  labels.reserve(size() + other.size());
  for (Eigen::Index j = 0; j < labels_.size(); ++j) labels.push_back(static_cast<int>(labels_[j]));
  for (Eigen::Index j = 0; j < other.labels_.size(); ++j) labels.push_back(static_cast<int>(other.labels_[j]));
  return Dataset(std::move(f), feature_names_, continuous_, attributes_, std::move(codes), std::move(labels));
}

Dataset Dataset::with_features(RowMatrix features) const {
  std::vector<int> labels(size());
  for (std::size_t j = 0; j < size(); ++j) labels[j] = static_cast<int>(labels_[static_cast<Eigen::Index>(j)]);
  return Dataset(std::move(features), feature_names_, continuous_, attributes_, codes_, std::move(labels));
}

bool operator==(const Dataset& a, const Dataset& b) {
  return a.same_schema(b) && a.features_.rows() == b.features_.rows() && a.features_ == b.features_ &&
         a.codes_ == b.codes_ && a.labels_ == b.labels_;
}

// ---------------------------------------------------------------------------
// Scaling

FeatureScaling FeatureScaling::identity(std::size_t dim) {
  return {Vector::Zero(static_cast<Eigen::Index>(dim)), Vector::Ones(static_cast<Eigen::Index>(dim))};
}

bool FeatureScaling::is_identity() const {
  return (mean.array() == 0.0).all() && (scale.array() == 1.0).all();
}

FeatureScaling fit_scaling(const Dataset& data, std::vector<std::string>* warnings) {
  auto scaling = FeatureScaling::identity(data.feature_dim());
  if (data.empty()) return scaling;
  const auto n = static_cast<double>(data.size());
  const auto& f = data.features();
  for (std::size_t c = 0; c < data.feature_dim(); ++c) {
    if (!data.continuous()[c]) continue;
    const auto col = f.col(static_cast<Eigen::Index>(c));
    const double mean = col.sum() / n;
    const double var = (col.array() - mean).square().sum() / n;
    const double sd = std::sqrt(var);
    scaling.mean[static_cast<Eigen::Index>(c)] = mean;
    if (sd > 0.0 && std::isfinite(sd)) {
      scaling.scale[static_cast<Eigen::Index>(c)] = sd;
    } else if (warnings) {
      warnings->push_back("column '" + data.feature_names()[c] + "' has zero variance; encoded as constant 0");
    }
  }
  return scaling;
}

Dataset apply_scaling(const Dataset& data, const FeatureScaling& scaling) {
  if (static_cast<std::size_t>(scaling.mean.size()) != data.feature_dim()) {
    throw DataError("scaling dimension does not match dataset");
  }
  RowMatrix f = data.features();
  for (Eigen::Index c = 0; c < f.cols(); ++c) {
    f.col(c) = (f.col(c).array() - scaling.mean[c]) / scaling.scale[c];
  }
  return data.with_features(std::move(f));
}

// ---------------------------------------------------------------------------
// CSV encoding

namespace {

bool is_missing(const std::string& cell, const std::vector<std::string>& tokens) {
  return std::find(tokens.begin(), tokens.end(), cell) != tokens.end();
}

double parse_number(const std::string& cell, std::size_t row, const std::string& column) {
  double v = 0.0;
  const char* begin = cell.data();
  const char* end = cell.data() + cell.size();
  if (!cell.empty() && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw DataError("row " + std::to_string(row) + ": column '" + column + "': cannot parse '" + cell +
                    "' as a number");
  }
  return v;
}

std::size_t column_of(const std::vector<std::string>& header, const std::string& name) {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw DataError("schema error: missing column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

enum class Role { Unused, Continuous, Categorical, Passthrough };

}  // namespace

namespace detail {

// Encodes a parsed table according to `schema`. Row numbers in errors are
// 1-based data rows (header excluded).
Dataset encode_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows,
                     const CsvSchema& schema, std::vector<std::string>* warnings) {
  const std::size_t label_col = column_of(header, schema.label);
  std::vector<Role> roles(header.size(), Role::Unused);
  for (const auto& c : schema.continuous) roles[column_of(header, c)] = Role::Continuous;
  for (const auto& c : schema.categorical) roles[column_of(header, c)] = Role::Categorical;
  for (const auto& c : schema.passthrough) roles[column_of(header, c)] = Role::Passthrough;
  std::vector<std::size_t> sens_cols;
  for (const auto& s : schema.sensitive) sens_cols.push_back(column_of(header, s.column));

  std::vector<std::size_t> used{label_col};
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (roles[c] != Role::Unused) used.push_back(c);
  }
  used.insert(used.end(), sens_cols.begin(), sens_cols.end());

  std::vector<std::size_t> keep;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != header.size()) {
      throw DataError("row " + std::to_string(r + 1) + ": expected " + std::to_string(header.size()) +
                      " fields, found " + std::to_string(rows[r].size()));
    }
    bool missing = false;
    for (auto c : used) missing = missing || is_missing(rows[r][c], schema.missing_tokens);
    if (!missing) keep.push_back(r);
  }

  // Category levels: sorted distinct values per categorical column.
  std::map<std::size_t, std::vector<std::string>> levels;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (roles[c] != Role::Categorical) continue;
    std::set<std::string> distinct;
    for (auto r : keep) distinct.insert(rows[r][c]);
    levels[c] = {distinct.begin(), distinct.end()};
  }

  std::vector<std::string> names;
  std::vector<bool> continuous;
  for (std::size_t c = 0; c < header.size(); ++c) {
    switch (roles[c]) {
      case Role::Continuous:
        names.push_back(header[c]);
        continuous.push_back(true);
        break;
      case Role::Passthrough:
        names.push_back(header[c]);
        continuous.push_back(false);
        break;
      case Role::Categorical:
        for (const auto& v : levels[c]) {
          names.push_back(header[c] + "=" + v);
          continuous.push_back(false);
        }
        break;
      case Role::Unused:
        break;
    }
  }

  std::vector<SensitiveAttribute> attributes;
  std::vector<std::unordered_map<std::string, int>> lookup;
  for (std::size_t s = 0; s < schema.sensitive.size(); ++s) {
    SensitiveAttribute attr{schema.sensitive[s].column, schema.sensitive[s].categories};
    if (attr.categories.empty()) {
      std::set<std::string> distinct;
      for (auto r : keep) distinct.insert(rows[r][sens_cols[s]]);
      attr.categories = {distinct.begin(), distinct.end()};
    }
    std::unordered_map<std::string, int> m;
    for (std::size_t i = 0; i < attr.categories.size(); ++i) m[attr.categories[i]] = static_cast<int>(i);
    lookup.push_back(std::move(m));
    attributes.push_back(std::move(attr));
  }

  RowMatrix features(static_cast<Eigen::Index>(keep.size()), static_cast<Eigen::Index>(names.size()));
  features.setZero();
  std::vector<std::vector<int>> codes(attributes.size());
  std::vector<int> labels;
  for (std::size_t out = 0; out < keep.size(); ++out) {
    const auto r = keep[out];
    const auto& row = rows[r];
    Eigen::Index col = 0;
    for (std::size_t c = 0; c < header.size(); ++c) {
      switch (roles[c]) {
        case Role::Continuous:
        case Role::Passthrough:
          features(static_cast<Eigen::Index>(out), col++) = parse_number(row[c], r + 1, header[c]);
          break;
        case Role::Categorical: {
          const auto& lv = levels[c];
          const auto pos = std::lower_bound(lv.begin(), lv.end(), row[c]) - lv.begin();
          features(static_cast<Eigen::Index>(out), col + pos) = 1.0;
          col += static_cast<Eigen::Index>(lv.size());
          break;
        }
        case Role::Unused:
          break;
      }
    }
    for (std::size_t s = 0; s < attributes.size(); ++s) {
      auto it = lookup[s].find(row[sens_cols[s]]);
      if (it == lookup[s].end()) {
        throw DataError("row " + std::to_string(r + 1) + ": unknown category '" + row[sens_cols[s]] +
                        "' for sensitive column '" + attributes[s].name + "'");
      }
      codes[s].push_back(it->second);
    }
    const auto& lab = row[label_col];
    if (!schema.positive_label.empty()) {
      labels.push_back(lab == schema.positive_label ? 1 : -1);
    } else {
      labels.push_back(parse_number(lab, r + 1, schema.label) > 0.0 ? 1 : -1);
    }
  }

  Dataset data(std::move(features), std::move(names), std::move(continuous), std::move(attributes),
               std::move(codes), std::move(labels));
  if (schema.normalize) data = apply_scaling(data, fit_scaling(data, warnings));
  return data;
}

}  // namespace detail

Dataset load_csv(const fs::path& path, const CsvSchema& schema, std::vector<std::string>* warnings) {
  auto table = csv::read_file(path);
  if (table.header.empty()) throw DataError("'" + path.string() + "' has no header row");
  return detail::encode_table(table.header, table.rows, schema, warnings);
}

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

constexpr const char* kCanonicalLabel = "label";

}  // namespace

void write_csv(const Dataset& data, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
  std::vector<std::string> header = data.feature_names();
  for (const auto& a : data.attributes()) header.push_back(a.name);
  header.push_back(kCanonicalLabel);
  std::set<std::string> distinct(header.begin(), header.end());
  if (distinct.size() != header.size()) throw DataError("column names collide; cannot write canonical CSV");
  out << csv::join(header) << '\n';
  for (std::size_t j = 0; j < data.size(); ++j) {
    std::vector<std::string> row;
    for (std::size_t c = 0; c < data.feature_dim(); ++c) {
      row.push_back(format_double(data.features()(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(c))));
    }
    for (std::size_t a = 0; a < data.attributes().size(); ++a) {
      row.push_back(data.attributes()[a].categories[static_cast<std::size_t>(data.codes(a)[j])]);
    }
    row.push_back(data.labels()[static_cast<Eigen::Index>(j)] > 0 ? "1" : "-1");
    out << csv::join(row) << '\n';
  }
}

CsvSchema canonical_schema(const Dataset& data) {
  CsvSchema s;
  s.label = kCanonicalLabel;
  s.normalize = false;
  s.missing_tokens.clear();
  for (std::size_t c = 0; c < data.feature_dim(); ++c) {
    (data.continuous()[c] ? s.continuous : s.passthrough).push_back(data.feature_names()[c]);
  }
  for (const auto& a : data.attributes()) s.sensitive.push_back({a.name, a.categories});
  return s;
}


// ---------------------------------------------------------------------------
// Adult / COMPAS

namespace {

const std::vector<std::string> kAdultColumns = {
    "age",           "workclass",  "fnlwgt",    "education",     "education-num",
    "marital-status", "occupation", "relationship", "race",        "sex",
    "capital-gain",  "capital-loss", "hours-per-week", "native-country", "income"};

std::string merge_education(const std::string& e) {
  if (e == "Preschool" || e == "1st-4th" || e == "5th-6th" || e == "7th-8th") return "Preschool-8th";
  if (e == "9th" || e == "10th" || e == "11th" || e == "12th") return "9th-12th";
  return e;
}

void read_adult_file(const fs::path& p, std::vector<std::vector<std::string>>& rows) {
  std::ifstream in(p);
  if (!in) {
    throw DataError("cannot open '" + p.string() +
                    "'; download adult.data and adult.test from the UCI Machine Learning Repository "
                    "(https://archive.ics.uci.edu/dataset/2/adult) into this directory");
  }
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '|') continue;
    auto fields = csv::split_line(line);
    if (fields.size() != kAdultColumns.size()) continue;
    auto& income = fields.back();
    if (!income.empty() && income.back() == '.') income.pop_back();
    fields[3] = merge_education(fields[3]);
    fields[13] = fields[13] == "United-States" ? "US" : (fields[13] == "?" ? "?" : "Non-US");
    rows.push_back(std::move(fields));
  }
}

}  // namespace

Dataset preprocess_adult(const fs::path& raw_dir) {
  std::vector<std::vector<std::string>> rows;
  read_adult_file(raw_dir / "adult.data", rows);
  read_adult_file(raw_dir / "adult.test", rows);
  CsvSchema schema;
  schema.label = "income";
  schema.positive_label = ">50K";
  schema.sensitive = {{"sex", {"Male", "Female"}},
                      {"race", {"White", "Black", "Asian-Pac-Islander", "Amer-Indian-Eskimo", "Other"}}};
  schema.continuous = {"age", "education-num", "capital-gain", "capital-loss", "hours-per-week"};
  schema.categorical = {"workclass", "education", "marital-status", "occupation", "relationship",
                        "native-country"};
  schema.missing_tokens = {"?", ""};
  schema.normalize = false;
  // Missing values anywhere in the record drop the row.
  std::vector<std::vector<std::string>> complete;
  for (auto& r : rows) {
    if (std::none_of(r.begin(), r.end(), [](const std::string& c) { return c == "?" || c.empty(); })) {
      complete.push_back(std::move(r));
    }
  }
  auto data = detail::encode_table(kAdultColumns, complete, schema, nullptr);
  // Exposed names: gender and race.
  auto attrs = data.attributes();
  attrs[0].name = "gender";
  std::vector<std::vector<int>> codes{data.codes(0), data.codes(1)};
  std::vector<int> labels(data.size());
  for (std::size_t j = 0; j < data.size(); ++j) labels[j] = static_cast<int>(data.labels()[static_cast<Eigen::Index>(j)]);
  return Dataset(data.features(), data.feature_names(), data.continuous(), std::move(attrs), std::move(codes),
                 std::move(labels));
}

Dataset load_compas(const fs::path& path) {
  auto table = csv::read_file(path);
  const auto& h = table.header;
  auto find = [&](const std::string& name) -> std::optional<std::size_t> {
    auto it = std::find(h.begin(), h.end(), name);
    if (it == h.end()) return std::nullopt;
    return static_cast<std::size_t>(it - h.begin());
  };
  const auto race = column_of(h, "race");
  const auto recid = column_of(h, "two_year_recid");
  const auto charge = column_of(h, "c_charge_degree");
  const auto days = find("days_b_screening_arrest");
  const auto is_recid = find("is_recid");
  const auto score_text = find("score_text");

  std::vector<std::string> header{"sex", "age", "priors_count", "c_charge_degree", "race", "label"};
  const auto sex = column_of(h, "sex");
  const auto age = column_of(h, "age");
  const auto priors = column_of(h, "priors_count");

  std::vector<std::vector<std::string>> rows;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (row.size() != h.size()) continue;
    std::string rc = row[race];
    if (rc == "African-American") {
      rc = "Black";
    } else if (rc == "Caucasian") {
      rc = "White";
    } else {
      continue;
    }
    if (days) {
      if (row[*days].empty()) continue;
      const double d = parse_number(row[*days], r + 1, "days_b_screening_arrest");
      if (d > 30 || d < -30) continue;
    }
    if (is_recid && row[*is_recid] == "-1") continue;
    if (row[charge] == "O") continue;
    if (score_text && row[*score_text] == "N/A") continue;
    const std::string label = row[recid] == "0" ? "1" : "-1";
    rows.push_back({row[sex], row[age], row[priors], row[charge], rc, label});
  }
  CsvSchema schema;
  schema.label = "label";
  schema.sensitive = {{"race", {"White", "Black"}}};
  schema.continuous = {"age", "priors_count"};
  schema.categorical = {"sex", "c_charge_degree"};
  schema.normalize = false;
  return detail::encode_table(header, rows, schema, nullptr);
}

// ---------------------------------------------------------------------------
// Synthetic

namespace {

struct Gaussian2 {
  Eigen::Vector2d mean;
  Eigen::Matrix2d chol;
  Eigen::Matrix2d inv;
  double log_norm;

  Gaussian2(const double m[2], const double c[2][2]) {
    mean << m[0], m[1];
    Eigen::Matrix2d cov;
    cov << c[0][0], c[0][1], c[1][0], c[1][1];
    Eigen::LLT<Eigen::Matrix2d> llt(cov);
    if (llt.info() != Eigen::Success) throw ConfigError("synthetic covariance is not positive definite");
    chol = llt.matrixL();
    inv = cov.inverse();
    log_norm = -std::log(2.0 * 3.14159265358979323846) - 0.5 * std::log(cov.determinant());
  }

  double log_pdf(const Eigen::Vector2d& x) const {
    const Eigen::Vector2d d = x - mean;
    return log_norm - 0.5 * d.dot(inv * d);
  }
};

}  // namespace

Dataset generate_synthetic(std::size_t n, std::uint64_t seed, const SyntheticParams& params) {
  if (n < 1) throw ConfigError("synthetic dataset size must be >= 1");
  const Gaussian2 pos(params.mean_pos, params.cov_pos);
  const Gaussian2 neg(params.mean_neg, params.cov_neg);
  const double cs = std::cos(params.rotation);
  const double sn = std::sin(params.rotation);

  Rng rng(seed);
  std::bernoulli_distribution coin(0.5);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  RowMatrix features(static_cast<Eigen::Index>(n), 2);
  std::vector<int> labels(n);
  std::vector<int> attr(n);
  for (std::size_t j = 0; j < n; ++j) {
    const bool positive = coin(rng);
    const Gaussian2& g = positive ? pos : neg;
    Eigen::Vector2d xi;
    xi[0] = normal(rng);
    xi[1] = normal(rng);
    const Eigen::Vector2d z = g.mean + g.chol * xi;
    // Row vector times [[cos, -sin], [sin, cos]].
    const Eigen::Vector2d zr(z[0] * cs + z[1] * sn, -z[0] * sn + z[1] * cs);
    const double p = 1.0 / (1.0 + std::exp(neg.log_pdf(zr) - pos.log_pdf(zr)));
    attr[j] = unif(rng) < p ? 1 : 0;
    labels[j] = positive ? 1 : -1;
    features.row(static_cast<Eigen::Index>(j)) = z.transpose();
  }
  return Dataset(std::move(features), {"z0", "z1"}, {true, true}, {SensitiveAttribute{"s", {"0", "1"}}},
                 {std::move(attr)}, std::move(labels));
}

// ---------------------------------------------------------------------------
// Splitting and batches

SplitResult split(const Dataset& data, const SplitSpec& spec) {
  const double fr[3] = {spec.train, spec.valid, spec.test};
  for (double f : fr) {
    if (!(f >= 0.0) || !std::isfinite(f)) throw ConfigError("split fractions must be nonnegative");
  }
  if (std::abs(fr[0] + fr[1] + fr[2] - 1.0) > 1e-9) throw ConfigError("split fractions must sum to 1");
  const std::size_t n = data.size();
  const auto n_train = static_cast<std::size_t>(std::llround(fr[0] * static_cast<double>(n)));
  const auto n_valid = std::min(n - std::min(n, n_train),
                                static_cast<std::size_t>(std::llround(fr[1] * static_cast<double>(n))));
  if (n_train > n) throw DataError("split: dataset too small");
  const std::size_t n_test = n - n_train - n_valid;
  const std::size_t sizes[3] = {n_train, n_valid, n_test};
  const char* names[3] = {"train", "valid", "test"};
  for (int i = 0; i < 3; ++i) {
    if (fr[i] > 0.0 && sizes[i] == 0) {
      throw DataError(std::string("split: ") + names[i] + " part is empty for n=" + std::to_string(n));
    }
  }
  IndexList perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(spec.seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  const std::span<const std::size_t> all(perm);
  return {data.subset(all.subspan(0, n_train)), data.subset(all.subspan(n_train, n_valid)),
          data.subset(all.subspan(n_train + n_valid, n_test))};
}

std::size_t BatchSchedule::size_at(std::size_t k, std::size_t population) const {
  if (base < 1) throw ConfigError("batch base size must be >= 1");
  if (!(growth >= 1.0)) throw ConfigError("batch growth ratio must be >= 1");
  const double v = static_cast<double>(base) * std::pow(growth, static_cast<double>(k));
  if (!(v < static_cast<double>(population))) return population;
  // Absorb round-off so that exact integers are not bumped up.
  const double c = std::ceil(v * (1.0 - 4.0 * std::numeric_limits<double>::epsilon()));
  return std::min(population, static_cast<std::size_t>(c));
}

IndexList sample_batch(std::size_t population, const BatchSchedule& schedule, std::size_t k, Rng& rng) {
  if (population == 0) throw DataError("cannot sample a batch from an empty dataset");
  const auto b = schedule.size_at(k, population);
  std::uniform_int_distribution<std::size_t> pick(0, population - 1);
  IndexList idx(b);
  for (auto& i : idx) i = pick(rng);
  return idx;
}

}  // namespace fairfront
