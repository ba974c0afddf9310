#pragma once

#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "fairfront/common.hpp"
#include "fairfront/data.hpp"
#include "fairfront/model.hpp"

namespace testing {

using fairfront::Dataset;
using fairfront::RowMatrix;
using fairfront::Vector;

// Random continuous features, one binary attribute "s" and, when k3 > 0, a
// second attribute "g" with k3 levels.
inline Dataset random_dataset(std::size_t n, std::size_t d, std::uint64_t seed, std::size_t k3 = 0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::uniform_int_distribution<int> bit(0, 1);
  RowMatrix X(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  std::vector<int> y(n), s(n), g(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < d; ++i) X(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = nd(rng);
    y[j] = bit(rng) ? 1 : -1;
    s[j] = static_cast<int>(j % 2);
    g[j] = k3 ? static_cast<int>(j % k3) : 0;
  }
  std::vector<std::string> names;
  for (std::size_t i = 0; i < d; ++i) names.push_back("z" + std::to_string(i));
  std::vector<fairfront::SensitiveAttribute> attrs{{"s", {"0", "1"}}};
  std::vector<std::vector<int>> codes{s};
  if (k3) {
    std::vector<std::string> cats;
    for (std::size_t k = 0; k < k3; ++k) cats.push_back("g" + std::to_string(k));
    attrs.push_back({"g", cats});
    codes.push_back(g);
  }
  return Dataset(std::move(X), names, std::vector<bool>(d, true), attrs, codes, y);
}

// Small dataset from explicit columns; single feature, binary attribute "s".
inline Dataset tiny_dataset(const std::vector<double>& z, const std::vector<int>& s, const std::vector<int>& y) {
  RowMatrix X(static_cast<Eigen::Index>(z.size()), 1);
  for (std::size_t j = 0; j < z.size(); ++j) X(static_cast<Eigen::Index>(j), 0) = z[j];
  return Dataset(std::move(X), {"z0"}, {true}, {{"s", {"0", "1"}}}, {s}, y);
}

inline Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

// Central differences of f at x.
inline Vector numeric_gradient(const std::function<double(const Vector&)>& f, const Vector& x, double h = 1e-6) {
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vector a = x, b = x;
    a[i] += h;
    b[i] -= h;
    g[i] = (f(a) - f(b)) / (2 * h);
  }
  return g;
}

// Indices of the vectors not weakly-strictly dominated by any other; first
// copy of exact duplicates kept.
inline std::vector<std::size_t> brute_nondominated(const std::vector<Vector>& v) {
  auto dom = [](const Vector& a, const Vector& b) {
    bool strict = false;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      if (a[i] > b[i]) return false;
      if (a[i] < b[i]) strict = true;
    }
    return strict;
  };
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < v.size(); ++i) {
    bool out = false;
    for (std::size_t j = 0; j < v.size() && !out; ++j) {
      if (j != i && dom(v[j], v[i])) out = true;
      if (j < i && v[j] == v[i]) out = true;
    }
    if (!out) keep.push_back(i);
  }
  return keep;
}

struct TempDir {
  std::filesystem::path path;

  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path = std::filesystem::temp_directory_path() / ("fairfront_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

}  // namespace testing
