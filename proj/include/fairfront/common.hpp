#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace fairfront {

using Vector = Eigen::VectorXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using IndexList = std::vector<std::size_t>;

// A batch is a list of sample indices (repetition allowed). An empty batch
// stands for the full dataset.
using Batch = std::span<const std::size_t>;

using Rng = std::mt19937_64;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration or schema; detected before any compute.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed or missing input data.
class DataError : public Error {
 public:
  using Error::Error;
};

// Solver breakdown: non-finite iterates, stagnation, non-convergence.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// SplitMix64 finalizer; used to derive independent RNG streams.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seed for the stream identified by (base, parts...). Distinct tuples give
// statistically independent streams.
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = mix64(base);
  for (std::uint64_t p : parts) h = mix64(h ^ mix64(p + 0x632be59bd9b4e019ULL));
  return h;
}

}  // namespace fairfront
