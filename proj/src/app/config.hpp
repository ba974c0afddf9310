#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fairfront/data.hpp"
#include "fairfront/epsfair.hpp"
#include "fairfront/objectives.hpp"
#include "fairfront/pfsmg.hpp"

namespace fairfront::app {

struct DatasetConfig {
  std::string source = "synthetic";  // synthetic | csv | adult | compas
  std::string path;                  // file or directory, depending on source
  std::optional<CsvSchema> schema;   // csv only; sidecar <path>.schema.json when absent
  bool normalize = true;
  SplitSpec split;
  bool split_seed_set = false;
  std::size_t synthetic_n = 2000;
  std::optional<std::uint64_t> synthetic_seed;
  SyntheticParams synthetic;
};

struct StreamSettings {
  std::size_t batch_size = 2000;
  std::size_t batches = 6;
  std::string shard_dir;
  std::size_t start_count = 5;
};

struct CompareInput {
  std::string problem;
  std::string algorithm;
  std::string front;
  std::string manifest;
};

struct CompareSettings {
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> algorithms{"pfsmg", "epsfair"};
  std::vector<CompareInput> fronts;
  double purity_tolerance = 0.0;
};

struct RunConfig {
  DatasetConfig dataset;
  std::vector<ObjectiveDescriptor> objectives;
  std::string algorithm = "pfsmg";
  PfsmgConfig pfsmg;
  EpsSweepConfig epsfair;
  StreamSettings stream;
  CompareSettings compare;
  std::uint64_t seed = 1;
  std::string output_prefix = "front";
  std::string diagnostics_split = "test";
  // Where the config came from; relative dataset paths resolve against it.
  std::filesystem::path base_dir;
};

// Parses a run config, rejecting unknown keys and invalid values with
// ConfigError. Missing keys take their defaults.
RunConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

// Every field, defaults included.
nlohmann::json to_json(const RunConfig& cfg);

nlohmann::json schema_to_json(const CsvSchema& schema);
CsvSchema schema_from_json(const nlohmann::json& j);

// Sidecar schema path for a canonical CSV.
std::filesystem::path schema_sidecar(const std::filesystem::path& csv);

}  // namespace fairfront::app
