#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "app/config.hpp"

namespace fairfront::app {

extern const char* const kVersion;

struct CommandOptions {
  std::optional<std::filesystem::path> config;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out = ".";
  std::optional<std::size_t> workers;
  std::vector<std::string> inputs;  // positional arguments
  std::ostream* log = nullptr;      // progress lines; silent when null
};

// Config from --config (or defaults) with --seed / --workers applied.
RunConfig resolve_config(const CommandOptions& opts);

struct PreparedData {
  std::shared_ptr<const Dataset> train;
  Dataset valid;
  Dataset test;
  FeatureScaling scaling;
  std::vector<std::string> warnings;
};

// Loads the configured dataset, splits it and normalizes with statistics fit
// on the training part.
PreparedData prepare_data(const RunConfig& cfg);

// Each returns the manifest it wrote.
nlohmann::json cmd_front(const CommandOptions& opts);
nlohmann::json cmd_epsfair(const CommandOptions& opts);
nlohmann::json cmd_compare(const CommandOptions& opts);
nlohmann::json cmd_stream(const CommandOptions& opts);
nlohmann::json cmd_synth(const CommandOptions& opts);
nlohmann::json cmd_preprocess_adult(const CommandOptions& opts);
nlohmann::json cmd_preprocess_compas(const CommandOptions& opts);
nlohmann::json cmd_metrics(const CommandOptions& opts);

}  // namespace fairfront::app
