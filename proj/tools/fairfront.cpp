#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "app/commands.hpp"

namespace {

using Handler = nlohmann::json (*)(const fairfront::app::CommandOptions&);

struct Entry {
  const char* name;
  const char* help;
  Handler run;
  bool positional;
};

const Entry kCommands[] = {
    {"front", "compute a Pareto front with the configured algorithm", fairfront::app::cmd_front, false},
    {"epsfair", "constrained-classifier sweep (logistic vs disparate impact)", fairfront::app::cmd_epsfair, false},
    {"compare", "run or load fronts per problem and compare them", fairfront::app::cmd_compare, false},
    {"stream", "track the front while data arrives in batches", fairfront::app::cmd_stream, false},
    {"synth", "write the synthetic dataset as canonical CSV", fairfront::app::cmd_synth, false},
    {"preprocess-adult", "encode the raw Adult files", fairfront::app::cmd_preprocess_adult, true},
    {"preprocess-compas", "encode the COMPAS export", fairfront::app::cmd_preprocess_compas, true},
    {"metrics", "purity, spread and hypervolume of front files", fairfront::app::cmd_metrics, true},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pareto fronts of accuracy vs fairness for logistic classifiers"};
  app.set_version_flag("--version", fairfront::app::kVersion);
  app.require_subcommand(1);

  std::string config;
  std::uint64_t seed = 0;
  std::string out = ".";
  std::size_t workers = 0;
  bool quiet = false;
  std::vector<std::string> inputs;
  std::map<std::string, Handler> handlers;

  for (const auto& e : kCommands) {
    auto* sub = app.add_subcommand(e.name, e.help);
    sub->add_option("--config", config, "JSON run config")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "base seed");
    sub->add_option("--out", out, "output directory");
    sub->add_option("--workers", workers, "threads (default: all cores; output does not depend on it)");
    sub->add_flag("-q,--quiet", quiet, "no progress lines");
    if (e.positional) sub->add_option("inputs", inputs, "input files");
    handlers[e.name] = e.run;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  fairfront::app::CommandOptions opts;
  CLI::App* sub = app.get_subcommands().front();
  if (!config.empty()) opts.config = config;
  if (sub->count("--seed")) opts.seed = seed;
  if (sub->count("--workers")) opts.workers = workers;
  opts.out = out;
  opts.inputs = inputs;
  if (!quiet) opts.log = &std::cerr;

  try {
    handlers.at(sub->get_name())(opts);
  } catch (const fairfront::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
