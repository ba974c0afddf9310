#include "app/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>

#include "app/frontfile.hpp"
#include "fairfront/epsfair.hpp"
#include "fairfront/metrics.hpp"
#include "fairfront/pfsmg.hpp"
#include "fairfront/streaming.hpp"

namespace fairfront::app {

const char* const kVersion = FAIRFRONT_VERSION_STRING;

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path resolve(const RunConfig& cfg, const std::string& p) {
  fs::path path(p);
  if (path.is_absolute() || cfg.base_dir.empty()) return path;
  return cfg.base_dir / path;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
  out << j.dump(2) << '\n';
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::parse_error& e) {
    throw DataError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create output directory '" + dir.string() + "': " + ec.message());
}

std::uint64_t synthetic_seed(const RunConfig& cfg) { return cfg.dataset.synthetic_seed.value_or(cfg.seed); }

// Raw (unnormalized) dataset for the configured source.
Dataset load_raw(const RunConfig& cfg, std::vector<std::string>* warnings) {
  const auto& d = cfg.dataset;
  if (d.source == "synthetic") return generate_synthetic(d.synthetic_n, synthetic_seed(cfg), d.synthetic);
  if (d.source == "adult") return preprocess_adult(resolve(cfg, d.path));
  if (d.source == "compas") return load_compas(resolve(cfg, d.path));
  const fs::path path = resolve(cfg, d.path);
  CsvSchema schema;
  if (d.schema) {
    schema = *d.schema;
  } else {
    const auto side = schema_sidecar(path);
    if (!fs::exists(side)) {
      throw ConfigError("dataset.schema is missing and no sidecar '" + side.string() + "' exists");
    }
    schema = schema_from_json(read_json(side));
  }
  schema.normalize = false;
  return load_csv(path, schema, warnings);
}

struct Timer {
  std::clock_t cpu0 = std::clock();
  std::chrono::steady_clock::time_point wall0 = std::chrono::steady_clock::now();

  double cpu() const { return static_cast<double>(std::clock() - cpu0) / CLOCKS_PER_SEC; }
  double wall() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count(); }
};

struct Outcome {
  ParetoFront front;
  double cpu_seconds = 0;
  double wall_seconds = 0;
  std::size_t gradient_evaluations = 0;
  json details = json::object();
  std::optional<std::string> error;
};

std::size_t eps_attribute(const RunConfig& cfg, const Dataset& data) {
  if (cfg.objectives.size() != 2 || cfg.objectives[0].kind != ObjectiveKind::Logistic) {
    throw ConfigError("epsfair needs exactly two objectives: logistic, then a disparate-impact objective");
  }
  const auto& o = cfg.objectives[1];
  if (o.kind != ObjectiveKind::DisparateImpactBinary && o.kind != ObjectiveKind::DisparateImpactMulti) {
    throw ConfigError("epsfair supports disparate-impact objectives only");
  }
  return data.attribute_index(o.attribute);
}

Outcome run_algorithm(const RunConfig& cfg, const std::string& algorithm, const std::shared_ptr<const Dataset>& train,
                      std::ostream* log) {
  const ObjectiveSet objectives(cfg.objectives, train);
  Outcome out;
  Timer timer;
  if (algorithm == "pfsmg") {
    PfsmgConfig pc = cfg.pfsmg;
    pc.seed = cfg.seed;
    PfsmgOptions opts;
    if (log) {
      opts.on_progress = [log](const PfsmgProgress& p) {
        *log << "iteration " << p.iteration << " points " << p.list_size << " hypervolume " << p.hypervolume << '\n';
      };
    }
    auto res = pfsmg_run(objectives, pc, opts);
    out.front = std::move(res.front);
    out.gradient_evaluations = res.gradient_evaluations;
    out.error = res.error;
    json prog = json::array();
    for (const auto& p : res.progress) prog.push_back({p.iteration, p.list_size, p.max_iterate_count, p.hypervolume});
    out.details["progress_columns"] = {"iteration", "points", "max_iterate_count", "hypervolume"};
    out.details["progress"] = prog;
    out.details["outer_iterations"] = res.outer_iterations;
    if (res.reference) out.details["progress_reference"] = std::vector<double>(res.reference->begin(), res.reference->end());
  } else {
    const auto attr = eps_attribute(cfg, *train);
    auto res = sweep_front(*train, attr, objectives, cfg.epsfair);
    out.front = std::move(res.front);
    out.gradient_evaluations = res.gradient_evaluations;
    json failed = json::array();
    for (const auto& r : res.records) {
      if (!r.ok) failed.push_back({{"epsilon", r.epsilon}, {"message", r.message}});
    }
    out.details["upper_bound"] = res.upper_bound;
    out.details["thresholds"] = res.records.size();
    out.details["failed_thresholds"] = failed;
    if (log) *log << "epsfair: " << res.records.size() - failed.size() << " of " << res.records.size()
                  << " thresholds solved, " << out.front.size() << " nondominated\n";
  }
  out.cpu_seconds = timer.cpu();
  out.wall_seconds = timer.wall();
  return out;
}

const Dataset& diagnostics_data(const RunConfig& cfg, const PreparedData& pd) {
  const Dataset& d = cfg.diagnostics_split == "train" ? *pd.train : cfg.diagnostics_split == "valid" ? pd.valid : pd.test;
  if (d.empty()) throw ConfigError("diagnostics split '" + cfg.diagnostics_split + "' is empty");
  return d;
}

json dataset_info(const PreparedData& pd) {
  return {{"train_size", pd.train->size()},
          {"valid_size", pd.valid.size()},
          {"test_size", pd.test.size()},
          {"feature_names", pd.train->feature_names()},
          {"scaling", {{"mean", std::vector<double>(pd.scaling.mean.begin(), pd.scaling.mean.end())},
                       {"scale", std::vector<double>(pd.scaling.scale.begin(), pd.scaling.scale.end())}}},
          {"warnings", pd.warnings}};
}

json base_manifest(const std::string& command, const RunConfig& cfg, std::size_t workers) {
  return {{"tool", "fairfront"}, {"version", kVersion}, {"command", command},
          {"seed", cfg.seed},    {"workers", workers},  {"config", to_json(cfg)}};
}

// Runs one algorithm and writes <prefix>.csv and <prefix>.manifest.json.
json emit_front(const std::string& command, const RunConfig& cfg, const std::string& algorithm, const PreparedData& pd,
                const fs::path& dir, const std::string& prefix, std::ostream* log, Outcome* keep = nullptr) {
  const Dataset& diag = diagnostics_data(cfg, pd);
  Outcome out = run_algorithm(cfg, algorithm, pd.train, log);
  ensure_dir(dir);
  const fs::path csv_path = dir / (prefix + ".csv");
  json man = base_manifest(command, cfg, cfg.pfsmg.workers);
  man["algorithm"] = algorithm;
  man["dataset"] = dataset_info(pd);
  man["diagnostics_split"] = cfg.diagnostics_split;
  json names = json::array();
  const ObjectiveSet objs(cfg.objectives, pd.train);
  for (std::size_t i = 0; i < objs.size(); ++i) names.push_back(objs[i].name());
  man["objectives"] = names;
  man["points"] = out.front.size();
  man["gradient_evaluations"] = out.gradient_evaluations;
  man["timings"] = {{"cpu_seconds", out.cpu_seconds}, {"wall_seconds", out.wall_seconds}};
  man["front_file"] = csv_path.filename().string();
  man["details"] = out.details;
  if (!out.front.empty()) write_front_csv(csv_path, out.front, diag, cfg.objectives);
  if (out.error) man["error"] = *out.error;
  write_json(dir / (prefix + ".manifest.json"), man);
  if (out.error) throw NumericalError(*out.error + " (partial front written to " + csv_path.string() + ")");
  if (keep) *keep = std::move(out);
  return man;
}

double per_point(double total, std::size_t points) {
  return points > 0 ? total / static_cast<double>(points) : std::numeric_limits<double>::quiet_NaN();
}

void write_profile_csv(const fs::path& path, const PerformanceProfile& prof, const std::vector<std::string>& algs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
  out << "tau";
  for (const auto& a : algs) out << ',' << a;
  out << '\n';
  for (std::size_t t = 0; t < prof.taus.size(); ++t) {
    out << format_number(prof.taus[t]);
    for (std::size_t a = 0; a < algs.size(); ++a) out << ',' << format_number(prof.fraction[a][t]);
    out << '\n';
  }
}

struct ProblemFronts {
  std::string problem;
  std::vector<ObjectiveValues> fronts;  // per algorithm
  std::vector<double> cpu_seconds;
  std::vector<double> gradient_evaluations;
};

json compare_fronts(const std::vector<ProblemFronts>& problems, const std::vector<std::string>& algs,
                    double purity_tolerance, const fs::path& dir) {
  const std::vector<std::pair<std::string, bool>> metric_names = {
      {"purity", true},       {"gamma", false},          {"delta", false},
      {"hypervolume", true},  {"cpu_per_point", false},  {"gradients_per_point", false}};
  std::map<std::string, std::vector<std::vector<double>>> tables;

  json report = {{"tool", "fairfront"}, {"version", kVersion}, {"algorithms", algs}, {"reference_margin", 0.1}};
  json plist = json::array();
  for (const auto& pr : problems) {
    std::size_t M = std::numeric_limits<std::size_t>::max();
    for (const auto& f : pr.fronts) M = std::min(M, f.size());
    std::vector<ObjectiveValues> reduced;
    for (const auto& f : pr.fronts) {
      if (M >= 2 && f.size() > M) {
        ObjectiveValues r;
        for (auto i : downsample_indices(f, M)) r.push_back(f[i]);
        reduced.push_back(std::move(r));
      } else {
        reduced.push_back(f);
      }
    }
    const Vector ref = hypervolume_reference(reduced, 0.1);
    const auto pur = purity(reduced, purity_tolerance);
    json entries = json::array();
    std::map<std::string, std::vector<double>> row;
    for (std::size_t a = 0; a < algs.size(); ++a) {
      const auto& f = reduced[a];
      const double gamma = spread_gamma(f);
      const double delta = f.size() >= 2 ? spread_delta(f) : 0.0;
      const double hv = ref.size() <= 3 ? hypervolume(f, ref) : std::numeric_limits<double>::quiet_NaN();
      const double cpp = per_point(pr.cpu_seconds[a], pr.fronts[a].size());
      const double gpp = per_point(pr.gradient_evaluations[a], pr.fronts[a].size());
      entries.push_back({{"algorithm", algs[a]},
                         {"points", pr.fronts[a].size()},
                         {"points_compared", f.size()},
                         {"purity", pur[a]},
                         {"gamma", gamma},
                         {"delta", delta},
                         {"hypervolume", hv},
                         {"cpu_seconds", pr.cpu_seconds[a]},
                         {"cpu_per_point", cpp},
                         {"gradient_evaluations", pr.gradient_evaluations[a]},
                         {"gradients_per_point", gpp}});
      row["purity"].push_back(pur[a]);
      row["gamma"].push_back(gamma);
      row["delta"].push_back(delta);
      row["hypervolume"].push_back(hv);
      row["cpu_per_point"].push_back(cpp);
      row["gradients_per_point"].push_back(gpp);
    }
    for (auto& [k, v] : row) tables[k].push_back(v);
    plist.push_back({{"problem", pr.problem},
                     {"compared_size", M},
                     {"reference", std::vector<double>(ref.begin(), ref.end())},
                     {"results", entries}});
  }
  report["problems"] = plist;

  // Zero metric values (a perfect spread, zero purity) are floored so that
  // ratios stay defined; missing values drop the profile.
  json profiles = json::object();
  for (const auto& [name, higher] : metric_names) {
    auto table = tables[name];
    bool usable = true;
    for (auto& r : table) {
      for (auto& v : r) {
        if (!std::isfinite(v)) usable = false;
        v = std::max(v, 1e-12);
      }
    }
    if (!usable || algs.empty()) continue;
    const auto prof = performance_profile(table, higher);
    const std::string file = "profile_" + name + ".csv";
    write_profile_csv(dir / file, prof, algs);
    profiles[name] = file;
  }
  report["profiles"] = profiles;
  return report;
}

}  // namespace

RunConfig resolve_config(const CommandOptions& opts) {
  RunConfig cfg = opts.config ? load_config(*opts.config) : parse_config(json::object());
  if (opts.seed) cfg.seed = *opts.seed;
  if (!cfg.dataset.split_seed_set) cfg.dataset.split.seed = cfg.seed;
  const std::size_t workers = opts.workers.value_or(0);
  cfg.pfsmg.workers = workers;
  cfg.epsfair.workers = workers;
  return cfg;
}

PreparedData prepare_data(const RunConfig& cfg) {
  PreparedData pd;
  const Dataset raw = load_raw(cfg, &pd.warnings);
  auto parts = split(raw, cfg.dataset.split);
  pd.scaling = cfg.dataset.normalize ? fit_scaling(parts.train, &pd.warnings)
                                     : FeatureScaling::identity(parts.train.feature_dim());
  pd.train = std::make_shared<const Dataset>(apply_scaling(parts.train, pd.scaling));
  pd.valid = parts.valid.empty() ? parts.valid : apply_scaling(parts.valid, pd.scaling);
  pd.test = parts.test.empty() ? parts.test : apply_scaling(parts.test, pd.scaling);
  return pd;
}

json cmd_front(const CommandOptions& opts) {
  const RunConfig cfg = resolve_config(opts);
  const PreparedData pd = prepare_data(cfg);
  return emit_front("front", cfg, cfg.algorithm, pd, opts.out, cfg.output_prefix, opts.log);
}

json cmd_epsfair(const CommandOptions& opts) {
  const RunConfig cfg = resolve_config(opts);
  const PreparedData pd = prepare_data(cfg);
  // Suffixed so it does not overwrite a `front` run with the same config.
  return emit_front("epsfair", cfg, "epsfair", pd, opts.out, cfg.output_prefix + "_epsfair", opts.log);
}

json cmd_compare(const CommandOptions& opts) {
  const RunConfig base = resolve_config(opts);
  ensure_dir(opts.out);
  std::vector<ProblemFronts> problems;
  std::vector<std::string> algs;

  if (!base.compare.fronts.empty()) {
    std::map<std::string, std::map<std::string, CompareInput>> by_problem;
    for (const auto& in : base.compare.fronts) {
      if (!by_problem[in.problem].emplace(in.algorithm, in).second) {
        throw ConfigError("compare: duplicate front for problem '" + in.problem + "', algorithm '" + in.algorithm + "'");
      }
    }
    for (const auto& [name, m] : by_problem.begin()->second) algs.push_back(name);
    for (const auto& [problem, m] : by_problem) {
      std::vector<std::string> here;
      for (const auto& [name, in] : m) here.push_back(name);
      if (here != algs) throw ConfigError("compare: problem '" + problem + "' has a different set of algorithms");
      ProblemFronts pf;
      pf.problem = problem;
      for (const auto& a : algs) {
        const auto& in = m.at(a);
        const auto table = read_front_csv(resolve(base, in.front));
        if (table.f.empty()) throw DataError("compare: front '" + in.front + "' is empty");
        pf.fronts.push_back(table.f);
        double cpu = std::numeric_limits<double>::quiet_NaN();
        double grads = std::numeric_limits<double>::quiet_NaN();
        if (!in.manifest.empty()) {
          const json man = read_json(resolve(base, in.manifest));
          cpu = man.at("timings").at("cpu_seconds").get<double>();
          grads = man.at("gradient_evaluations").get<double>();
        }
        pf.cpu_seconds.push_back(cpu);
        pf.gradient_evaluations.push_back(grads);
      }
      const auto m0 = pf.fronts.front().front().size();
      for (const auto& f : pf.fronts) {
        if (f.front().size() != m0) throw ConfigError("compare: fronts of problem '" + problem + "' differ in m");
      }
      problems.push_back(std::move(pf));
    }
  } else {
    algs = base.compare.algorithms;
    if (algs.empty()) throw ConfigError("compare: no algorithms");
    auto seeds = base.compare.seeds;
    if (seeds.empty()) seeds = {base.seed};
    for (auto s : seeds) {
      RunConfig cfg = base;
      cfg.seed = s;
      if (!base.dataset.split_seed_set) cfg.dataset.split.seed = s;
      const PreparedData pd = prepare_data(cfg);
      ProblemFronts pf;
      pf.problem = "seed_" + std::to_string(s);
      for (const auto& a : algs) {
        if (opts.log) *opts.log << pf.problem << ": running " << a << '\n';
        Outcome out;
        emit_front("compare", cfg, a, pd, opts.out / pf.problem, a, nullptr, &out);
        pf.fronts.push_back(out.front.objective_values());
        pf.cpu_seconds.push_back(out.cpu_seconds);
        pf.gradient_evaluations.push_back(static_cast<double>(out.gradient_evaluations));
      }
      problems.push_back(std::move(pf));
    }
  }

  json report = compare_fronts(problems, algs, base.compare.purity_tolerance, opts.out);
  report["config"] = to_json(base);
  write_json(opts.out / "comparison.json", report);
  return report;
}

json cmd_stream(const CommandOptions& opts) {
  const RunConfig cfg = resolve_config(opts);
  const auto& st = cfg.stream;
  std::vector<Dataset> batches;
  if (cfg.dataset.source == "synthetic") {
    batches = synthetic_chunks(st.batches, st.batch_size, synthetic_seed(cfg), cfg.dataset.synthetic);
  } else if (!st.shard_dir.empty()) {
    CsvSchema schema;
    if (cfg.dataset.schema) {
      schema = *cfg.dataset.schema;
    } else {
      throw ConfigError("stream.shard_dir needs dataset.schema");
    }
    batches = load_shards(resolve(cfg, st.shard_dir), schema);
  } else {
    const Dataset raw = load_raw(cfg, nullptr);
    std::vector<std::size_t> idx(raw.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Rng rng(derive_seed(cfg.dataset.split.seed, {0x57a3}));
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t u = 0; u < st.batches; ++u) {
      const std::size_t lo = u * st.batch_size;
      if (lo >= idx.size()) break;
      const std::size_t hi = std::min(idx.size(), lo + st.batch_size);
      batches.push_back(raw.subset(std::span<const std::size_t>(idx.data() + lo, hi - lo)));
    }
  }
  if (batches.empty()) throw ConfigError("stream: no batches");

  StreamConfig sc;
  sc.objectives = cfg.objectives;
  sc.pfsmg = cfg.pfsmg;
  sc.pfsmg.seed = cfg.seed;
  sc.start_count = st.start_count;
  sc.normalize = cfg.dataset.normalize;

  ensure_dir(opts.out);
  Timer timer;
  json files = json::array();
  auto res = stream_run(batches, sc, [&](std::size_t u, const StreamState& s) {
    const std::string name = cfg.output_prefix + "_" + std::to_string(u) + ".csv";
    write_front_csv(opts.out / name, s.front, s.normalized(), cfg.objectives);
    files.push_back(name);
    if (opts.log) {
      *opts.log << "update " << u << " samples " << s.raw.size() << " points " << s.front.size();
      if (!s.hypervolume_history.empty()) *opts.log << " hypervolume " << s.hypervolume_history.back();
      *opts.log << '\n';
    }
  });
  json man = base_manifest("stream", cfg, cfg.pfsmg.workers);
  man["snapshots"] = files;
  man["sizes"] = res.state.sizes;
  man["hypervolume_history"] = res.state.hypervolume_history;
  if (res.state.reference) {
    man["reference"] = std::vector<double>(res.state.reference->begin(), res.state.reference->end());
  }
  man["gradient_evaluations"] = res.state.gradient_evaluations;
  man["timings"] = {{"cpu_seconds", timer.cpu()}, {"wall_seconds", timer.wall()}};
  write_json(opts.out / (cfg.output_prefix + ".stream.json"), man);
  return man;
}

namespace {

json write_dataset(const std::string& command, const RunConfig& cfg, const Dataset& data, const fs::path& out,
                   const std::string& name) {
  ensure_dir(out);
  const fs::path path = out / (name + ".csv");
  write_csv(data, path);
  write_json(schema_sidecar(path), schema_to_json(canonical_schema(data)));
  json man = base_manifest(command, cfg, 1);
  man["rows"] = data.size();
  man["file"] = path.filename().string();
  json groups = json::object();
  for (std::size_t a = 0; a < data.attributes().size(); ++a) {
    const auto& attr = data.attributes()[a];
    std::vector<std::size_t> counts(attr.cardinality(), 0);
    for (int c : data.codes(a)) ++counts[static_cast<std::size_t>(c)];
    json g = json::object();
    for (std::size_t k = 0; k < counts.size(); ++k) g[attr.categories[k]] = counts[k];
    groups[attr.name] = g;
  }
  man["groups"] = groups;
  std::size_t pos = 0;
  for (Eigen::Index j = 0; j < data.labels().size(); ++j) pos += data.labels()[j] > 0 ? 1 : 0;
  man["positive_labels"] = pos;
  write_json(out / (name + ".manifest.json"), man);
  return man;
}

std::string input_path(const CommandOptions& opts, const RunConfig& cfg, const char* what) {
  if (!opts.inputs.empty()) return opts.inputs.front();
  if (!cfg.dataset.path.empty()) return resolve(cfg, cfg.dataset.path).string();
  throw ConfigError(std::string(what) + ": give the input path as an argument or in dataset.path");
}

}  // namespace

json cmd_synth(const CommandOptions& opts) {
  const RunConfig cfg = resolve_config(opts);
  const Dataset data = generate_synthetic(cfg.dataset.synthetic_n, synthetic_seed(cfg), cfg.dataset.synthetic);
  return write_dataset("synth", cfg, data, opts.out, "synthetic");
}

json cmd_preprocess_adult(const CommandOptions& opts) {
  const RunConfig cfg = resolve_config(opts);
  return write_dataset("preprocess-adult", cfg, preprocess_adult(input_path(opts, cfg, "preprocess-adult")), opts.out,
                       "adult");
}

json cmd_preprocess_compas(const CommandOptions& opts) {
  const RunConfig cfg = resolve_config(opts);
  return write_dataset("preprocess-compas", cfg, load_compas(input_path(opts, cfg, "preprocess-compas")), opts.out,
                       "compas");
}

json cmd_metrics(const CommandOptions& opts) {
  if (opts.inputs.empty()) throw ConfigError("metrics: give one or more front files");
  std::vector<ObjectiveValues> fronts;
  for (const auto& p : opts.inputs) {
    auto t = read_front_csv(p);
    if (t.f.empty()) throw DataError("metrics: front '" + p + "' is empty");
    if (!fronts.empty() && t.m != static_cast<std::size_t>(fronts.front().front().size())) {
      throw ConfigError("metrics: fronts differ in the number of objectives");
    }
    fronts.push_back(std::move(t.f));
  }
  const Vector ref = hypervolume_reference(fronts, 0.1);
  const auto pur = purity(fronts);
  json rows = json::array();
  for (std::size_t i = 0; i < fronts.size(); ++i) {
    const auto& f = fronts[i];
    json r = {{"file", opts.inputs[i]}, {"points", f.size()}, {"purity", pur[i]}, {"gamma", spread_gamma(f)}};
    r["delta"] = f.size() >= 2 ? json(spread_delta(f)) : json(nullptr);
    r["hypervolume"] = ref.size() <= 3 ? json(hypervolume(f, ref)) : json(nullptr);
    rows.push_back(r);
  }
  json report = {{"tool", "fairfront"},
                 {"version", kVersion},
                 {"reference", std::vector<double>(ref.begin(), ref.end())},
                 {"fronts", rows}};
  ensure_dir(opts.out);
  write_json(opts.out / "metrics.json", report);
  return report;
}

}  // namespace fairfront::app
