#include "app/config.hpp"

#include <fstream>
#include <set>

namespace fairfront::app {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Reads keys from one JSON object and remembers which were consumed, so that
// leftovers can be reported as unknown.
class Section {
 public:
  Section(const json* j, std::string path) : j_(j), path_(std::move(path)) {
    if (j_ && !j_->is_object()) throw ConfigError(where() + " must be an object");
  }

  bool has(const std::string& key) const { return j_ && j_->contains(key); }

  template <class T>
  T get(const std::string& key, T fallback) {
    if (!has(key)) return fallback;
    used_.insert(key);
    try {
      return (*j_)[key].get<T>();
    } catch (const json::exception&) {
      throw ConfigError(where(key) + " has the wrong type");
    }
  }

  const json* raw(const std::string& key) {
    if (!has(key)) return nullptr;
    used_.insert(key);
    return &(*j_)[key];
  }

  Section sub(const std::string& key) { return Section(raw(key), where(key)); }

  void finish() const {
    if (!j_) return;
    for (const auto& [k, v] : j_->items()) {
      if (!used_.count(k)) throw ConfigError("unknown key " + where(k));
    }
  }

  std::string where(const std::string& key = {}) const {
    std::string p = path_.empty() ? std::string("config") : path_;
    return key.empty() ? "'" + p + "'" : "'" + (path_.empty() ? key : path_ + "." + key) + "'";
  }

 private:
  const json* j_;
  std::string path_;
  std::set<std::string> used_;
};

template <class T>
std::vector<T> scalar_or_list(const json* j, const std::string& what) {
  if (!j) return {};
  try {
    if (j->is_array()) return j->get<std::vector<T>>();
    return {j->get<T>()};
  } catch (const json::exception&) {
    throw ConfigError("'" + what + "' has the wrong type");
  }
}

void read_mat2(Section& s, const std::string& key, double (&m)[2][2]) {
  const json* j = s.raw(key);
  if (!j) return;
  try {
    auto v = j->get<std::vector<std::vector<double>>>();
    if (v.size() != 2 || v[0].size() != 2 || v[1].size() != 2) throw ConfigError(s.where(key) + " must be 2x2");
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) m[a][b] = v[a][b];
  } catch (const json::exception&) {
    throw ConfigError(s.where(key) + " must be a 2x2 array");
  }
}

void read_vec2(Section& s, const std::string& key, double (&v)[2]) {
  const json* j = s.raw(key);
  if (!j) return;
  try {
    auto x = j->get<std::vector<double>>();
    if (x.size() != 2) throw ConfigError(s.where(key) + " must have 2 entries");
    v[0] = x[0];
    v[1] = x[1];
  } catch (const json::exception&) {
    throw ConfigError(s.where(key) + " must be an array of 2 numbers");
  }
}

CsvSchema parse_schema(Section s) {
  CsvSchema schema;
  schema.label = s.get<std::string>("label", "");
  if (schema.label.empty()) throw ConfigError(s.where("label") + " is required");
  schema.positive_label = s.get<std::string>("positive_label", "");
  if (const json* sens = s.raw("sensitive")) {
    if (!sens->is_array()) throw ConfigError(s.where("sensitive") + " must be an array");
    for (std::size_t i = 0; i < sens->size(); ++i) {
      const json& e = (*sens)[i];
      if (e.is_string()) {
        schema.sensitive.push_back({e.get<std::string>(), {}});
        continue;
      }
      Section es(&e, "dataset.schema.sensitive[" + std::to_string(i) + "]");
      SensitiveColumn col;
      col.column = es.get<std::string>("column", "");
      col.categories = es.get<std::vector<std::string>>("categories", {});
      es.finish();
      if (col.column.empty()) throw ConfigError(es.where("column") + " is required");
      schema.sensitive.push_back(std::move(col));
    }
  }
  schema.categorical = s.get<std::vector<std::string>>("categorical", {});
  schema.continuous = s.get<std::vector<std::string>>("continuous", {});
  schema.passthrough = s.get<std::vector<std::string>>("passthrough", {});
  schema.missing_tokens = s.get<std::vector<std::string>>("missing_tokens", schema.missing_tokens);
  schema.normalize = s.get<bool>("normalize", schema.normalize);
  s.finish();
  return schema;
}

}  // namespace

json schema_to_json(const CsvSchema& schema) {
  json sens = json::array();
  for (const auto& c : schema.sensitive) sens.push_back({{"column", c.column}, {"categories", c.categories}});
  return {{"label", schema.label},           {"positive_label", schema.positive_label},
          {"sensitive", sens},               {"categorical", schema.categorical},
          {"continuous", schema.continuous}, {"passthrough", schema.passthrough},
          {"missing_tokens", schema.missing_tokens}, {"normalize", schema.normalize}};
}

CsvSchema schema_from_json(const json& j) { return parse_schema(Section(&j, "schema")); }

fs::path schema_sidecar(const fs::path& csv) {
  fs::path p = csv;
  p += ".schema.json";
  return p;
}

RunConfig parse_config(const json& j, const fs::path& base_dir) {
  RunConfig cfg;
  cfg.base_dir = base_dir;
  Section root(&j, "");
  cfg.seed = root.get<std::uint64_t>("seed", cfg.seed);
  cfg.algorithm = root.get<std::string>("algorithm", cfg.algorithm);
  if (cfg.algorithm != "pfsmg" && cfg.algorithm != "epsfair") {
    throw ConfigError("'algorithm' must be \"pfsmg\" or \"epsfair\"");
  }
  cfg.diagnostics_split = root.get<std::string>("diagnostics_split", cfg.diagnostics_split);
  if (cfg.diagnostics_split != "train" && cfg.diagnostics_split != "valid" && cfg.diagnostics_split != "test") {
    throw ConfigError("'diagnostics_split' must be train, valid or test");
  }

  {
    Section ds = root.sub("dataset");
    auto& d = cfg.dataset;
    d.source = ds.get<std::string>("source", d.source);
    if (d.source != "synthetic" && d.source != "csv" && d.source != "adult" && d.source != "compas") {
      throw ConfigError("'dataset.source' must be synthetic, csv, adult or compas");
    }
    d.path = ds.get<std::string>("path", d.path);
    if (ds.has("schema")) d.schema = parse_schema(ds.sub("schema"));
    d.normalize = ds.get<bool>("normalize", d.normalize);
    {
      Section sp = ds.sub("split");
      d.split.train = sp.get<double>("train", d.split.train);
      d.split.valid = sp.get<double>("valid", d.split.valid);
      d.split.test = sp.get<double>("test", d.split.test);
      d.split_seed_set = sp.has("seed");
      d.split.seed = sp.get<std::uint64_t>("seed", d.split.seed);
      sp.finish();
      if (d.split.train < 0 || d.split.valid < 0 || d.split.test < 0 ||
          std::abs(d.split.train + d.split.valid + d.split.test - 1.0) > 1e-9) {
        throw ConfigError("'dataset.split' fractions must be nonnegative and sum to 1");
      }
      if (!(d.split.train > 0)) throw ConfigError("'dataset.split.train' must be positive");
    }
    {
      Section sy = ds.sub("synthetic");
      d.synthetic_n = sy.get<std::size_t>("n", d.synthetic_n);
      if (sy.has("seed")) d.synthetic_seed = sy.get<std::uint64_t>("seed", 0);
      read_vec2(sy, "mean_pos", d.synthetic.mean_pos);
      read_vec2(sy, "mean_neg", d.synthetic.mean_neg);
      read_mat2(sy, "cov_pos", d.synthetic.cov_pos);
      read_mat2(sy, "cov_neg", d.synthetic.cov_neg);
      d.synthetic.rotation = sy.get<double>("rotation", d.synthetic.rotation);
      sy.finish();
      if (d.synthetic_n < 1) throw ConfigError("'dataset.synthetic.n' must be >= 1");
    }
    ds.finish();
    if ((d.source == "csv" || d.source == "adult" || d.source == "compas") && d.path.empty()) {
      throw ConfigError("'dataset.path' is required for source " + d.source);
    }
  }

  if (const json* objs = root.raw("objectives")) {
    if (!objs->is_array()) throw ConfigError("'objectives' must be an array");
    for (std::size_t i = 0; i < objs->size(); ++i) {
      Section os(&(*objs)[i], "objectives[" + std::to_string(i) + "]");
      ObjectiveDescriptor desc;
      desc.kind = parse_objective_kind(os.get<std::string>("kind", ""));
      desc.attribute = os.get<std::string>("attribute", "");
      desc.beta = os.get<double>("beta", desc.beta);
      desc.lambda_reg = os.get<double>("lambda_reg", desc.lambda_reg);
      os.finish();
      if (desc.kind != ObjectiveKind::Logistic && desc.attribute.empty()) {
        throw ConfigError(os.where("attribute") + " is required for fairness objectives");
      }
      if (!(desc.beta > 0)) throw ConfigError(os.where("beta") + " must be positive");
      if (desc.lambda_reg < 0) throw ConfigError(os.where("lambda_reg") + " must be >= 0");
      cfg.objectives.push_back(desc);
    }
  } else {
    cfg.objectives = {{ObjectiveKind::Logistic, "", 8.0, 0.0}, {ObjectiveKind::DisparateImpactBinary, "s", 8.0, 0.0}};
  }
  if (cfg.objectives.size() < 2 || cfg.objectives.size() > 3) throw ConfigError("'objectives' must list 2 or 3 entries");

  {
    Section ps = root.sub("pfsmg");
    auto& p = cfg.pfsmg;
    p.initial_points = ps.get<std::size_t>("initial_points", p.initial_points);
    p.perturbations_per_point = ps.get<std::size_t>("perturbations_per_point", p.perturbations_per_point);
    p.runs_per_point = ps.get<std::size_t>("runs_per_point", p.runs_per_point);
    p.iters_per_run = ps.get<std::size_t>("iters_per_run", p.iters_per_run);
    p.point_budget = ps.get<std::size_t>("point_budget", p.point_budget);
    p.iterate_budget = ps.get<std::size_t>("iterate_budget", p.iterate_budget);
    p.perturbation_radius = ps.get<double>("perturbation_radius", p.perturbation_radius);
    p.cell_fraction = ps.get<double>("cell_fraction", p.cell_fraction);
    p.init_scale = ps.get<double>("init_scale", p.init_scale);
    p.max_outer_iterations = ps.get<std::size_t>("max_outer_iterations", p.max_outer_iterations);
    ps.finish();
  }
  {
    Section ss = root.sub("smg");
    {
      Section st = ss.sub("step");
      auto& s = cfg.pfsmg.smg.step;
      s.alpha0 = st.get<double>("alpha0", s.alpha0);
      s.decay_factor = st.get<double>("decay_factor", s.decay_factor);
      s.decay_period = st.get<std::size_t>("decay_period", s.decay_period);
      st.finish();
    }
    {
      Section bs = ss.sub("batch");
      auto b0 = scalar_or_list<std::size_t>(bs.raw("batch0_per_objective"), "smg.batch.batch0_per_objective");
      auto rho = scalar_or_list<double>(bs.raw("growth_ratio"), "smg.batch.growth_ratio");
      bs.finish();
      if (b0.empty()) b0 = {cfg.pfsmg.smg.batches.front().base};
      if (rho.empty()) rho = {cfg.pfsmg.smg.batches.front().growth};
      const std::size_t n = std::max(b0.size(), rho.size());
      if ((b0.size() != 1 && b0.size() != n) || (rho.size() != 1 && rho.size() != n)) {
        throw ConfigError("'smg.batch' lists must have equal length");
      }
      cfg.pfsmg.smg.batches.clear();
      for (std::size_t i = 0; i < n; ++i) {
        cfg.pfsmg.smg.batches.push_back({b0.size() == 1 ? b0[0] : b0[i], rho.size() == 1 ? rho[0] : rho[i]});
      }
    }
    ss.finish();
  }
  cfg.pfsmg.validate(cfg.objectives.size());

  {
    Section es = root.sub("epsfair");
    auto& e = cfg.epsfair;
    e.n_thresholds = es.get<std::size_t>("n_thresholds", e.n_thresholds);
    e.stationarity_tolerance = es.get<double>("stationarity_tolerance", e.stationarity_tolerance);
    e.feasibility_tolerance = es.get<double>("feasibility_tolerance", e.feasibility_tolerance);
    e.max_outer_iterations = es.get<std::size_t>("max_outer_iterations", e.max_outer_iterations);
    e.max_newton_iterations = es.get<std::size_t>("max_newton_iterations", e.max_newton_iterations);
    e.penalty_initial = es.get<double>("penalty_initial", e.penalty_initial);
    e.penalty_growth = es.get<double>("penalty_growth", e.penalty_growth);
    e.penalty_max = es.get<double>("penalty_max", e.penalty_max);
    e.chains = es.get<std::size_t>("chains", e.chains);
    es.finish();
    for (const auto& d : cfg.objectives) {
      if (d.kind == ObjectiveKind::Logistic) e.lambda_reg = d.lambda_reg;
    }
    e.validate();
  }
  {
    Section ss = root.sub("stream");
    auto& s = cfg.stream;
    s.batch_size = ss.get<std::size_t>("batch_size", s.batch_size);
    s.batches = ss.get<std::size_t>("batches", s.batches);
    s.shard_dir = ss.get<std::string>("shard_dir", s.shard_dir);
    s.start_count = ss.get<std::size_t>("start_count", s.start_count);
    ss.finish();
    if (s.batch_size < 1 || s.batches < 1 || s.start_count < 1) {
      throw ConfigError("'stream' batch_size, batches and start_count must be >= 1");
    }
  }
  {
    Section cs = root.sub("compare");
    auto& c = cfg.compare;
    c.seeds = cs.get<std::vector<std::uint64_t>>("seeds", c.seeds);
    c.algorithms = cs.get<std::vector<std::string>>("algorithms", c.algorithms);
    c.purity_tolerance = cs.get<double>("purity_tolerance", c.purity_tolerance);
    if (const json* fr = cs.raw("fronts")) {
      if (!fr->is_array()) throw ConfigError("'compare.fronts' must be an array");
      for (std::size_t i = 0; i < fr->size(); ++i) {
        Section fs_(&(*fr)[i], "compare.fronts[" + std::to_string(i) + "]");
        CompareInput in;
        in.problem = fs_.get<std::string>("problem", "");
        in.algorithm = fs_.get<std::string>("algorithm", "");
        in.front = fs_.get<std::string>("front", "");
        in.manifest = fs_.get<std::string>("manifest", "");
        fs_.finish();
        if (in.problem.empty() || in.algorithm.empty() || in.front.empty()) {
          throw ConfigError(fs_.where() + " needs problem, algorithm and front");
        }
        c.fronts.push_back(std::move(in));
      }
    }
    cs.finish();
    for (const auto& a : c.algorithms) {
      if (a != "pfsmg" && a != "epsfair") throw ConfigError("'compare.algorithms' entries must be pfsmg or epsfair");
    }
  }
  {
    Section os = root.sub("output");
    cfg.output_prefix = os.get<std::string>("prefix", cfg.output_prefix);
    os.finish();
  }
  root.finish();
  return cfg;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return parse_config(j, path.parent_path());
}

json to_json(const RunConfig& cfg) {
  const auto& d = cfg.dataset;
  json ds = {{"source", d.source},
             {"path", d.path},
             {"normalize", d.normalize},
             {"split", {{"train", d.split.train}, {"valid", d.split.valid}, {"test", d.split.test}, {"seed", d.split_seed_set ? d.split.seed : cfg.seed}}},
             {"synthetic",
              {{"n", d.synthetic_n},
               {"seed", d.synthetic_seed.value_or(cfg.seed)},
               {"mean_pos", {d.synthetic.mean_pos[0], d.synthetic.mean_pos[1]}},
               {"mean_neg", {d.synthetic.mean_neg[0], d.synthetic.mean_neg[1]}},
               {"cov_pos", {{d.synthetic.cov_pos[0][0], d.synthetic.cov_pos[0][1]}, {d.synthetic.cov_pos[1][0], d.synthetic.cov_pos[1][1]}}},
               {"cov_neg", {{d.synthetic.cov_neg[0][0], d.synthetic.cov_neg[0][1]}, {d.synthetic.cov_neg[1][0], d.synthetic.cov_neg[1][1]}}},
               {"rotation", d.synthetic.rotation}}}};
  if (d.schema) ds["schema"] = schema_to_json(*d.schema);

  json objs = json::array();
  for (const auto& o : cfg.objectives) {
    objs.push_back({{"kind", to_string(o.kind)}, {"attribute", o.attribute}, {"beta", o.beta}, {"lambda_reg", o.lambda_reg}});
  }
  const auto& p = cfg.pfsmg;
  std::vector<std::size_t> b0;
  std::vector<double> rho;
  for (const auto& b : p.smg.batches) {
    b0.push_back(b.base);
    rho.push_back(b.growth);
  }
  const auto& e = cfg.epsfair;
  json fronts = json::array();
  for (const auto& f : cfg.compare.fronts) {
    fronts.push_back({{"problem", f.problem}, {"algorithm", f.algorithm}, {"front", f.front}, {"manifest", f.manifest}});
  }
  return {
      {"seed", cfg.seed},
      {"algorithm", cfg.algorithm},
      {"diagnostics_split", cfg.diagnostics_split},
      {"dataset", ds},
      {"objectives", objs},
      {"pfsmg",
       {{"initial_points", p.initial_points},
        {"perturbations_per_point", p.perturbations_per_point},
        {"runs_per_point", p.runs_per_point},
        {"iters_per_run", p.iters_per_run},
        {"point_budget", p.point_budget},
        {"iterate_budget", p.iterate_budget},
        {"perturbation_radius", p.perturbation_radius},
        {"cell_fraction", p.cell_fraction},
        {"init_scale", p.init_scale},
        {"max_outer_iterations", p.max_outer_iterations}}},
      {"smg",
       {{"step", {{"alpha0", p.smg.step.alpha0}, {"decay_factor", p.smg.step.decay_factor}, {"decay_period", p.smg.step.decay_period}}},
        {"batch", {{"batch0_per_objective", b0}, {"growth_ratio", rho}}}}},
      {"epsfair",
       {{"n_thresholds", e.n_thresholds},
        {"stationarity_tolerance", e.stationarity_tolerance},
        {"feasibility_tolerance", e.feasibility_tolerance},
        {"max_outer_iterations", e.max_outer_iterations},
        {"max_newton_iterations", e.max_newton_iterations},
        {"penalty_initial", e.penalty_initial},
        {"penalty_growth", e.penalty_growth},
        {"penalty_max", e.penalty_max},
        {"chains", e.chains}}},
      {"stream",
       {{"batch_size", cfg.stream.batch_size},
        {"batches", cfg.stream.batches},
        {"shard_dir", cfg.stream.shard_dir},
        {"start_count", cfg.stream.start_count}}},
      {"compare",
       {{"seeds", cfg.compare.seeds},
        {"algorithms", cfg.compare.algorithms},
        {"fronts", fronts},
        {"purity_tolerance", cfg.compare.purity_tolerance}}},
      {"output", {{"prefix", cfg.output_prefix}}},
  };
}

}  // namespace fairfront::app
