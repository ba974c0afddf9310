#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "app/commands.hpp"
#include "app/frontfile.hpp"
#include "fairfront/metrics.hpp"
#include "fairfront/pfsmg.hpp"
#include "fairfront/smg.hpp"

namespace py = pybind11;
using namespace fairfront;

namespace {

std::vector<ObjectiveDescriptor> descriptors(const std::vector<std::pair<std::string, std::string>>& specs) {
  std::vector<ObjectiveDescriptor> out;
  for (const auto& [kind, attr] : specs) {
    ObjectiveDescriptor d;
    d.kind = parse_objective_kind(kind);
    d.attribute = attr;
    out.push_back(d);
  }
  return out;
}

std::string run_command(const std::string& name, std::optional<std::string> config, std::optional<std::uint64_t> seed,
                        const std::string& out, std::optional<std::size_t> workers, std::vector<std::string> inputs) {
  app::CommandOptions opts;
  if (config) opts.config = *config;
  opts.seed = seed;
  opts.out = out;
  opts.workers = workers;
  opts.inputs = std::move(inputs);
  static const std::map<std::string, nlohmann::json (*)(const app::CommandOptions&)> table = {
      {"front", app::cmd_front},
      {"epsfair", app::cmd_epsfair},
      {"compare", app::cmd_compare},
      {"stream", app::cmd_stream},
      {"synth", app::cmd_synth},
      {"preprocess-adult", app::cmd_preprocess_adult},
      {"preprocess-compas", app::cmd_preprocess_compas},
      {"metrics", app::cmd_metrics},
  };
  const auto it = table.find(name);
  if (it == table.end()) throw ConfigError("unknown command '" + name + "'");
  nlohmann::json man;
  {
    py::gil_scoped_release release;
    man = it->second(opts);
  }
  return man.dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Pareto fronts of accuracy vs fairness for logistic classifiers";
  m.attr("__version__") = app::kVersion;

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<DataError>(m, "DataError", base.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());

  py::class_<Dataset, std::shared_ptr<Dataset>>(m, "Dataset")
      .def_property_readonly("size", &Dataset::size)
      .def_property_readonly("feature_dim", &Dataset::feature_dim)
      .def_property_readonly("features", [](const Dataset& d) { return Eigen::MatrixXd(d.features()); })
      .def_property_readonly("labels", [](const Dataset& d) { return Vector(d.labels()); })
      .def_property_readonly("feature_names", &Dataset::feature_names)
      .def_property_readonly("attributes",
                             [](const Dataset& d) {
                               std::vector<std::pair<std::string, std::vector<std::string>>> out;
                               for (const auto& a : d.attributes()) out.emplace_back(a.name, a.categories);
                               return out;
                             })
      .def("codes", &Dataset::codes, py::arg("attribute"))
      .def("__len__", &Dataset::size);

  m.def(
      "generate_synthetic",
      [](std::size_t n, std::uint64_t seed) { return std::make_shared<Dataset>(generate_synthetic(n, seed)); },
      py::arg("n"), py::arg("seed"));

  m.def(
      "evaluate",
      [](std::shared_ptr<Dataset> data, const std::vector<std::pair<std::string, std::string>>& objectives,
         const Vector& params) {
        const ObjectiveSet set(descriptors(objectives), data);
        return set.evaluate(LinearModel::from_params(params));
      },
      py::arg("data"), py::arg("objectives"), py::arg("params"),
      "Full-data objective values; objectives are (kind, attribute) pairs.");

  m.def(
      "pfsmg",
      [](std::shared_ptr<Dataset> data, const std::vector<std::pair<std::string, std::string>>& objectives,
         std::uint64_t seed, std::size_t iterate_budget, std::size_t point_budget) {
        const ObjectiveSet set(descriptors(objectives), data);
        PfsmgConfig cfg;
        cfg.seed = seed;
        cfg.iterate_budget = iterate_budget;
        cfg.point_budget = point_budget;
        PfsmgResult res;
        {
          py::gil_scoped_release release;
          res = pfsmg_run(set, cfg);
        }
        std::vector<Vector> params;
        for (const auto& p : res.front.points) params.push_back(p.x.params());
        return py::make_tuple(params, res.front.objective_values());
      },
      py::arg("data"), py::arg("objectives"), py::arg("seed") = 1, py::arg("iterate_budget") = 100,
      py::arg("point_budget") = 1500, "Returns (parameter vectors, objective vectors) of the front.");

  m.def(
      "solve_minnorm",
      [](const std::vector<Vector>& gradients) {
        const auto r = solve_minnorm(gradients);
        return py::make_tuple(r.weights, r.direction);
      },
      py::arg("gradients"));

  m.def("dominates", &dominates, py::arg("u"), py::arg("v"));
  m.def(
      "nondominated_indices", [](const std::vector<Vector>& v) { return nondominated_indices(v); }, py::arg("values"));
  m.def("purity", &purity, py::arg("fronts"), py::arg("tolerance") = 0.0);
  m.def("spread_gamma", &spread_gamma, py::arg("front"));
  m.def("spread_delta", &spread_delta, py::arg("front"));
  m.def("hypervolume", &hypervolume, py::arg("front"), py::arg("reference"));
  m.def("hypervolume_reference", &hypervolume_reference, py::arg("fronts"), py::arg("margin") = 0.1);
  m.def("downsample_indices", &downsample_indices, py::arg("front"), py::arg("size"));
  m.def(
      "performance_profile",
      [](const std::vector<std::vector<double>>& table, bool higher_is_better) {
        const auto p = performance_profile(table, higher_is_better);
        return py::make_tuple(p.taus, p.fraction);
      },
      py::arg("table"), py::arg("higher_is_better"));

  m.def(
      "read_front",
      [](const std::string& path) {
        const auto t = app::read_front_csv(path);
        std::vector<Vector> params;
        for (const auto& x : t.models) params.push_back(x.params());
        return py::make_tuple(t.header, params, t.f);
      },
      py::arg("path"), "Returns (header, parameter vectors, objective vectors).");

  m.def("_run_command", &run_command, py::arg("name"), py::arg("config") = py::none(), py::arg("seed") = py::none(),
        py::arg("out") = ".", py::arg("workers") = py::none(), py::arg("inputs") = std::vector<std::string>{});
}
