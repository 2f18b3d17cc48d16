// Python bindings for the core operations. Spaces, configurations and
// traces cross the boundary as JSON text; the Python package wraps them.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "boasf/bandit.hpp"
#include "boasf/commands.hpp"
#include "boasf/config.hpp"
#include "boasf/tasks.hpp"
#include "boasf/trace.hpp"

namespace py = pybind11;
using namespace boasf;

namespace {

BudgetMode budget_mode(const std::string& token) {
  if (token == "count") return BudgetMode::kCount;
  if (token == "time") return BudgetMode::kWallClock;
  throw py::value_error("budget mode must be \"count\" or \"time\"");
}

SearchSpace space_from_text(const std::string& text) {
  return parse_space(nlohmann::json::parse(text), "space");
}

py::dict result_dict(const BestResult& best) {
  py::dict out;
  out["arm"] = best.arm_id;
  out["config"] = configuration_to_json(best.config).dump();
  out["reward"] = best.reward;
  out["raw_value"] = best.raw_value;
  out["total_cost"] = best.total_cost;
  out["evaluations"] = best.records.size();
  return out;
}

py::dict run_from_text(const std::string& config_text, std::optional<std::uint64_t> seed,
                       std::optional<int> parallelism) {
  Overrides o;
  o.seed = seed;
  o.parallelism = parallelism;
  const auto cfg = parse_run_config_text(config_text, "config", o);
  std::ostringstream trace;
  BestResult best;
  {
    py::gil_scoped_release release;
    best = execute_run(cfg, &trace);
  }
  auto out = result_dict(best);
  out["trace"] = trace.str();
  return out;
}

// Runs the bandit over the k-interval partition of `space_text` with a Python
// objective. Evaluations happen on the calling thread, one at a time.
py::dict optimize(const py::function& objective, const std::string& space_text, double budget, int rounds,
                  double ucb_c, int partition_k, std::uint64_t seed, bool minimize, double lo, double hi) {
  const auto space = space_from_text(space_text);
  const ValueBounds bounds{lo, hi, minimize ? Orientation::kMinimize : Orientation::kMaximize};
  auto shared = std::make_shared<FunctionEvaluable>(
      space, bounds, [objective](const Configuration& c, std::mt19937_64&) {
        const auto arg = py::module_::import("json").attr("loads")(configuration_to_json(c).dump());
        return objective(arg).cast<double>();
      });
  std::vector<Arm> arms;
  const auto subs = partition(space, partition_k);
  for (std::size_t i = 0; i < subs.size(); ++i) {
    arms.emplace_back("subspace-" + std::to_string(i), shared, subs[i].space(), TpeParams{}, derive_seed(seed, i));
  }
  BanditConfig cfg;
  cfg.budget = {BudgetMode::kCount, budget};
  cfg.rounds = rounds;
  cfg.ucb_c = ucb_c;
  cfg.filter_seed = derive_seed(seed, 0xF117E5);
  cfg.parallelism = 1;
  return result_dict(run(cfg, arms));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bayesian optimization with adaptive successive filtering";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<SpaceError>(m, "SpaceError", PyExc_ValueError);
  py::register_exception<NoSuccessError>(m, "NoSuccessError", PyExc_RuntimeError);

  m.def("gaussian_ucb", [](const std::vector<double>& rewards, double c) { return gaussian_ucb(rewards, c); },
        py::arg("rewards"), py::arg("c") = 2.0);
  m.def("advance_probabilities", [](const std::vector<double>& ucbs) { return advance_probabilities(ucbs); },
        py::arg("ucbs"));
  m.def(
      "allocate_resources",
      [](const std::vector<double>& ucbs, double budget, const std::string& mode) {
        return allocate_resources(ucbs, budget, budget_mode(mode));
      },
      py::arg("ucbs"), py::arg("budget"), py::arg("mode") = "time");
  m.def(
      "partition",
      [](const std::string& space_text, int k) {
        std::vector<std::string> out;
        for (const auto& s : partition(space_from_text(space_text), k)) out.push_back(space_to_json(s.space()).dump());
        return out;
      },
      py::arg("space"), py::arg("k"));
  m.def("branin", &branin, py::arg("x1"), py::arg("x2"));
  m.def("sphere", [](const std::vector<double>& x) { return sphere(x); }, py::arg("x"));
  m.def("balanced_accuracy",
        [](const std::vector<int>& y_true, const std::vector<int>& y_pred) { return balanced_accuracy(y_true, y_pred); },
        py::arg("y_true"), py::arg("y_pred"));
  m.def("kfold_split", &kfold_split, py::arg("n"), py::arg("k"), py::arg("seed") = 0);
  m.def("run", &run_from_text, py::arg("config"), py::arg("seed") = py::none(), py::arg("parallelism") = py::none());
  m.def("optimize", &optimize, py::arg("objective"), py::arg("space"), py::arg("budget"), py::arg("rounds") = 3,
        py::arg("ucb_c") = 2.0, py::arg("partition_k") = 2, py::arg("seed") = 0, py::arg("minimize") = false,
        py::arg("lo") = 0.0, py::arg("hi") = 1.0);
  m.attr("BRANIN_MINIMUM") = kBraninMinimum;
}
