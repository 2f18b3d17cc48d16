#include "boasf/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

namespace boasf {
namespace {

using nlohmann::json;

const json* child(const json& obj, const std::string& key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

void require_object(const json& value, const std::string& field) {
  if (!value.is_object()) throw ConfigError(field, "expected an object");
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& path) {
  for (const auto& [key, value] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      throw ConfigError(path.empty() ? key : path + "." + key, "unknown field");
    }
  }
}

double get_number(const json& value, const std::string& field) {
  if (!value.is_number()) throw ConfigError(field, "expected a number");
  const double v = value.get<double>();
  if (!std::isfinite(v)) throw ConfigError(field, "expected a finite number");
  return v;
}

std::int64_t get_integer(const json& value, const std::string& field) {
  if (value.is_number_integer()) return value.get<std::int64_t>();
  if (value.is_number_float()) {
    const double v = value.get<double>();
    if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 9e15) return static_cast<std::int64_t>(v);
  }
  throw ConfigError(field, "expected an integer");
}

std::string get_string(const json& value, const std::string& field) {
  if (!value.is_string()) throw ConfigError(field, "expected a string");
  return value.get<std::string>();
}

std::uint64_t get_seed(const json& value, const std::string& field) {
  const auto v = get_integer(value, field);
  if (v < 0) throw ConfigError(field, "seeds must be non-negative");
  return static_cast<std::uint64_t>(v);
}

RunMode parse_mode(const std::string& token, const std::string& field) {
  if (token == "model-selection") return RunMode::kModelSelection;
  if (token == "hpo") return RunMode::kHpo;
  throw ConfigError(field, "expected \"model-selection\" or \"hpo\", got \"" + token + "\"");
}

BudgetMode parse_budget_mode(const std::string& token, const std::string& field) {
  if (token == "count" || token == "evaluation-count") return BudgetMode::kCount;
  if (token == "time" || token == "wall-clock-seconds") return BudgetMode::kWallClock;
  throw ConfigError(field, "expected \"count\" or \"time\", got \"" + token + "\"");
}

std::string category_token(const json& value, const std::string& field) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_number() || value.is_boolean()) return value.dump();
  throw ConfigError(field, "categorical values must be strings, numbers or booleans");
}

bool is_objective_target(const std::string& target) { return target == "branin" || target == "sphere"; }

void parse_run_section(const json& run, RunConfig& cfg) {
  require_object(run, "run");
  check_keys(run, {"mode", "rounds", "ucb_c", "seed", "seeds", "timeout", "parallelism", "output", "cv_folds"}, "run");
  if (const auto* v = child(run, "mode")) cfg.mode = parse_mode(get_string(*v, "run.mode"), "run.mode");
  if (const auto* v = child(run, "rounds")) {
    const auto r = get_integer(*v, "run.rounds");
    if (r < 1 || r > 1000) throw ConfigError("run.rounds", "must be between 1 and 1000");
    cfg.rounds = static_cast<int>(r);
  }
  if (const auto* v = child(run, "ucb_c")) cfg.ucb_c = get_number(*v, "run.ucb_c");
  if (const auto* v = child(run, "seed")) {
    const auto s = get_seed(*v, "run.seed");
    cfg.seeds = Seeds{s, s, s};
  }
  if (const auto* v = child(run, "seeds")) {
    require_object(*v, "run.seeds");
    check_keys(*v, {"filter", "sampling", "data"}, "run.seeds");
    if (const auto* s = child(*v, "filter")) cfg.seeds.filter = get_seed(*s, "run.seeds.filter");
    if (const auto* s = child(*v, "sampling")) cfg.seeds.sampling = get_seed(*s, "run.seeds.sampling");
    if (const auto* s = child(*v, "data")) cfg.seeds.data = get_seed(*s, "run.seeds.data");
  }
  if (const auto* v = child(run, "timeout")) cfg.timeout = get_number(*v, "run.timeout");
  if (const auto* v = child(run, "parallelism")) cfg.parallelism = static_cast<int>(get_integer(*v, "run.parallelism"));
  if (const auto* v = child(run, "output")) cfg.output = get_string(*v, "run.output");
  if (const auto* v = child(run, "cv_folds")) {
    const auto k = get_integer(*v, "run.cv_folds");
    if (k < 2) throw ConfigError("run.cv_folds", "must be >= 2");
    cfg.cv_folds = static_cast<std::size_t>(k);
  }
}

void parse_budget_section(const json& budget, RunConfig& cfg) {
  require_object(budget, "budget");
  check_keys(budget, {"mode", "amount"}, "budget");
  if (const auto* v = child(budget, "mode")) {
    cfg.budget.mode = parse_budget_mode(get_string(*v, "budget.mode"), "budget.mode");
  }
  if (const auto* v = child(budget, "amount")) cfg.budget.amount = get_number(*v, "budget.amount");
}

void parse_tpe_section(const json& tpe, TpeParams& p) {
  require_object(tpe, "tpe");
  check_keys(tpe, {"gamma", "n_candidates", "min_observations", "bandwidth_floor", "prior_weight"}, "tpe");
  if (const auto* v = child(tpe, "gamma")) p.gamma = get_number(*v, "tpe.gamma");
  if (const auto* v = child(tpe, "n_candidates")) {
    p.n_candidates = static_cast<int>(get_integer(*v, "tpe.n_candidates"));
  }
  if (const auto* v = child(tpe, "min_observations")) {
    p.min_observations = static_cast<int>(get_integer(*v, "tpe.min_observations"));
  }
  if (const auto* v = child(tpe, "bandwidth_floor")) p.bandwidth_floor = get_number(*v, "tpe.bandwidth_floor");
  if (const auto* v = child(tpe, "prior_weight")) p.prior_weight = get_number(*v, "tpe.prior_weight");
}

void parse_dataset_section(const json& ds, RunConfig& cfg) {
  require_object(ds, "dataset");
  check_keys(ds, {"csv", "generator", "samples", "noise_features", "noise", "seed"}, "dataset");
  if (const auto* v = child(ds, "csv")) cfg.dataset.csv = get_string(*v, "dataset.csv");
  auto& g = cfg.dataset.generator;
  if (const auto* v = child(ds, "generator")) g.kind = get_string(*v, "dataset.generator");
  if (const auto* v = child(ds, "samples")) {
    const auto n = get_integer(*v, "dataset.samples");
    if (n < 2) throw ConfigError("dataset.samples", "must be >= 2");
    g.samples = static_cast<std::size_t>(n);
  }
  if (const auto* v = child(ds, "noise_features")) {
    const auto n = get_integer(*v, "dataset.noise_features");
    if (n < 0) throw ConfigError("dataset.noise_features", "must be >= 0");
    g.noise_features = static_cast<std::size_t>(n);
  }
  if (const auto* v = child(ds, "noise")) {
    g.noise = get_number(*v, "dataset.noise");
    if (g.noise < 0.0) throw ConfigError("dataset.noise", "must be >= 0");
  }
  if (const auto* v = child(ds, "seed")) cfg.dataset.generator.seed = get_seed(*v, "dataset.seed");
}

void parse_hpo_section(const json& hpo, RunConfig& cfg) {
  require_object(hpo, "hpo");
  check_keys(hpo, {"target", "partition_k", "space"}, "hpo");
  if (const auto* v = child(hpo, "target")) cfg.target = get_string(*v, "hpo.target");
  if (const auto* v = child(hpo, "partition_k")) {
    cfg.partition_k = static_cast<int>(get_integer(*v, "hpo.partition_k"));
  }
  if (const auto* v = child(hpo, "space")) cfg.space = parse_space(*v, "hpo.space");
}

void validate(RunConfig& cfg, bool dataset_seed_given) {
  try {
    cfg.budget.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("budget.amount", e.what());
  }
  if (cfg.budget.mode == BudgetMode::kCount && cfg.budget.amount < cfg.rounds) {
    throw ConfigError("budget.amount", "count budgets need at least one evaluation per round");
  }
  if (!(cfg.ucb_c > 0.0)) throw ConfigError("run.ucb_c", "must be > 0");
  if (cfg.parallelism < 1) throw ConfigError("run.parallelism", "must be >= 1");
  if (cfg.timeout && !(*cfg.timeout > 0.0)) throw ConfigError("run.timeout", "must be > 0");
  if (!cfg.timeout && cfg.budget.mode == BudgetMode::kWallClock) cfg.timeout = 120.0;
  if (cfg.output.empty()) throw ConfigError("run.output", "must not be empty");

  const auto& t = cfg.tpe;
  if (!(t.gamma > 0.0 && t.gamma < 1.0)) throw ConfigError("tpe.gamma", "must lie in (0, 1)");
  if (t.n_candidates < 1) throw ConfigError("tpe.n_candidates", "must be >= 1");
  if (t.min_observations < 2) throw ConfigError("tpe.min_observations", "must be >= 2");
  if (!(t.bandwidth_floor > 0.0)) throw ConfigError("tpe.bandwidth_floor", "must be > 0");
  if (!(t.prior_weight > 0.0)) throw ConfigError("tpe.prior_weight", "must be > 0");

  if (!dataset_seed_given) cfg.dataset.generator.seed = cfg.seeds.data;
  const auto& kind = cfg.dataset.generator.kind;
  if (!cfg.dataset.csv && kind != "two-clusters" && kind != "xor" && kind != "rings") {
    throw ConfigError("dataset.generator", "unknown generator \"" + kind + "\"");
  }
  if (!cfg.dataset.csv && cfg.dataset.generator.samples < cfg.cv_folds) {
    throw ConfigError("dataset.samples", "fewer samples than cross-validation folds");
  }

  if (cfg.mode == RunMode::kModelSelection) {
    if (cfg.learners.empty()) {
      for (const auto& l : builtin_learners()) cfg.learners.push_back(l->name());
    }
    std::set<std::string> seen;
    for (std::size_t i = 0; i < cfg.learners.size(); ++i) {
      const auto field = "learners[" + std::to_string(i) + "]";
      if (!find_learner(cfg.learners[i])) throw ConfigError(field, "unknown learner \"" + cfg.learners[i] + "\"");
      if (!seen.insert(cfg.learners[i]).second) throw ConfigError(field, "duplicate learner");
    }
    return;
  }

  if (cfg.partition_k < 1) throw ConfigError("hpo.partition_k", "must be >= 1");
  if (cfg.target.empty()) {
    if (!cfg.space) throw ConfigError("hpo.target", "required in hpo mode");
    return;  // partition inspection only
  }
  if (!is_objective_target(cfg.target) && !find_learner(cfg.target)) {
    throw ConfigError("hpo.target", "unknown target \"" + cfg.target + "\"");
  }
  if (cfg.space && cfg.target != "sphere") {
    throw ConfigError("hpo.space", "only the sphere objective accepts a custom space");
  }
  if (cfg.target == "sphere" && cfg.space) {
    for (const auto& p : cfg.space->params()) {
      if (std::holds_alternative<CategoricalDomain>(p.domain)) {
        throw ConfigError("hpo.space", "sphere needs numeric parameters, \"" + p.name + "\" is categorical");
      }
    }
  }
}

}  // namespace

SearchSpace parse_space(const json& params, const std::string& field) {
  if (!params.is_array() || params.empty()) throw ConfigError(field, "expected a non-empty list of parameters");
  std::vector<Param> out;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto path = field + "[" + std::to_string(i) + "]";
    const auto& p = params[i];
    require_object(p, path);
    check_keys(p, {"name", "type", "low", "high", "scale", "values"}, path);
    const auto* name = child(p, "name");
    const auto* type = child(p, "type");
    if (name == nullptr) throw ConfigError(path + ".name", "missing");
    if (type == nullptr) throw ConfigError(path + ".type", "missing");
    const auto kind = get_string(*type, path + ".type");
    Param param{get_string(*name, path + ".name"), ContinuousDomain{}};

    auto bound = [&](const char* key) -> const json& {
      const auto* v = child(p, key);
      if (v == nullptr) throw ConfigError(path + "." + key, "missing");
      return *v;
    };
    if (kind == "continuous") {
      ContinuousDomain d;
      d.low = get_number(bound("low"), path + ".low");
      d.high = get_number(bound("high"), path + ".high");
      if (const auto* s = child(p, "scale")) {
        const auto scale = get_string(*s, path + ".scale");
        if (scale == "log" || scale == "logarithmic") {
          d.scale = Scale::kLog;
        } else if (scale != "linear") {
          throw ConfigError(path + ".scale", "expected \"linear\" or \"log\"");
        }
      }
      param.domain = d;
    } else if (kind == "integer") {
      param.domain = IntegerDomain{get_integer(bound("low"), path + ".low"), get_integer(bound("high"), path + ".high")};
    } else if (kind == "categorical") {
      const auto& values = bound("values");
      if (!values.is_array()) throw ConfigError(path + ".values", "expected a list");
      CategoricalDomain d;
      for (std::size_t j = 0; j < values.size(); ++j) {
        d.values.push_back(category_token(values[j], path + ".values[" + std::to_string(j) + "]"));
      }
      param.domain = std::move(d);
    } else {
      throw ConfigError(path + ".type", "expected continuous, integer or categorical");
    }
    out.push_back(std::move(param));
  }
  try {
    return SearchSpace(std::move(out));
  } catch (const SpaceError& e) {
    throw ConfigError(field, e.what());
  }
}

nlohmann::ordered_json space_to_json(const SearchSpace& space) {
  auto out = nlohmann::ordered_json::array();
  for (const auto& p : space.params()) {
    nlohmann::ordered_json entry;
    entry["name"] = p.name;
    if (const auto* c = std::get_if<ContinuousDomain>(&p.domain)) {
      entry["type"] = "continuous";
      entry["low"] = c->low;
      entry["high"] = c->high;
      entry["scale"] = c->scale == Scale::kLog ? "log" : "linear";
    } else if (const auto* i = std::get_if<IntegerDomain>(&p.domain)) {
      entry["type"] = "integer";
      entry["low"] = i->low;
      entry["high"] = i->high;
    } else {
      entry["type"] = "categorical";
      entry["values"] = std::get<CategoricalDomain>(p.domain).values;
    }
    out.push_back(std::move(entry));
  }
  return out;
}

RunConfig parse_run_config(const json& doc, const Overrides& overrides) {
  require_object(doc, "<root>");
  check_keys(doc, {"run", "budget", "tpe", "learners", "hpo", "dataset"}, "");

  RunConfig cfg;
  cfg.parallelism = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const auto* v = child(doc, "run")) parse_run_section(*v, cfg);
  if (const auto* v = child(doc, "budget")) parse_budget_section(*v, cfg);
  if (const auto* v = child(doc, "tpe")) parse_tpe_section(*v, cfg.tpe);
  if (const auto* v = child(doc, "learners")) {
    if (!v->is_array()) throw ConfigError("learners", "expected a list of learner names");
    for (std::size_t i = 0; i < v->size(); ++i) {
      cfg.learners.push_back(get_string((*v)[i], "learners[" + std::to_string(i) + "]"));
    }
  }
  if (const auto* v = child(doc, "hpo")) parse_hpo_section(*v, cfg);
  bool dataset_seed_given = false;
  if (const auto* v = child(doc, "dataset")) {
    parse_dataset_section(*v, cfg);
    dataset_seed_given = child(*v, "seed") != nullptr;
  }

  if (overrides.mode) cfg.mode = parse_mode(*overrides.mode, "--mode");
  if (overrides.budget_mode) cfg.budget.mode = parse_budget_mode(*overrides.budget_mode, "--budget-mode");
  if (overrides.budget) cfg.budget.amount = *overrides.budget;
  if (overrides.rounds) {
    if (*overrides.rounds < 1) throw ConfigError("run.rounds", "must be >= 1 (from --rounds)");
    cfg.rounds = *overrides.rounds;
  }
  if (overrides.ucb_c) cfg.ucb_c = *overrides.ucb_c;
  if (overrides.partition_k) cfg.partition_k = *overrides.partition_k;
  if (overrides.seed) cfg.seeds = Seeds{*overrides.seed, *overrides.seed, *overrides.seed};
  if (overrides.timeout) cfg.timeout = *overrides.timeout;
  if (overrides.output) cfg.output = *overrides.output;
  if (overrides.parallelism) cfg.parallelism = *overrides.parallelism;

  validate(cfg, dataset_seed_given && !overrides.seed);
  return cfg;
}

RunConfig parse_run_config_text(const std::string& text, const std::string& origin, const Overrides& overrides) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    // nlohmann reports "at line L, column C"
    throw ConfigError(origin, e.what());
  }
  return parse_run_config(doc, overrides);
}

RunConfig load_run_config(const std::string& path, const Overrides& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot read configuration file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config_text(ss.str(), path, overrides);
}

nlohmann::ordered_json effective_config(const RunConfig& cfg) {
  nlohmann::ordered_json out;
  out["run"]["mode"] = to_string(cfg.mode);
  out["run"]["rounds"] = cfg.rounds;
  out["run"]["ucb_c"] = cfg.ucb_c;
  out["run"]["seeds"] = {{"filter", cfg.seeds.filter}, {"sampling", cfg.seeds.sampling}, {"data", cfg.seeds.data}};
  out["run"]["timeout"] = cfg.timeout ? nlohmann::ordered_json(*cfg.timeout) : nlohmann::ordered_json(nullptr);
  out["run"]["cv_folds"] = cfg.cv_folds;
  out["budget"] = {{"mode", to_string(cfg.budget.mode)}, {"amount", cfg.budget.amount}};
  out["tpe"] = {{"gamma", cfg.tpe.gamma},
                {"n_candidates", cfg.tpe.n_candidates},
                {"min_observations", cfg.tpe.min_observations},
                {"bandwidth_floor", cfg.tpe.bandwidth_floor},
                {"prior_weight", cfg.tpe.prior_weight}};
  if (cfg.mode == RunMode::kModelSelection) {
    out["learners"] = cfg.learners;
  } else {
    out["hpo"]["target"] = cfg.target;
    out["hpo"]["partition_k"] = cfg.partition_k;
    if (cfg.space) out["hpo"]["space"] = space_to_json(*cfg.space);
  }
  if (cfg.dataset.csv) {
    out["dataset"]["csv"] = *cfg.dataset.csv;
  } else {
    const auto& g = cfg.dataset.generator;
    out["dataset"] = {{"generator", g.kind},
                      {"samples", g.samples},
                      {"noise_features", g.noise_features},
                      {"noise", g.noise},
                      {"seed", g.seed}};
  }
  return out;
}

SearchSpace hpo_space(const RunConfig& cfg) {
  if (cfg.space) return *cfg.space;
  if (cfg.target == "branin") return branin_space();
  if (cfg.target == "sphere") {
    return SearchSpace({{"x0", ContinuousDomain{-5.0, 5.0}}, {"x1", ContinuousDomain{-5.0, 5.0}}});
  }
  if (auto learner = find_learner(cfg.target)) return learner->space();
  throw ConfigError("hpo.target", "unknown target \"" + cfg.target + "\"");
}

std::string to_string(RunMode mode) { return mode == RunMode::kHpo ? "hpo" : "model-selection"; }
std::string to_string(BudgetMode mode) { return mode == BudgetMode::kCount ? "count" : "time"; }

}  // namespace boasf
