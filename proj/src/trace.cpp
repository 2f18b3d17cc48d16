#include "boasf/trace.hpp"

#include <cmath>
#include <cstdio>

namespace boasf {
namespace {

nlohmann::ordered_json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}

}  // namespace

nlohmann::ordered_json configuration_to_json(const Configuration& config) {
  nlohmann::ordered_json out = nlohmann::ordered_json::object();
  for (const auto& [name, value] : config.entries()) {
    std::visit([&, &key = name](const auto& v) { out[key] = v; }, value);
  }
  return out;
}

Configuration configuration_from_json(const nlohmann::json& obj, const SearchSpace& space) {
  if (!obj.is_object()) throw SpaceError("configuration must be a JSON object");
  std::vector<std::pair<std::string, ParamValue>> entries;
  for (const auto& p : space.params()) {
    const auto it = obj.find(p.name);
    if (it == obj.end()) throw SpaceError("configuration is missing '" + p.name + "'");
    if (std::holds_alternative<ContinuousDomain>(p.domain)) {
      if (!it->is_number()) throw SpaceError("'" + p.name + "' must be a number");
      entries.emplace_back(p.name, it->get<double>());
    } else if (std::holds_alternative<IntegerDomain>(p.domain)) {
      if (!it->is_number_integer()) throw SpaceError("'" + p.name + "' must be an integer");
      entries.emplace_back(p.name, it->get<std::int64_t>());
    } else {
      entries.emplace_back(p.name, it->is_string() ? it->get<std::string>() : it->dump());
    }
  }
  if (obj.size() != space.size()) throw SpaceError("configuration has unexpected parameters");
  Configuration config(std::move(entries));
  validate_configuration(space, config);
  return config;
}

TraceWriter::TraceWriter(std::ostream& out, std::string run_id, bool include_wall_time)
    : out_(out), run_id_(std::move(run_id)), include_wall_time_(include_wall_time) {}

void TraceWriter::emit(nlohmann::ordered_json event) {
  std::lock_guard lock(mu_);
  nlohmann::ordered_json line;
  line["event"] = std::move(event["event"]);
  line["index"] = next_index_++;
  line["run_id"] = run_id_;
  for (auto& [key, value] : event.items()) {
    if (key != "event") line[key] = std::move(value);
  }
  out_ << line.dump() << '\n';
  out_.flush();
}

void TraceWriter::header(const nlohmann::ordered_json& effective_config) {
  nlohmann::ordered_json e;
  e["event"] = "header";
  e["schema"] = kTraceSchema;
  e["config"] = effective_config;
  emit(std::move(e));
}

void TraceWriter::on_evaluation(const EvaluationRecord& rec) {
  nlohmann::ordered_json e;
  e["event"] = "evaluation";
  e["round"] = rec.round;
  e["arm"] = rec.arm_id;
  e["sequence"] = rec.sequence;
  e["config"] = configuration_to_json(rec.config);
  e["status"] = rec.ok() ? "success" : "failure";
  if (!rec.ok()) {
    e["reason"] = to_string(rec.reason);
    e["error"] = rec.error;
  }
  e["reward"] = rec.reward ? nlohmann::ordered_json(*rec.reward) : nlohmann::ordered_json(nullptr);
  e["raw_value"] = number_or_null(rec.raw_value);
  e["cost"] = rec.cost;
  if (include_wall_time_) e["wall_time"] = rec.wall_time;
  emit(std::move(e));
}

void TraceWriter::on_round(const RoundReport& report) {
  nlohmann::ordered_json e;
  e["event"] = "round";
  e["round"] = report.round;
  e["round_budget"] = report.round_budget;
  auto arms = nlohmann::ordered_json::array();
  for (const auto& a : report.arms) {
    nlohmann::ordered_json entry;
    entry["arm"] = a.arm_id;
    entry["allocated"] = a.allocated;
    entry["evaluations"] = a.evaluations;
    entry["failures"] = a.failures;
    entry["consumed"] = a.consumed;
    entry["ucb"] = a.ucb ? nlohmann::ordered_json(*a.ucb) : nlohmann::ordered_json(nullptr);
    entry["advance_probability"] = a.advance_probability;
    entry["survived"] = a.survived;
    arms.push_back(std::move(entry));
  }
  e["arms"] = std::move(arms);
  e["survivors"] = report.survivors;
  emit(std::move(e));
}

void TraceWriter::final_result(const BestResult& best) {
  nlohmann::ordered_json e;
  e["event"] = "final";
  e["arm"] = best.arm_id;
  e["config"] = configuration_to_json(best.config);
  e["reward"] = best.reward;
  e["raw_value"] = number_or_null(best.raw_value);
  e["total_cost"] = best.total_cost;
  e["evaluations"] = best.records.size();
  emit(std::move(e));
}

std::uint64_t TraceWriter::events_written() const {
  std::lock_guard lock(mu_);
  return next_index_;
}

std::string run_id_for(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<nlohmann::json> read_trace(std::istream& in) {
  std::vector<nlohmann::json> events;
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::int64_t> last_index;
  std::string run_id;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto where = "trace line " + std::to_string(line_no) + ": ";
    nlohmann::json event;
    try {
      event = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw TraceError(where + e.what());
    }
    if (!event.is_object() || !event.contains("event") || !event["event"].is_string()) {
      throw TraceError(where + "missing event type");
    }
    const auto type = event["event"].get<std::string>();
    if (type != "header" && type != "evaluation" && type != "round" && type != "final") {
      throw TraceError(where + "unknown event type \"" + type + "\"");
    }
    if (!event.contains("index") || !event["index"].is_number_integer()) {
      throw TraceError(where + "missing event index");
    }
    const auto index = event["index"].get<std::int64_t>();
    if (last_index && index <= *last_index) throw TraceError(where + "event indices must increase");
    last_index = index;
    if (!event.contains("run_id") || !event["run_id"].is_string()) throw TraceError(where + "missing run id");
    const auto id = event["run_id"].get<std::string>();
    if (run_id.empty()) {
      run_id = id;
    } else if (id != run_id) {
      throw TraceError(where + "events from more than one run");
    }
    events.push_back(std::move(event));
  }
  return events;
}

}  // namespace boasf
