#include "boasf/report.hpp"

#include <algorithm>
#include <iomanip>
#include <map>

#include "boasf/trace.hpp"

namespace boasf {
namespace {

double field_number(const nlohmann::json& e, const char* key) {
  const auto it = e.find(key);
  if (it == e.end() || !it->is_number()) {
    throw TraceError("event " + e.value("index", nlohmann::json(-1)).dump() + ": missing numeric \"" + key + "\"");
  }
  return it->get<double>();
}

std::string field_string(const nlohmann::json& e, const char* key) {
  const auto it = e.find(key);
  if (it == e.end() || !it->is_string()) {
    throw TraceError("event " + e.value("index", nlohmann::json(-1)).dump() + ": missing string \"" + key + "\"");
  }
  return it->get<std::string>();
}

}  // namespace

TraceSummary summarize_trace(const std::vector<nlohmann::json>& events) {
  TraceSummary s;
  std::optional<double> best;
  std::map<std::pair<int, std::string>, int> counted;  // (round, arm) -> evaluations

  for (const auto& e : events) {
    const auto type = e["event"].get<std::string>();
    if (type == "evaluation") {
      const double cost = field_number(e, "cost");
      const auto status = field_string(e, "status");
      ++s.evaluations;
      s.total_cost += cost;
      ++counted[{static_cast<int>(field_number(e, "round")), field_string(e, "arm")}];
      if (status == "success") {
        const double reward = field_number(e, "reward");
        best = best ? std::max(*best, reward) : reward;
      } else if (status == "failure") {
        ++s.failures;
      } else {
        throw TraceError("evaluation event with unknown status \"" + status + "\"");
      }
      if (best) s.curve.push_back({s.total_cost, *best});
    } else if (type == "round") {
      RoundSummary r;
      r.round = static_cast<int>(field_number(e, "round"));
      r.round_budget = field_number(e, "round_budget");
      const auto it = e.find("arms");
      if (it == e.end() || !it->is_array()) throw TraceError("round event without arms");
      for (const auto& a : *it) {
        RoundSummary::ArmLine line;
        line.arm = field_string(a, "arm");
        if (a.contains("ucb") && a["ucb"].is_number()) line.ucb = a["ucb"].get<double>();
        line.advance_probability = field_number(a, "advance_probability");
        line.allocated = field_number(a, "allocated");
        line.evaluations = static_cast<int>(field_number(a, "evaluations"));
        line.survived = a.value("survived", false);
        if (counted[{r.round, line.arm}] != line.evaluations) {
          throw TraceError("round " + std::to_string(r.round) + ", arm " + line.arm + ": report lists " +
                           std::to_string(line.evaluations) + " evaluations, trace has " +
                           std::to_string(counted[{r.round, line.arm}]));
        }
        r.survivors += line.survived ? 1 : 0;
        r.arms.push_back(std::move(line));
      }
      s.rounds.push_back(std::move(r));
    } else if (type == "final") {
      s.final_reward = field_number(e, "reward");
      s.final_arm = field_string(e, "arm");
    }
  }
  if (s.evaluations == 0) throw TraceError("trace contains no evaluations");
  return s;
}

void write_curve_csv(std::ostream& out, const std::vector<CurvePoint>& curve) {
  out << "cumulative_cost,best_reward\n";
  const auto precision = out.precision(17);
  for (const auto& p : curve) out << p.cumulative_cost << ',' << p.best_reward << '\n';
  out.precision(precision);
}

void print_summary(std::ostream& out, const TraceSummary& s) {
  out << "evaluations: " << s.evaluations << " (" << s.failures << " failed), total cost " << s.total_cost << '\n';
  for (const auto& r : s.rounds) {
    out << "round " << r.round << ": budget " << r.round_budget << ", " << r.arms.size() << " arms, " << r.survivors
        << " survive\n";
    for (const auto& a : r.arms) {
      out << "  " << std::left << std::setw(22) << a.arm << std::right << " ucb ";
      if (a.ucb) {
        out << std::fixed << std::setprecision(4) << *a.ucb;
      } else {
        out << "   -  ";
      }
      out << "  p " << std::fixed << std::setprecision(3) << a.advance_probability << "  alloc "
          << std::setprecision(2) << a.allocated << "  evals " << a.evaluations << (a.survived ? "  kept" : "  dropped")
          << '\n';
      out.unsetf(std::ios::fixed);
      out << std::setprecision(6);
    }
  }
  if (s.final_reward) out << "best: " << s.final_arm << " reward " << *s.final_reward << '\n';
}

}  // namespace boasf
