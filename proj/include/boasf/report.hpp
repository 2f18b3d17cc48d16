#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

namespace boasf {

struct CurvePoint {
  double cumulative_cost = 0.0;
  double best_reward = 0.0;
};

struct RoundSummary {
  int round = 0;
  double round_budget = 0.0;
  struct ArmLine {
    std::string arm;
    std::optional<double> ucb;
    double advance_probability = 0.0;
    double allocated = 0.0;
    int evaluations = 0;
    bool survived = false;
  };
  std::vector<ArmLine> arms;
  std::size_t survivors = 0;
};

struct TraceSummary {
  std::size_t evaluations = 0;
  std::size_t failures = 0;
  double total_cost = 0.0;
  std::vector<RoundSummary> rounds;
  std::vector<CurvePoint> curve;  // one point per evaluation once a success exists
  std::optional<double> final_reward;
  std::string final_arm;
};

// Builds the anytime curve and round table from parsed trace events, checking
// that per-round evaluation counts agree with the evaluation events.
// Throws TraceError on an empty or inconsistent trace.
TraceSummary summarize_trace(const std::vector<nlohmann::json>& events);

// Header `cumulative_cost,best_reward`, one row per curve point.
void write_curve_csv(std::ostream& out, const std::vector<CurvePoint>& curve);
void print_summary(std::ostream& out, const TraceSummary& summary);

}  // namespace boasf
