#pragma once

#include <cstdint>
#include <istream>
#include <mutex>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "boasf/bandit.hpp"
#include "json.hpp"

namespace boasf {

inline constexpr const char* kTraceSchema = "boasf-trace/1";

nlohmann::ordered_json configuration_to_json(const Configuration& config);
Configuration configuration_from_json(const nlohmann::json& obj, const SearchSpace& space);

// JSON Lines trace sink. Each event carries a strictly increasing "index" and
// the run id. Appends are serialized, so workers may share one writer.
// Wall times are only written for time budgets, which keeps count-mode
// traces byte-identical between runs.
class TraceWriter final : public RunObserver {
 public:
  TraceWriter(std::ostream& out, std::string run_id, bool include_wall_time);

  void header(const nlohmann::ordered_json& effective_config);
  void on_evaluation(const EvaluationRecord& rec) override;
  void on_round(const RoundReport& report) override;
  void final_result(const BestResult& best);

  [[nodiscard]] std::uint64_t events_written() const;

 private:
  void emit(nlohmann::ordered_json event);

  mutable std::mutex mu_;
  std::ostream& out_;
  std::string run_id_;
  bool include_wall_time_;
  std::uint64_t next_index_ = 0;
};

// Stable 16-hex-digit FNV-1a digest of the text.
std::string run_id_for(const std::string& text);

class TraceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parses every line as a JSON event and checks the envelope: known event
// type, increasing indices, one run id. Throws TraceError with the line number.
std::vector<nlohmann::json> read_trace(std::istream& in);

}  // namespace boasf
