#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "agentran/datalake/store.hpp"
#include "agentran/model/intent.hpp"

namespace agentran::datalake {

struct ViolationReport {
  std::string intent_id;
  int slice_id = 0;
  std::string slice_name;
  std::string requirement;  // "min_throughput_bps"
  double observed = 0.0;    // mean of the governed metric over the episode
  double required = 0.0;
  double start_s = 0.0;     // first failing sample
  double end_s = 0.0;       // last failing sample
  bool resolved = false;

  friend bool operator==(const ViolationReport&, const ViolationReport&) = default;
};

void to_json(Json& j, const ViolationReport& v);
void from_json(const Json& j, ViolationReport& v);

inline constexpr int kViolationDebounceSamples = 2;

// Pure over the log. The governed metric is the slice's per-UE throughput,
// averaged over the trailing window_s of KPI samples. An episode opens after
// 2 consecutive failing samples and closes after 2 consecutive passing ones.
// Only samples in [intent.timestamp_s, until_s] are considered.
std::vector<ViolationReport> detect_violations(std::span<const LogRecord> records, const model::Intent& intent,
                                               double window_s, std::optional<double> until_s = std::nullopt);
std::vector<ViolationReport> detect_violations(const LogStore& store, const model::Intent& intent, double window_s,
                                               std::optional<double> until_s = std::nullopt);

// Appends one violation record per report; returns the assigned seqs.
std::vector<std::uint64_t> record_violations(LogStore& store, const std::vector<ViolationReport>& reports);

struct MaxStepRun {
  int target_id = 0;
  std::size_t cycles = 0;
  double start_s = 0.0;
  double end_s = 0.0;
  double direction = 0.0;  // +1 or -1
};

struct AgentBehaviorReport {
  std::string agent_id;
  bool found = false;
  std::size_t cycles = 0;  // decision records
  std::size_t actions = 0;
  std::map<std::string, std::size_t> actions_by_type;
  std::size_t clamp_count = 0;
  double clamp_rate = 0.0;  // clamps / actions
  std::map<std::string, std::size_t> clamps_by_reason;
  double violation_overlap_ratio = 0.0;  // decisions inside an open violation / decisions
  std::vector<MaxStepRun> max_step_runs;  // >= 2 consecutive full-size SNR steps
  std::string text;
};

AgentBehaviorReport summarize_agent_behavior(std::span<const LogRecord> records, const std::string& agent_id,
                                             double t0, double t1, double max_step_db = 3.0);
AgentBehaviorReport summarize_agent_behavior(const LogStore& store, const std::string& agent_id, double t0,
                                             double t1, double max_step_db = 3.0);

}  // namespace agentran::datalake
