#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "agentran/model/guardrails.hpp"
#include "agentran/model/intent.hpp"
#include "agentran/model/kpi_window.hpp"

namespace agentran::model {

struct DecisionRecord {
  std::string agent_id;
  std::uint64_t cycle_index = 0;
  double timestamp_s = 0.0;
  std::string sub_intent_id;
  std::string input_window_digest;
  std::vector<ControlAction> proposed_actions;
  std::vector<ClampedAction> clamped_actions;
  std::string rationale_text;
  std::optional<Json> resulting_kpis;
  std::string backend;
  int retries = 0;

  std::size_t clamp_count() const;
  friend bool operator==(const DecisionRecord&, const DecisionRecord&) = default;
};

// One infeasibility in machine-readable form; text goes into constraints.
struct ConstraintNote {
  std::string kind;  // "below_min", "contention", "poor_mcs"
  int slice_id = 0;
  std::string slice_name;
  double observed = 0.0;
  double required = 0.0;
  std::string text;

  friend bool operator==(const ConstraintNote&, const ConstraintNote&) = default;
};

struct SliceMetrics {
  int slice_id = 0;
  std::string name;
  int ue_count = 0;
  double mean_aggregate_throughput_bps = 0.0;
  double mean_per_ue_throughput_bps = 0.0;
  double mean_prb_utilization = 0.0;
  double mean_snr_db = 0.0;
  double mean_snr_target_db = 0.0;
  double mean_tx_power_dbm = 0.0;
  double mean_power_draw_mw = 0.0;
  double mean_mcs_index = 0.0;
  double throttle_limit_bps = 0.0;  // latest sample

  friend bool operator==(const SliceMetrics&, const SliceMetrics&) = default;
};

struct ContextReport {
  std::string reporter;
  std::string sub_intent_id;
  double timestamp_s = 0.0;
  std::string summary_text;
  std::vector<SliceMetrics> metrics;
  double mean_cell_throughput_bps = 0.0;
  double mean_cell_utilization = 0.0;
  std::vector<std::string> constraints;
  std::vector<ConstraintNote> notes;
  bool no_data = false;
  std::size_t samples = 0;

  const SliceMetrics* slice(int slice_id) const;
  friend bool operator==(const ContextReport&, const ContextReport&) = default;
};

inline constexpr double kContentionUtilization = 0.95;
inline constexpr double kPoorMcsSnrDb = 10.0;

// Metrics are window means. A min-throughput requirement is unmet when the
// slice's mean per-UE throughput is below it; contention is only a constraint
// for slices carrying a delay budget.
ContextReport build_context_report(const std::string& reporter, const KpiWindow& window,
                                   const std::vector<SliceRequirement>& requirements,
                                   const std::string& sub_intent_id = {});

std::string format_mbps(double bps);

void to_json(Json& j, const DecisionRecord& r);
void from_json(const Json& j, DecisionRecord& r);
void to_json(Json& j, const ConstraintNote& n);
void from_json(const Json& j, ConstraintNote& n);
void to_json(Json& j, const SliceMetrics& m);
void from_json(const Json& j, SliceMetrics& m);
void to_json(Json& j, const ContextReport& r);
void from_json(const Json& j, ContextReport& r);

}  // namespace agentran::model
