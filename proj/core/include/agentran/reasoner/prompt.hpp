#pragma once

#include <span>
#include <string>
#include <vector>

#include "agentran/model/guardrails.hpp"
#include "agentran/model/intent.hpp"
#include "agentran/model/kpi_window.hpp"
#include "agentran/model/records.hpp"
#include "agentran/model/roles.hpp"

namespace agentran::reasoner {

using model::AgentRole;
using Json = nlohmann::json;

struct SliceInfo {
  int slice_id = 0;
  std::string name;
  std::string description;
  std::vector<int> ue_ids;

  friend bool operator==(const SliceInfo&, const SliceInfo&) = default;
};

struct AgentProfile {
  std::string agent_id;
  AgentRole role = AgentRole::kPowerControl;
  std::string scenario_text;
  std::vector<SliceInfo> slices;
  model::GuardrailConfig guardrails;
};

inline constexpr std::size_t kPromptHistoryDepth = 5;

struct PromptContext {
  std::string role_text;
  std::string context_text;
  std::string bounds_text;
  std::vector<model::DecisionRecord> history;  // most recent last, at most 5
  std::string history_text;
  std::string kpi_digest;
  std::string task_text;
  std::size_t kpi_samples = 0;

  // The full system + user prompt, sections in fixed order.
  std::string system_text() const;
  std::string user_text() const;
  std::string render() const;
  friend bool operator==(const PromptContext&, const PromptContext&) = default;
};

std::string role_description(AgentRole role);
std::string render_kpi_digest(const model::KpiWindow& window);
std::string render_history(std::span<const model::DecisionRecord> history);

PromptContext assemble_prompt(const AgentProfile& agent, const std::string& task_text,
                              const model::KpiWindow& window, std::span<const model::DecisionRecord> history);
inline PromptContext assemble_prompt(const AgentProfile& agent, const model::SubIntent& sub,
                                     const model::KpiWindow& window,
                                     std::span<const model::DecisionRecord> history) {
  return assemble_prompt(agent, sub.body_text, window, history);
}

}  // namespace agentran::reasoner
