#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "agentran/model/records.hpp"
#include "agentran/reasoner/output.hpp"
#include "agentran/reasoner/prompt.hpp"

namespace agentran::reasoner {

class ReasonerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ChildInfo {
  std::string agent_id;
  AgentRole role = AgentRole::kPowerControl;
};

// Structured side of a decision request. The LLM backend only sees what the
// prompt renders; the rule engine reads these fields directly.
struct ReasonerRequest {
  OutputKind expected = OutputKind::kActions;
  AgentRole role = AgentRole::kPowerControl;
  std::vector<model::SliceRequirement> requirements;
  const model::KpiWindow* window = nullptr;
  std::vector<SliceInfo> slices;
  std::map<int, double> applied_snr_targets;  // ue_id -> last applied target
  std::map<int, double> applied_throttles;    // slice_id -> last applied limit

  std::optional<model::Intent> intent;
  std::vector<model::ContextReport> context;
  std::vector<ChildInfo> children;
  std::vector<model::SubIntent> previous;
};

class Reasoner {
 public:
  virtual ~Reasoner() = default;
  virtual std::string name() const = 0;
  // Returns validated output or throws ReasonerError / ValidationError.
  virtual ReasonerOutput decide(const PromptContext& prompt, const ReasonerRequest& request) = 0;
};

}  // namespace agentran::reasoner
