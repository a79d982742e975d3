#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "agentran/model/guardrails.hpp"
#include "agentran/model/intent.hpp"

namespace agentran::reasoner {

using Json = nlohmann::json;

enum class OutputKind { kActions, kSubIntents, kReport };

std::string to_string(OutputKind k);
OutputKind output_kind_from_string(const std::string& s);

// Payload shapes:
//   actions:     {"actions": [{"tool": "set_snr_target", "ue_id": 3, "target_db": 12.0},
//                             {"tool": "set_throttle_limit", "slice_id": 1, "limit_bps": 2e7}]}
//   sub_intents: {"sub_intents": [{"target_agent": "...", "body_text": "...", "requirements": [...]}]}
//   report:      {"summary_text": "...", "constraints": ["..."]}
struct ReasonerOutput {
  OutputKind kind = OutputKind::kActions;
  Json payload;
  std::string rationale_text;
  int retries = 0;
  std::string backend;

  friend bool operator==(const ReasonerOutput&, const ReasonerOutput&) = default;
};

class ValidationError : public std::invalid_argument {
 public:
  ValidationError(const std::string& field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(field) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// Structural checks only; numeric bounds are the guardrails' job.
ReasonerOutput validate_output(const ReasonerOutput& o, OutputKind expected);
// Parses {"kind", "payload", "rationale_text"} then validates.
ReasonerOutput validate_output(const Json& raw, OutputKind expected);

struct ProposedSubIntent {
  std::string target_agent;
  std::string body_text;
  std::vector<model::SliceRequirement> requirements;
};

// Typed views of a validated payload.
std::vector<model::ControlAction> actions_of(const ReasonerOutput& o);
std::vector<ProposedSubIntent> sub_intents_of(const ReasonerOutput& o);

Json actions_payload(const std::vector<model::ControlAction>& actions);
Json to_json(const ReasonerOutput& o);

// Schema reminder appended to re-prompts.
std::string output_schema_text(OutputKind expected);

}  // namespace agentran::reasoner
