#pragma once

#include "agentran/reasoner/reasoner.hpp"

namespace agentran::reasoner {

struct RuleEngineConfig {
  double throttle_step = 0.2;           // relative raise of a throttle with slack
  double backoff = 0.8;                 // competitors drop to this share of what they carry
  double spectral_setpoint_db = 15.0;   // floor for spectral-efficiency slices
  double moderate_setpoint_db = 5.0;    // target for moderate battery saving
  double battery_headroom = 1.2;        // step down only with this margin over a minimum
  double snr_step_db = 3.0;
  double delay_split_contended_dl = 0.2;
  model::GuardrailConfig guardrails;

  friend bool operator==(const RuleEngineConfig&, const RuleEngineConfig&) = default;
};

void to_json(Json& j, const RuleEngineConfig& c);
void from_json(const Json& j, RuleEngineConfig& c);

// Deterministic backend. Power control:
//   below a minimum -> +3 dB; aggressive battery saving -> -3 dB toward the
//   lowest bound while throughput keeps the headroom; moderate -> toward 5 dB;
//   spectral efficiency -> up to the setpoint (never lowered).
// Uplink allocation:
//   high-priority slices are unthrottled; a slice below its minimum makes the
//   competing slices back off to 80% of what they carry; a non-priority slice
//   below fair share gains 20% when every minimum keeps enough slack; without
//   priorities or minimums every throttle is lifted.
// Nothing to do -> empty action list.
class RuleEngine final : public Reasoner {
 public:
  explicit RuleEngine(RuleEngineConfig cfg = {}) : cfg_(std::move(cfg)) {}
  std::string name() const override { return "rule"; }
  ReasonerOutput decide(const PromptContext& prompt, const ReasonerRequest& request) override;

  ReasonerOutput decide_actions(const ReasonerRequest& request) const;
  ReasonerOutput decompose(const ReasonerRequest& request) const;
  const RuleEngineConfig& config() const { return cfg_; }

 private:
  RuleEngineConfig cfg_;
};

// The NL instruction for a set of requirements, as sent to a child.
std::string render_sub_intent_text(AgentRole role, const std::vector<model::SliceRequirement>& reqs,
                                   const std::vector<SliceInfo>& slices);

}  // namespace agentran::reasoner
