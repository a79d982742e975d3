#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace agentran::model {

struct GuardrailConfig {
  double max_snr_delta_per_cycle_db = 3.0;
  double snr_target_min_db = -15.0;
  double snr_target_max_db = 18.0;
  double throttle_min_bps = 3e6;
  double throttle_max_bps = 1e8;

  void validate() const;
  friend bool operator==(const GuardrailConfig&, const GuardrailConfig&) = default;
};

enum class ActionType { kSetSnrTarget, kSetThrottleLimit };

std::string to_string(ActionType t);
ActionType action_type_from_string(const std::string& s);

// target_id is a ue_id for SNR targets and a slice_id for throttle limits.
struct ControlAction {
  ActionType type = ActionType::kSetSnrTarget;
  int target_id = 0;
  double value = 0.0;  // dB or bit/s

  std::string tool_name() const;
  friend bool operator==(const ControlAction&, const ControlAction&) = default;
};

struct ClampedAction {
  ControlAction proposed;
  ControlAction applied;
  double previous = 0.0;
  bool clamped = false;
  std::vector<std::string> clamp_reasons;  // "delta", "min", "max"

  friend bool operator==(const ClampedAction&, const ClampedAction&) = default;
};

class GuardrailError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// SNR targets: limited to +-max_delta of current, then to the absolute bounds.
// Throttles: clamped to the throttle bounds. Non-finite proposals throw.
ClampedAction apply_guardrails(const ControlAction& proposed, double current, const GuardrailConfig& g);

std::string render_bounds(const GuardrailConfig& g);

void to_json(nlohmann::json& j, const GuardrailConfig& g);
void from_json(const nlohmann::json& j, GuardrailConfig& g);
void to_json(nlohmann::json& j, const ControlAction& a);
void from_json(const nlohmann::json& j, ControlAction& a);
void to_json(nlohmann::json& j, const ClampedAction& a);
void from_json(const nlohmann::json& j, ClampedAction& a);

}  // namespace agentran::model
