#include "agentran/model/guardrails.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

namespace agentran::model {

void GuardrailConfig::validate() const {
  if (!(max_snr_delta_per_cycle_db > 0.0)) throw GuardrailError("max_snr_delta_per_cycle_db must be positive");
  if (!(snr_target_min_db < snr_target_max_db)) throw GuardrailError("snr bounds: min must be below max");
  if (!(throttle_min_bps < throttle_max_bps)) throw GuardrailError("throttle bounds: min must be below max");
}

std::string to_string(ActionType t) {
  return t == ActionType::kSetSnrTarget ? "set_snr_target" : "set_throttle_limit";
}

ActionType action_type_from_string(const std::string& s) {
  if (s == "set_snr_target") return ActionType::kSetSnrTarget;
  if (s == "set_throttle_limit") return ActionType::kSetThrottleLimit;
  throw GuardrailError("unknown action type " + s);
}

std::string ControlAction::tool_name() const { return to_string(type); }

ClampedAction apply_guardrails(const ControlAction& proposed, double current, const GuardrailConfig& g) {
  if (!std::isfinite(proposed.value)) throw GuardrailError("proposed value is not finite");
  if (!std::isfinite(current)) throw GuardrailError("current value is not finite");
  ClampedAction out{proposed, proposed, current, false, {}};
  double v = proposed.value;
  if (proposed.type == ActionType::kSetSnrTarget) {
    const double lo = current - g.max_snr_delta_per_cycle_db;
    const double hi = current + g.max_snr_delta_per_cycle_db;
    if (v < lo || v > hi) {
      v = std::clamp(v, lo, hi);
      out.clamp_reasons.push_back("delta");
    }
    if (v < g.snr_target_min_db) {
      v = g.snr_target_min_db;
      out.clamp_reasons.push_back("min");
    } else if (v > g.snr_target_max_db) {
      v = g.snr_target_max_db;
      out.clamp_reasons.push_back("max");
    }
  } else {
    if (v < g.throttle_min_bps) {
      v = g.throttle_min_bps;
      out.clamp_reasons.push_back("min");
    } else if (v > g.throttle_max_bps) {
      v = g.throttle_max_bps;
      out.clamp_reasons.push_back("max");
    }
  }
  out.applied.value = v;
  out.clamped = !out.clamp_reasons.empty();
  return out;
}

std::string render_bounds(const GuardrailConfig& g) {
  return fmt::format(
      "SNR target changes are limited to ±{:g} dB per cycle. SNR targets must stay within [{:g}, {:g}] dB. "
      "Throttling limits must stay within [{:g}, {:g}] Mbit/s.",
      g.max_snr_delta_per_cycle_db, g.snr_target_min_db, g.snr_target_max_db, g.throttle_min_bps / 1e6,
      g.throttle_max_bps / 1e6);
}

void to_json(nlohmann::json& j, const GuardrailConfig& g) {
  j = {{"max_snr_delta_per_cycle_db", g.max_snr_delta_per_cycle_db},
       {"snr_target_bounds_db", {g.snr_target_min_db, g.snr_target_max_db}},
       {"throttle_bounds_bps", {g.throttle_min_bps, g.throttle_max_bps}}};
}

void from_json(const nlohmann::json& j, GuardrailConfig& g) {
  g = GuardrailConfig{};
  g.max_snr_delta_per_cycle_db = j.value("max_snr_delta_per_cycle_db", g.max_snr_delta_per_cycle_db);
  if (j.contains("snr_target_bounds_db")) {
    g.snr_target_min_db = j["snr_target_bounds_db"].at(0).get<double>();
    g.snr_target_max_db = j["snr_target_bounds_db"].at(1).get<double>();
  }
  if (j.contains("throttle_bounds_bps")) {
    g.throttle_min_bps = j["throttle_bounds_bps"].at(0).get<double>();
    g.throttle_max_bps = j["throttle_bounds_bps"].at(1).get<double>();
  }
  g.validate();
}

void to_json(nlohmann::json& j, const ControlAction& a) {
  j = {{"type", to_string(a.type)}, {"target_id", a.target_id}, {"value", a.value}};
}

void from_json(const nlohmann::json& j, ControlAction& a) {
  a.type = action_type_from_string(j.at("type").get<std::string>());
  a.target_id = j.at("target_id").get<int>();
  a.value = j.at("value").get<double>();
}

void to_json(nlohmann::json& j, const ClampedAction& a) {
  j = {{"proposed", a.proposed},
       {"applied", a.applied},
       {"previous", a.previous},
       {"clamped", a.clamped},
       {"clamp_reasons", a.clamp_reasons}};
}

void from_json(const nlohmann::json& j, ClampedAction& a) {
  a.proposed = j.at("proposed").get<ControlAction>();
  a.applied = j.at("applied").get<ControlAction>();
  a.previous = j.value("previous", 0.0);
  a.clamped = j.value("clamped", false);
  a.clamp_reasons = j.value("clamp_reasons", std::vector<std::string>{});
}

}  // namespace agentran::model
