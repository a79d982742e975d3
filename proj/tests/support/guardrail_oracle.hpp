#pragma once

// Expected guardrail output: the proposal projected onto the feasible set.
// For SNR targets the feasible set is [current - d, current + d] intersected
// with the absolute bounds. When that intersection is empty the absolute
// bound nearest the delta window wins.

#include <algorithm>
#include <random>
#include <string>

#include "agentran/model/guardrails.hpp"

namespace agentran::oracle {

using model::ActionType;
using model::ControlAction;
using model::GuardrailConfig;

inline double expected_applied(const ControlAction& a, double current, const GuardrailConfig& g) {
  const double v = a.value;
  if (a.type == ActionType::kSetThrottleLimit) return std::min(std::max(v, g.throttle_min_bps), g.throttle_max_bps);
  const double lo = std::max(current - g.max_snr_delta_per_cycle_db, g.snr_target_min_db);
  const double hi = std::min(current + g.max_snr_delta_per_cycle_db, g.snr_target_max_db);
  if (lo <= hi) return std::min(std::max(v, lo), hi);
  return current > g.snr_target_max_db ? g.snr_target_max_db : g.snr_target_min_db;
}

struct GuardrailCase {
  ControlAction action;
  double current = 0.0;
  GuardrailConfig config;
};

inline GuardrailCase random_guardrail_case(std::mt19937_64& rng) {
  GuardrailCase c;
  std::uniform_real_distribution<double> u(0, 1);
  c.config.max_snr_delta_per_cycle_db = 0.5 + 5.0 * u(rng);
  c.config.snr_target_min_db = -30 + 20 * u(rng);
  c.config.snr_target_max_db = c.config.snr_target_min_db + 1 + 40 * u(rng);
  c.config.throttle_min_bps = 1e6 + 9e6 * u(rng);
  c.config.throttle_max_bps = c.config.throttle_min_bps + 1e6 + 2e8 * u(rng);
  if (rng() % 2) {
    c.action.type = ActionType::kSetSnrTarget;
    // Mostly in range, sometimes wildly outside, sometimes exactly on an edge.
    c.current = -40 + 80 * u(rng);
    switch (rng() % 4) {
      case 0: c.action.value = c.current + c.config.max_snr_delta_per_cycle_db; break;
      case 1: c.action.value = -1e6 + 2e6 * u(rng); break;
      default: c.action.value = c.current - 10 + 20 * u(rng);
    }
  } else {
    c.action.type = ActionType::kSetThrottleLimit;
    c.current = 1e8 * u(rng);
    c.action.value = rng() % 5 == 0 ? c.config.throttle_max_bps : -1e8 + 4e8 * u(rng);
  }
  c.action.target_id = static_cast<int>(rng() % 8);
  return c;
}

// Empty string when the guardrail output agrees with the oracle.
inline std::string check_guardrail_case(const GuardrailCase& c) {
  const auto out = model::apply_guardrails(c.action, c.current, c.config);
  const double want = expected_applied(c.action, c.current, c.config);
  if (out.applied.value != want) return "applied " + std::to_string(out.applied.value) + " want " + std::to_string(want);
  if (out.applied.type != c.action.type || out.applied.target_id != c.action.target_id) return "action identity changed";
  if (out.proposed != c.action) return "proposal not preserved";
  if (out.clamped != (want != c.action.value)) return "clamped flag wrong";
  if (out.clamped == out.clamp_reasons.empty()) return "clamp reasons inconsistent";
  if (out.previous != c.current) return "previous not recorded";
  return {};
}

}  // namespace agentran::oracle
