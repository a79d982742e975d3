#include "agentran/reasoner/prompt.hpp"

#include <fmt/format.h>

namespace agentran::reasoner {

std::string role_description(AgentRole role) {
  switch (role) {
    case AgentRole::kManager:
      return "You are the AgentRAN manager. You receive operator intents and route each one to the layer agent "
             "responsible for it.";
    case AgentRole::kLayerManager:
      return "You are the Layer 2 manager agent. You break operator intents down into sub-intents for the power "
             "control agent and the resource allocation agents, and you refine them when a child reports a "
             "constraint.";
    case AgentRole::kPowerControl:
      return "You are the power control agent. Every cycle you choose the target SNR of each UE; the power "
             "control dApp steers UE transmit power toward it with TPC commands.";
    case AgentRole::kUlResourceAllocation:
      return "You are the uplink resource allocation agent. Every cycle you choose the throttling limit of each "
             "slice; the proportional fair scheduler dApp stops serving UEs whose average throughput exceeds it.";
    case AgentRole::kDlResourceAllocation:
      return "You are the downlink resource allocation agent. You report downlink resource usage and accept "
             "delay budgets for downlink traffic.";
  }
  return {};
}

std::string render_kpi_digest(const model::KpiWindow& window) {
  if (window.empty()) return "none";
  std::string out;
  for (const auto& s : window.samples()) {
    out += fmt::format("t={:.3f}s:", s.timestamp_s);
    for (const auto& sk : s.per_slice)
      out += fmt::format(" {}[agg={:.3f}Mbps util={:.3f} throttle={:.3f}Mbps]", sk.name,
                         sk.aggregate_throughput_bps / 1e6, sk.prb_utilization, sk.throttle_limit_bps / 1e6);
    for (const auto& u : s.per_ue)
      out += fmt::format(" ue{}[thr={:.3f}Mbps snr={:.2f}dB target={:.2f}dB tx={:.2f}dBm mcs={}]", u.ue_id,
                         u.throughput_bps / 1e6, u.snr_db, u.snr_target_db, u.tx_power_dbm, u.mcs_index);
    out += '\n';
  }
  return out;
}

std::string render_history(std::span<const model::DecisionRecord> history) {
  if (history.empty()) return "none";
  std::string out;
  for (const auto& d : history) {
    out += fmt::format("cycle {} (t={:.3f}s):", d.cycle_index, d.timestamp_s);
    for (const auto& a : d.clamped_actions)
      out += fmt::format(" {}({}) {:g} -> {:g}{}", model::to_string(a.applied.type), a.applied.target_id, a.previous,
                         a.applied.value, a.clamped ? fmt::format(" [clamped from {:g}]", a.proposed.value) : "");
    if (d.resulting_kpis) out += " result " + d.resulting_kpis->dump();
    out += '\n';
  }
  return out;
}

PromptContext assemble_prompt(const AgentProfile& agent, const std::string& task_text,
                              const model::KpiWindow& window, std::span<const model::DecisionRecord> history) {
  PromptContext p;
  p.role_text = role_description(agent.role);
  std::string ctx = agent.scenario_text.empty() ? std::string("Single-cell 5G uplink.") : agent.scenario_text;
  for (const auto& s : agent.slices) {
    ctx += fmt::format("\nSlice {} (id {}): {}", s.name, s.slice_id, s.description);
    if (!s.ue_ids.empty()) {
      ctx += " UEs:";
      for (int u : s.ue_ids) ctx += fmt::format(" {}", u);
      ctx += '.';
    }
  }
  p.context_text = std::move(ctx);
  p.bounds_text = model::render_bounds(agent.guardrails);
  const std::size_t keep = std::min(history.size(), kPromptHistoryDepth);
  p.history.assign(history.end() - static_cast<std::ptrdiff_t>(keep), history.end());
  p.history_text = render_history(p.history);
  p.kpi_digest = render_kpi_digest(window);
  p.kpi_samples = window.size();
  p.task_text = task_text;
  return p;
}

std::string PromptContext::system_text() const {
  return "# Role\n" + role_text + "\n\n# Context\n" + context_text + "\n\n# Bounds\n" + bounds_text +
         "\n\n# Output\nAnswer with exactly one fenced ```json block holding an object with the members "
         "\"kind\", \"payload\" and \"rationale_text\".\n";
}

std::string PromptContext::user_text() const {
  return "# Recent decisions\n" + history_text + "\n\n# KPIs\n" + kpi_digest + "\n\n# Task\n" + task_text + "\n";
}

std::string PromptContext::render() const { return system_text() + "\n" + user_text(); }

}  // namespace agentran::reasoner
