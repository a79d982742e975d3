#include "agentran/agents/control_agent.hpp"

#include <cmath>
#include <fmt/format.h>

#include "agentran/reasoner/prompt.hpp"

namespace agentran::agents {

using model::ActionType;
using model::ControlAction;

namespace {

constexpr double kTickEps = 1e-9;

Json kpi_summary(const sim::KpiSnapshot& s) {
  Json slices = Json::array();
  for (const auto& sl : s.per_slice)
    slices.push_back({{"slice_id", sl.slice_id},
                      {"per_ue_throughput_bps", sl.per_ue_throughput_bps()},
                      {"throttle_limit_bps", sl.throttle_limit_bps}});
  Json ues = Json::array();
  for (const auto& u : s.per_ue)
    ues.push_back({{"ue_id", u.ue_id},
                   {"throughput_bps", u.throughput_bps},
                   {"snr_target_db", u.snr_target_db},
                   {"power_draw_mw", u.power_draw_mw}});
  return Json{{"timestamp_s", s.timestamp_s}, {"per_slice", slices}, {"per_ue", ues}};
}

ActionType allowed_action(AgentRole role) {
  return role == AgentRole::kPowerControl ? ActionType::kSetSnrTarget : ActionType::kSetThrottleLimit;
}

}  // namespace

ControlAgent::ControlAgent(AgentConfig cfg, AgentEnv env) : Agent(std::move(cfg), std::move(env)) {
  if (cfg_.role != AgentRole::kPowerControl && cfg_.role != AgentRole::kUlResourceAllocation)
    throw std::invalid_argument("agent " + cfg_.agent_id + ": ControlAgent needs role power_control or ul_ra");
  if (!(cfg_.cycle_period_s > 0.0)) throw std::invalid_argument("agent " + cfg_.agent_id + ": cycle_period_s <= 0");
  if (!reasoner_) throw std::invalid_argument("agent " + cfg_.agent_id + " has no reasoner");
  cfg_.guardrails.validate();
  next_cycle_s_ = now() + cfg_.cycle_period_s;
}

std::vector<std::string> ControlAgent::discovered_tools() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : tools_) out.push_back(name);
  return out;
}

bool ControlAgent::discover_tools() {
  if (!tools_.empty()) return true;
  if (!env_.connect) return false;
  std::map<std::string, std::shared_ptr<fabric::ToolClient>> found;
  try {
    for (const auto& addr : cfg_.tool_servers) {
      auto client = std::make_shared<fabric::ToolClient>(env_.connect(addr));
      for (const auto& d : client->list_tools()) found.emplace(d.name, client);
    }
  } catch (const std::exception& e) {
    log_lifecycle("tool_discovery_failed", {{"error", e.what()}});
    return false;
  }
  tools_ = std::move(found);
  log_lifecycle("tools_discovered", {{"tools", discovered_tools()}, {"servers", cfg_.tool_servers}});
  return !tools_.empty();
}

Json ControlAgent::call(const std::string& tool, const Json& args) {
  auto it = tools_.find(tool);
  if (it == tools_.end())
    throw fabric::RpcException(fabric::rpc_code::kMethodNotFound, "Method not found: " + tool);
  return it->second->call_tool(tool, args);
}

void ControlAgent::tick(double now_s) {
  if (now_s + kTickEps < next_cycle_s_) return;
  while (next_cycle_s_ <= now_s + kTickEps) next_cycle_s_ += cfg_.cycle_period_s;
  control_cycle();
}

bool ControlAgent::requirements_unmet() const {
  if (!active_ || window_.empty()) return false;
  const auto& snap = window_.latest();
  for (const auto& r : active_->requirements) {
    if (!r.min_throughput_bps) continue;
    const auto* s = snap.slice(r.slice_id);
    if (s && s->per_ue_throughput_bps() < *r.min_throughput_bps) return true;
  }
  return false;
}

std::optional<model::DecisionRecord> ControlAgent::control_cycle() {
  if (!discover_tools()) return std::nullopt;

  sim::KpiSnapshot snap;
  try {
    snap = call("get_kpis", Json{{"window_s", cfg_.kpi_window_s}}).get<sim::KpiSnapshot>();
    window_.push(snap);
  } catch (const model::OrderingError&) {
    return std::nullopt;  // no new sample since the last cycle
  } catch (const std::exception& e) {
    log_lifecycle("kpi_fetch_failed", {{"error", e.what()}});
    return std::nullopt;
  }
  if (!history_.empty() && !history_.back().resulting_kpis) history_.back().resulting_kpis = kpi_summary(snap);
  if (!active_) return std::nullopt;

  ++cycle_index_;
  reasoner::ReasonerRequest req;
  req.expected = reasoner::OutputKind::kActions;
  req.role = cfg_.role;
  req.requirements = active_->requirements;
  req.window = &window_;
  req.slices = env_.slices;
  for (const auto& u : snap.per_ue) req.applied_snr_targets[u.ue_id] = u.snr_target_db;
  for (const auto& s : snap.per_slice) req.applied_throttles[s.slice_id] = s.throttle_limit_bps;

  const auto prompt = reasoner::assemble_prompt(profile(), *active_, window_, history_);
  std::optional<model::DecisionRecord> out;
  try {
    const auto decision = reasoner_->decide(prompt, req);
    const auto proposed = reasoner::actions_of(decision);
    model::DecisionRecord rec;
    rec.agent_id = id();
    rec.cycle_index = cycle_index_;
    rec.timestamp_s = now();
    rec.sub_intent_id = active_->sub_intent_id;
    rec.input_window_digest = window_.digest();
    rec.proposed_actions = proposed;
    rec.rationale_text = decision.rationale_text;
    rec.backend = decision.backend;
    rec.retries = decision.retries;

    for (const auto& a : proposed) {
      if (a.type != allowed_action(cfg_.role)) {
        log_lifecycle("action_rejected", {{"action", a}, {"reason", "tool not available to this role"}});
        continue;
      }
      const auto& current_map =
          a.type == ActionType::kSetSnrTarget ? req.applied_snr_targets : req.applied_throttles;
      const auto cur = current_map.find(a.target_id);
      if (cur == current_map.end()) {
        log_lifecycle("action_rejected", {{"action", a}, {"reason", "unknown target"}});
        continue;
      }
      const auto clamped = model::apply_guardrails(a, cur->second, cfg_.guardrails);
      const Json args = a.type == ActionType::kSetSnrTarget
                            ? Json{{"ue_id", a.target_id}, {"target_db", clamped.applied.value}}
                            : Json{{"slice_id", a.target_id}, {"limit_bps", clamped.applied.value}};
      try {
        call(a.tool_name(), args);
        rec.clamped_actions.push_back(clamped);
      } catch (const std::exception& e) {
        log_lifecycle("tool_call_failed", {{"tool", a.tool_name()}, {"arguments", args}, {"error", e.what()}});
      }
    }
    if (!rec.clamped_actions.empty()) {
      if (env_.record) env_.record(datalake::RecordKind::kDecision, rec.timestamp_s, Json(rec), id());
      history_.push_back(rec);
      if (history_.size() > reasoner::kPromptHistoryDepth) history_.erase(history_.begin());
      out = std::move(rec);
    }
  } catch (const std::exception& e) {
    log_lifecycle("reasoner_failure",
                  {{"error", e.what()}, {"cycle_index", cycle_index_}, {"policy", "hold previous configuration"}});
  }

  if (requirements_unmet()) {
    if (++unmet_streak_ >= cfg_.unmet_cycles_before_report) {
      report(MessageKind::kConstraintReport, active_->sub_intent_id);
      unmet_streak_ = 0;
    }
  } else {
    unmet_streak_ = 0;
  }
  return out;
}

void ControlAgent::report(MessageKind kind, const std::string& correlation_id) {
  if (cfg_.parent_id.empty()) return;
  const auto reqs = active_ ? active_->requirements : std::vector<model::SliceRequirement>{};
  auto rep = model::build_context_report(id(), window_, reqs, active_ ? active_->sub_intent_id : "");
  rep.timestamp_s = now();
  std::string text = rep.summary_text;
  send(cfg_.parent_id, kind, std::move(text), Json(rep), correlation_id);
}

void ControlAgent::on_message(const A2aMessage& m) {
  if (m.kind != MessageKind::kSubIntent || !m.body_structured || !m.body_structured->contains("sub_intent")) {
    log_lifecycle("message_ignored", {{"kind", fabric::to_string(m.kind)}, {"sender", m.sender}});
    return;
  }
  model::SubIntent sub;
  try {
    sub = m.body_structured->at("sub_intent").get<model::SubIntent>();
    for (const auto& r : sub.requirements) r.validate("sub_intent.requirements");
  } catch (const std::exception& e) {
    log_lifecycle("sub_intent_rejected", {{"error", e.what()}, {"sender", m.sender}});
    send(m.sender, MessageKind::kAck, fmt::format("Sub-intent rejected: {}", e.what()), Json{{"accepted", false}},
         m.correlation_id);
    return;
  }
  const bool refinement = m.body_structured->value("refinement", false);
  const bool same = active_ && active_->sub_intent_id == sub.sub_intent_id && active_->revision == sub.revision;
  if (!same) {
    active_ = sub;
    unmet_streak_ = 0;
    log_lifecycle("sub_intent_accepted", {{"sub_intent_id", sub.sub_intent_id}, {"revision", sub.revision}});
  }
  if (!refinement) report(MessageKind::kContextReport, sub.sub_intent_id);
}

Json ControlAgent::status() const {
  Json j = Agent::status();
  j["cycles"] = cycle_index_;
  j["unmet_streak"] = unmet_streak_;
  j["tools"] = discovered_tools();
  j["active_sub_intent"] = active_ ? Json(*active_) : Json();
  j["last_decision"] = history_.empty() ? Json() : Json(history_.back());
  return j;
}

DlRaStub::DlRaStub(AgentConfig cfg, AgentEnv env) : Agent(std::move(cfg), std::move(env)) {
  if (cfg_.role != AgentRole::kDlResourceAllocation)
    throw std::invalid_argument("agent " + cfg_.agent_id + ": DlRaStub needs role dl_ra");
  if (!(cfg_.dl_utilization >= 0.0 && cfg_.dl_utilization <= 1.0))
    throw std::invalid_argument("agent " + cfg_.agent_id + ": dl_utilization outside [0, 1]");
}

void DlRaStub::on_message(const A2aMessage& m) {
  if (m.kind != MessageKind::kSubIntent || !m.body_structured || !m.body_structured->contains("sub_intent")) return;
  try {
    active_ = m.body_structured->at("sub_intent").get<model::SubIntent>();
  } catch (const std::exception& e) {
    log_lifecycle("sub_intent_rejected", {{"error", e.what()}});
    return;
  }
  if (m.body_structured->value("refinement", false) || cfg_.parent_id.empty()) return;
  model::ContextReport rep;
  rep.reporter = id();
  rep.sub_intent_id = active_->sub_intent_id;
  rep.timestamp_s = now();
  rep.mean_cell_utilization = cfg_.dl_utilization;
  const double u = cfg_.dl_utilization;
  const char* level = u < 0.5 ? "low" : u < 0.8 ? "moderate" : "high";
  rep.summary_text = fmt::format("Resource usage is {}, {:.0f}% average PRB utilization.", level, u * 100.0);
  send(cfg_.parent_id, MessageKind::kContextReport, rep.summary_text, Json(rep), active_->sub_intent_id);
}

}  // namespace agentran::agents
