#include "agentran/agents/agent.hpp"

#include <stdexcept>

namespace agentran::agents {

void to_json(Json& j, const AgentConfig& c) {
  j = Json{{"agent_id", c.agent_id},
           {"role", model::to_string(c.role)},
           {"parent_id", c.parent_id},
           {"domain", c.domain},
           {"cycle_period_s", c.cycle_period_s},
           {"guardrails", c.guardrails},
           {"reasoner", c.reasoner},
           {"tool_servers", c.tool_servers},
           {"heartbeat_s", c.heartbeat_s},
           {"max_renegotiations", c.max_renegotiations},
           {"unmet_cycles_before_report", c.unmet_cycles_before_report},
           {"kpi_window_s", c.kpi_window_s},
           {"dl_utilization", c.dl_utilization}};
}

void from_json(const Json& j, AgentConfig& c) {
  c = AgentConfig{};
  c.agent_id = j.at("agent_id").get<std::string>();
  c.role = model::role_from_string(j.at("role").get<std::string>());
  c.parent_id = j.value("parent_id", std::string{});
  c.domain = j.value("domain", std::string{});
  c.cycle_period_s = j.value("cycle_period_s", c.cycle_period_s);
  if (j.contains("guardrails")) c.guardrails = j["guardrails"].get<model::GuardrailConfig>();
  c.reasoner = j.value("reasoner", c.reasoner);
  c.tool_servers = j.value("tool_servers", std::vector<std::string>{});
  c.heartbeat_s = j.value("heartbeat_s", c.heartbeat_s);
  c.max_renegotiations = j.value("max_renegotiations", c.max_renegotiations);
  c.unmet_cycles_before_report = j.value("unmet_cycles_before_report", c.unmet_cycles_before_report);
  c.kpi_window_s = j.value("kpi_window_s", c.kpi_window_s);
  c.dl_utilization = j.value("dl_utilization", c.dl_utilization);
}

Agent::Agent(AgentConfig cfg, AgentEnv env) : cfg_(std::move(cfg)), env_(std::move(env)) {
  if (cfg_.agent_id.empty()) throw std::invalid_argument("agent_id must not be empty");
  if (!env_.bus) throw std::invalid_argument("agent " + cfg_.agent_id + " has no message bus");
  if (!env_.now) throw std::invalid_argument("agent " + cfg_.agent_id + " has no clock");
  inbox_ = env_.bus->subscribe(cfg_.agent_id);
  if (env_.reasoner) reasoner_ = env_.reasoner(cfg_);
}

std::size_t Agent::pump() {
  std::size_t n = 0;
  while (auto m = inbox_->try_pop()) {
    on_message(*m);
    ++n;
  }
  if (n > 0) after_pump();
  return n;
}

Json Agent::status() const {
  return Json{{"agent_id", cfg_.agent_id},
              {"role", model::to_string(cfg_.role)},
              {"parent_id", cfg_.parent_id},
              {"cycle_period_s", cfg_.cycle_period_s},
              {"reasoner", reasoner_ ? reasoner_->name() : std::string("none")}};
}

void Agent::send(const std::string& to, MessageKind kind, std::string body_text, std::optional<Json> structured,
                 std::string correlation_id) {
  A2aMessage m;
  m.sender = cfg_.agent_id;
  m.recipient = to;
  m.kind = kind;
  m.body_text = std::move(body_text);
  m.body_structured = std::move(structured);
  m.correlation_id = std::move(correlation_id);
  env_.bus->send(std::move(m));
}

void Agent::log_lifecycle(const std::string& event, Json details) const {
  if (!env_.record) return;
  env_.record(datalake::RecordKind::kLifecycle, env_.now(), Json{{"event", event}, {"details", std::move(details)}},
              cfg_.agent_id);
}

reasoner::AgentProfile Agent::profile() const {
  reasoner::AgentProfile p;
  p.agent_id = cfg_.agent_id;
  p.role = cfg_.role;
  p.scenario_text = env_.scenario_text;
  p.slices = env_.slices;
  p.guardrails = cfg_.guardrails;
  return p;
}

}  // namespace agentran::agents
