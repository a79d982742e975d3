#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "agentran/datalake/store.hpp"
#include "agentran/fabric/bus.hpp"
#include "agentran/fabric/tools.hpp"
#include "agentran/model/guardrails.hpp"
#include "agentran/model/roles.hpp"
#include "agentran/reasoner/reasoner.hpp"

namespace agentran::agents {

using Json = nlohmann::json;
using fabric::A2aMessage;
using fabric::MessageKind;
using model::AgentRole;

// One entry of the deployment descriptor.
struct AgentConfig {
  std::string agent_id;
  AgentRole role = AgentRole::kPowerControl;
  std::string parent_id;
  std::string domain;  // layer tag used for routing, e.g. "L2"
  double cycle_period_s = 1.0;
  model::GuardrailConfig guardrails;
  std::string reasoner = "rule";  // "rule" or "llm"
  std::vector<std::string> tool_servers;  // "inproc://name" or "tcp://host:port"
  double heartbeat_s = 10.0;
  int max_renegotiations = 3;
  int unmet_cycles_before_report = 5;
  double kpi_window_s = 1.0;
  double dl_utilization = 0.43;  // reported by the downlink stub

  friend bool operator==(const AgentConfig&, const AgentConfig&) = default;
};

void to_json(Json& j, const AgentConfig& c);
void from_json(const Json& j, AgentConfig& c);

using RecordSink = std::function<void(datalake::RecordKind, double timestamp_s, Json payload,
                                      const std::string& agent_id)>;
using Connector = std::function<std::shared_ptr<fabric::Transport>(const std::string& address)>;
using ReasonerFactory = std::function<std::shared_ptr<reasoner::Reasoner>(const AgentConfig&)>;

// What an agent may touch outside itself.
struct AgentEnv {
  fabric::MessageBus* bus = nullptr;
  std::function<double()> now;
  RecordSink record;
  ReasonerFactory reasoner;
  Connector connect;
  std::vector<reasoner::SliceInfo> slices;
  std::string scenario_text;
};

class Agent {
 public:
  Agent(AgentConfig cfg, AgentEnv env);
  virtual ~Agent() = default;
  Agent(const Agent&) = delete;
  Agent& operator=(const Agent&) = delete;

  const std::string& id() const { return cfg_.agent_id; }
  AgentRole role() const { return cfg_.role; }
  const AgentConfig& config() const { return cfg_; }

  // Handles every queued message; returns how many were handled.
  std::size_t pump();
  std::size_t queued() const { return inbox_->size(); }
  virtual void tick(double now_s) { (void)now_s; }
  virtual Json status() const;

 protected:
  virtual void on_message(const A2aMessage& m) = 0;
  // Runs once after a pump that handled at least one message.
  virtual void after_pump() {}

  void send(const std::string& to, MessageKind kind, std::string body_text, std::optional<Json> structured,
            std::string correlation_id);
  void log_lifecycle(const std::string& event, Json details) const;
  double now() const { return env_.now(); }
  reasoner::AgentProfile profile() const;

  AgentConfig cfg_;
  AgentEnv env_;
  std::shared_ptr<fabric::Inbox> inbox_;
  std::shared_ptr<reasoner::Reasoner> reasoner_;
};

}  // namespace agentran::agents
