#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "agentran/agents/agent.hpp"
#include "agentran/reasoner/llm.hpp"
#include "agentran/reasoner/rule_engine.hpp"

namespace agentran::agents {

class DeploymentError : public std::invalid_argument {
 public:
  DeploymentError(const std::string& field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(field) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

struct DeploymentDescriptor {
  std::vector<AgentConfig> agents;
  reasoner::RuleEngineConfig rule_engine;
  std::optional<reasoner::EndpointConfig> llm;

  // Unique ids, exactly one manager at the root, parents exist, control
  // agents sit below a layer manager and name at least one tool server.
  void validate() const;
  const AgentConfig* find(const std::string& agent_id) const;
  friend bool operator==(const DeploymentDescriptor&, const DeploymentDescriptor&) = default;
};

void to_json(Json& j, const DeploymentDescriptor& d);
void from_json(const Json& j, DeploymentDescriptor& d);

// manager -> l2 -> {pc, ul-ra, dl-ra}, rule reasoner, in-process dApps
// "inproc://pc-dapp" and "inproc://ra-dapp".
DeploymentDescriptor default_deployment();
DeploymentDescriptor load_deployment(const std::filesystem::path& path);
// Overrides the reasoner backend of every agent that has one.
void set_reasoner_backend(DeploymentDescriptor& d, const std::string& backend);

// "rule" -> RuleEngine with the agent's guardrails; "llm" -> LlmReasoner.
ReasonerFactory make_reasoner_factory(const DeploymentDescriptor& d);

// Resolves "inproc://name" against the given servers and "tcp://host:port"
// to a TcpTransport.
Connector make_connector(std::map<std::string, std::shared_ptr<fabric::ToolServer>> inproc);

// Owns the agents of one deployment. Pumping and ticking go top-down:
// manager, layer managers, then control agents in descriptor order.
class AgentHierarchy {
 public:
  // env.reasoner defaults to make_reasoner_factory(d) when empty.
  AgentHierarchy(const DeploymentDescriptor& d, AgentEnv env);

  // Pumps all inboxes until none has work; returns messages handled.
  std::size_t pump_until_idle(std::size_t max_rounds = 256);
  void tick(double now_s);

  Agent* find(const std::string& agent_id) const;
  template <class T>
  T* get(const std::string& agent_id) const {
    return dynamic_cast<T*>(find(agent_id));
  }
  const std::vector<std::unique_ptr<Agent>>& agents() const { return agents_; }
  const std::string& manager_id() const { return manager_id_; }
  Json status() const;

 private:
  std::vector<std::unique_ptr<Agent>> agents_;
  std::string manager_id_;
};

}  // namespace agentran::agents
