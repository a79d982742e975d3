#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "agentran/agents/agent.hpp"
#include "agentran/model/intent.hpp"

namespace agentran::agents {

struct LayerEntry {
  std::string agent_id;
  std::string domain;
};

class RoutingError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A domain tag selects the layer with that domain (case-insensitive) and fails
// when none matches. Without a tag the "L2" layer is used, or the only layer.
const LayerEntry& route_intent(const model::Intent& intent, const std::vector<LayerEntry>& layers);

// Top of the hierarchy: validates operator intents, fills structured
// requirements from the text when none are given, routes them to a layer
// manager and relays acknowledgements and escalations back to the issuer.
class Manager final : public Agent {
 public:
  Manager(AgentConfig cfg, AgentEnv env, std::vector<LayerEntry> layers);

  const std::vector<LayerEntry>& layers() const { return layers_; }
  int escalations() const { return escalations_; }
  std::size_t routed() const { return routed_.size(); }
  Json status() const override;

 private:
  void on_message(const A2aMessage& m) override;
  void handle_intent(const A2aMessage& m);
  void reject(const A2aMessage& m, const std::string& intent_id, const std::string& field, const std::string& why);

  std::vector<LayerEntry> layers_;
  std::map<std::string, std::string> routed_;  // intent_id -> issuer
  int escalations_ = 0;
};

}  // namespace agentran::agents
