#include "agentran/agents/manager.hpp"

#include <algorithm>
#include <cctype>
#include <fmt/format.h>

#include "agentran/reasoner/intent_parser.hpp"

namespace agentran::agents {

namespace {

bool iequals(const std::string& a, const std::string& b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
         });
}

}  // namespace

const LayerEntry& route_intent(const model::Intent& intent, const std::vector<LayerEntry>& layers) {
  if (layers.empty()) throw RoutingError("domain: no layer manager is registered");
  if (!intent.domain.empty()) {
    for (const auto& l : layers)
      if (iequals(l.domain, intent.domain)) return l;
    throw RoutingError("domain: no layer manager handles domain " + intent.domain);
  }
  for (const auto& l : layers)
    if (iequals(l.domain, "L2")) return l;
  if (layers.size() == 1) return layers.front();
  throw RoutingError(fmt::format("domain: intent has no domain and {} layer managers are registered", layers.size()));
}

Manager::Manager(AgentConfig cfg, AgentEnv env, std::vector<LayerEntry> layers)
    : Agent(std::move(cfg), std::move(env)), layers_(std::move(layers)) {
  if (cfg_.role != AgentRole::kManager)
    throw std::invalid_argument("agent " + cfg_.agent_id + ": Manager needs role manager");
}

void Manager::reject(const A2aMessage& m, const std::string& intent_id, const std::string& field,
                     const std::string& why) {
  log_lifecycle("intent_rejected", {{"intent_id", intent_id}, {"field", field}, {"error", why}});
  send(m.sender, MessageKind::kAck, fmt::format("Intent {} rejected: {}", intent_id.empty() ? "?" : intent_id, why),
       Json{{"intent_id", intent_id}, {"accepted", false}, {"field", field}, {"error", why}},
       m.correlation_id.empty() ? intent_id : m.correlation_id);
}

void Manager::handle_intent(const A2aMessage& m) {
  model::Intent intent;
  try {
    if (m.body_structured && m.body_structured->contains("intent")) {
      intent = m.body_structured->at("intent").get<model::Intent>();
    } else {
      intent.intent_id = m.correlation_id;
      intent.body_text = m.body_text;
      intent.timestamp_s = now();
    }
    intent.issuer = m.sender;
    if (intent.requirements.empty()) {
      intent.requirements = reasoner::parse_intent_text(intent.body_text, env_.slices);
      if (!intent.requirements.empty())
        log_lifecycle("requirements_extracted", {{"intent_id", intent.intent_id}, {"requirements", intent.requirements}});
    }
    if (intent.requirements.empty() && (!reasoner_ || reasoner_->name() == "rule"))
      throw model::IntentError("requirements", "no structured requirements given or recognized in body_text");
    intent.validate();
  } catch (const model::IntentError& e) {
    reject(m, intent.intent_id, e.field(), e.what());
    return;
  } catch (const std::exception& e) {
    reject(m, intent.intent_id, "intent", e.what());
    return;
  }

  const LayerEntry* layer = nullptr;
  try {
    layer = &route_intent(intent, layers_);
  } catch (const RoutingError& e) {
    reject(m, intent.intent_id, "domain", e.what());
    return;
  }
  routed_[intent.intent_id] = m.sender;
  log_lifecycle("intent_routed", {{"intent_id", intent.intent_id}, {"layer", layer->agent_id}});
  send(layer->agent_id, MessageKind::kIntent, intent.body_text, Json{{"intent", intent}}, intent.intent_id);
}

void Manager::on_message(const A2aMessage& m) {
  switch (m.kind) {
    case MessageKind::kIntent:
      handle_intent(m);
      break;
    case MessageKind::kAck: {
      const auto it = routed_.find(m.correlation_id);
      if (it != routed_.end())
        send(it->second, MessageKind::kAck, m.body_text, m.body_structured, m.correlation_id);
      break;
    }
    case MessageKind::kConstraintReport: {
      ++escalations_;
      log_lifecycle("escalation_received", {{"from", m.sender}, {"intent_id", m.correlation_id}});
      const auto it = routed_.find(m.correlation_id);
      if (it != routed_.end())
        send(it->second, MessageKind::kConstraintReport, m.body_text, m.body_structured, m.correlation_id);
      break;
    }
    default:
      log_lifecycle("message_ignored", {{"kind", fabric::to_string(m.kind)}, {"sender", m.sender}});
  }
}

Json Manager::status() const {
  Json j = Agent::status();
  Json layers = Json::array();
  for (const auto& l : layers_) layers.push_back({{"agent_id", l.agent_id}, {"domain", l.domain}});
  j["layers"] = layers;
  j["intents_routed"] = routed_.size();
  j["escalations"] = escalations_;
  return j;
}

}  // namespace agentran::agents
