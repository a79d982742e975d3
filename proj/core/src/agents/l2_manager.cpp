#include "agentran/agents/l2_manager.hpp"

#include <algorithm>
#include <fmt/format.h>
#include <set>

#include "agentran/reasoner/prompt.hpp"

namespace agentran::agents {

namespace {

std::string join(const std::vector<std::string>& v, const char* sep) {
  std::string out;
  for (const auto& s : v) {
    if (!out.empty()) out += sep;
    out += s;
  }
  return out;
}

}  // namespace

L2Manager::L2Manager(AgentConfig cfg, AgentEnv env, std::vector<reasoner::ChildInfo> children)
    : Agent(std::move(cfg), std::move(env)), children_(std::move(children)) {
  if (cfg_.role != AgentRole::kLayerManager)
    throw std::invalid_argument("agent " + cfg_.agent_id + ": L2Manager needs role l2_manager");
  if (!reasoner_) throw std::invalid_argument("agent " + cfg_.agent_id + " has no reasoner");
  if (cfg_.max_renegotiations < 1) throw std::invalid_argument("max_renegotiations must be at least 1");
  last_contact_s_ = now();
}

std::string L2Manager::task_text(const model::Intent& intent, bool refinement) const {
  std::vector<std::string> kids;
  for (const auto& c : children_) kids.push_back(fmt::format("{} ({})", c.agent_id, model::to_string(c.role)));
  std::string t = fmt::format("Decompose the operator intent into one sub-intent per child agent that needs one. "
                              "Children: {}.\nOperator intent: {}\nStructured requirements: {}",
                              join(kids, ", "), intent.body_text, Json(intent.requirements).dump());
  if (refinement) {
    t += "\nThe children reported the following. Refine the sub-intents to address the constraints.";
    for (const auto& [who, rep] : context_) t += fmt::format("\n- {}: {}", who, rep.summary_text);
  }
  return t;
}

std::vector<model::SubIntent> L2Manager::decompose(const model::Intent& intent, bool refinement) {
  reasoner::ReasonerRequest req;
  req.expected = reasoner::OutputKind::kSubIntents;
  req.role = cfg_.role;
  req.requirements = intent.requirements;
  req.slices = env_.slices;
  req.intent = intent;
  req.children = children_;
  if (refinement)
    for (const auto& [_, rep] : context_) req.context.push_back(rep);
  for (const auto& [_, s] : subs_) req.previous.push_back(s);

  const auto prompt = reasoner::assemble_prompt(profile(), task_text(intent, refinement), no_window_, {});
  const auto out = reasoner_->decide(prompt, req);
  const auto proposed = reasoner::sub_intents_of(out);

  std::set<std::string> seen;
  std::vector<model::SubIntent> subs;
  for (const auto& p : proposed) {
    const bool known = std::any_of(children_.begin(), children_.end(),
                                   [&](const auto& c) { return c.agent_id == p.target_agent; });
    if (!known) throw reasoner::ValidationError("sub_intents.target_agent", "unknown child " + p.target_agent);
    if (!seen.insert(p.target_agent).second)
      throw reasoner::ValidationError("sub_intents.target_agent", "two sub-intents for " + p.target_agent);
    for (const auto& r : p.requirements) r.validate("sub_intents.requirements");
    model::SubIntent s;
    s.sub_intent_id = fmt::format("{}:{}", intent.intent_id, p.target_agent);
    s.parent_intent_id = intent.intent_id;
    s.issuer = id();
    s.target_agent = p.target_agent;
    s.body_text = p.body_text;
    s.requirements = p.requirements;
    s.revision = 1;
    s.timestamp_s = now();
    subs.push_back(std::move(s));
  }
  if (subs.empty()) throw reasoner::ValidationError("sub_intents", "decomposition produced no sub-intents");
  if (!refinement) {
    std::vector<const model::SubIntent*> ptrs;
    for (const auto& s : subs) ptrs.push_back(&s);
    if (!model::covers(intent.requirements, ptrs))
      throw reasoner::ValidationError("sub_intents.requirements", "sub-intents do not cover the intent");
  }
  log_lifecycle(refinement ? "renegotiation" : "decomposition",
                {{"intent_id", intent.intent_id},
                 {"rationale_text", out.rationale_text},
                 {"backend", out.backend},
                 {"sub_intents", subs}});
  return subs;
}

void L2Manager::dispatch(const model::SubIntent& sub, bool refinement, bool status_check) {
  send(sub.target_agent, MessageKind::kSubIntent, sub.body_text,
       Json{{"sub_intent", sub}, {"refinement", refinement}, {"status_check", status_check}}, sub.parent_intent_id);
}

void L2Manager::accept_intent(const model::Intent& intent, const A2aMessage& m) {
  const auto saved_context = context_;
  context_.clear();
  std::vector<model::SubIntent> subs;
  try {
    subs = decompose(intent, false);
  } catch (const std::exception& e) {
    context_ = saved_context;
    log_lifecycle("intent_rejected", {{"intent_id", intent.intent_id}, {"error", e.what()}});
    send(m.sender, MessageKind::kAck, fmt::format("Intent {} could not be decomposed: {}", intent.intent_id, e.what()),
         Json{{"intent_id", intent.intent_id}, {"accepted", false}, {"error", e.what()}}, intent.intent_id);
    return;
  }
  intent_ = intent;
  subs_.clear();
  infeasible_ = 0;
  batch_constraints_ = batch_clean_ = false;
  for (const auto& s : subs) subs_[s.target_agent] = s;
  for (const auto& s : subs) dispatch(s, false, false);
  last_contact_s_ = now();
  send(m.sender, MessageKind::kAck,
       fmt::format("Intent {} accepted and decomposed into {} sub-intents.", intent.intent_id, subs.size()),
       Json{{"intent_id", intent.intent_id}, {"accepted", true}, {"sub_intent_count", subs.size()}},
       intent.intent_id);
}

void L2Manager::handle_report(const A2aMessage& m) {
  if (!m.body_structured) return;
  model::ContextReport rep;
  try {
    rep = m.body_structured->get<model::ContextReport>();
  } catch (const std::exception& e) {
    log_lifecycle("report_rejected", {{"sender", m.sender}, {"error", e.what()}});
    return;
  }
  const auto it = subs_.find(m.sender);
  if (it == subs_.end() || it->second.sub_intent_id != rep.sub_intent_id) {
    log_lifecycle("stale_report", {{"sender", m.sender}, {"sub_intent_id", rep.sub_intent_id}});
    return;
  }
  const bool constrained = !rep.constraints.empty() || !rep.notes.empty();
  context_[m.sender] = std::move(rep);
  if (constrained) batch_constraints_ = true;
  else batch_clean_ = true;
}

void L2Manager::on_message(const A2aMessage& m) {
  switch (m.kind) {
    case MessageKind::kIntent: {
      model::Intent intent;
      try {
        if (!m.body_structured || !m.body_structured->contains("intent"))
          throw model::IntentError("intent", "structured intent missing");
        intent = m.body_structured->at("intent").get<model::Intent>();
        intent.validate();
      } catch (const std::exception& e) {
        send(m.sender, MessageKind::kAck, fmt::format("Intent rejected: {}", e.what()),
             Json{{"accepted", false}, {"error", e.what()}}, m.correlation_id);
        return;
      }
      accept_intent(intent, m);
      break;
    }
    case MessageKind::kContextReport:
    case MessageKind::kConstraintReport:
      handle_report(m);
      break;
    default:
      log_lifecycle("message_ignored", {{"kind", fabric::to_string(m.kind)}, {"sender", m.sender}});
  }
}

void L2Manager::after_pump() {
  const bool constrained = batch_constraints_;
  const bool clean = batch_clean_;
  batch_constraints_ = batch_clean_ = false;
  if (!intent_) return;
  if (!constrained) {
    if (clean) infeasible_ = 0;
    return;
  }
  if (++infeasible_ >= cfg_.max_renegotiations) {
    escalate();
    infeasible_ = 0;
  } else {
    renegotiate();
  }
}

void L2Manager::renegotiate() {
  ++renegotiations_;
  std::vector<model::SubIntent> fresh;
  try {
    fresh = decompose(*intent_, true);
  } catch (const std::exception& e) {
    log_lifecycle("renegotiation_failed", {{"intent_id", intent_->intent_id}, {"error", e.what()}});
    return;
  }
  std::vector<std::string> changed;
  for (auto& s : fresh) {
    auto it = subs_.find(s.target_agent);
    if (it != subs_.end()) {
      if (it->second.requirements == s.requirements && it->second.body_text == s.body_text) continue;
      s.revision = it->second.revision + 1;
    }
    changed.push_back(s.target_agent);
    subs_[s.target_agent] = s;
    dispatch(s, true, false);
  }
  last_contact_s_ = now();
  if (changed.empty())
    log_lifecycle("renegotiation_unchanged", {{"intent_id", intent_->intent_id}, {"infeasible_count", infeasible_}});
}

void L2Manager::escalate() {
  ++escalations_;
  std::vector<std::string> constraints;
  Json reports = Json::array();
  for (const auto& [who, rep] : context_) {
    for (const auto& c : rep.constraints) constraints.push_back(fmt::format("{}: {}", who, c));
    reports.push_back(rep);
  }
  const std::string text =
      fmt::format("Intent {} is still infeasible after {} consecutive constraint reports. {}", intent_->intent_id,
                  cfg_.max_renegotiations, constraints.empty() ? std::string("No details.") : join(constraints, " "));
  log_lifecycle("escalation", {{"intent_id", intent_->intent_id}, {"constraints", constraints}});
  if (!cfg_.parent_id.empty())
    send(cfg_.parent_id, MessageKind::kConstraintReport, text,
         Json{{"intent_id", intent_->intent_id}, {"infeasible_count", cfg_.max_renegotiations}, {"reports", reports}},
         intent_->intent_id);
}

void L2Manager::tick(double now_s) {
  if (!intent_ || subs_.empty()) return;
  if (now_s - last_contact_s_ + 1e-9 < cfg_.heartbeat_s) return;
  for (const auto& [_, s] : subs_) dispatch(s, false, true);
  last_contact_s_ = now_s;
}

Json L2Manager::status() const {
  Json j = Agent::status();
  j["active_intent"] = intent_ ? Json(*intent_) : Json();
  Json subs = Json::array();
  for (const auto& [_, s] : subs_) subs.push_back(s);
  j["sub_intents"] = subs;
  j["infeasible_count"] = infeasible_;
  j["renegotiations"] = renegotiations_;
  j["escalations"] = escalations_;
  return j;
}

}  // namespace agentran::agents
