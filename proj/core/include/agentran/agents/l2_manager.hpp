#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "agentran/agents/agent.hpp"
#include "agentran/model/intent.hpp"
#include "agentran/model/kpi_window.hpp"
#include "agentran/model/records.hpp"

namespace agentran::agents {

// Layer manager: decomposes intents into per-child sub-intents, keeps the
// latest context report of every child and renegotiates when reports carry
// constraints. Reports handled in one pump are batched into a single
// renegotiation; after max_renegotiations consecutive infeasible batches the
// layer escalates to its parent instead.
class L2Manager final : public Agent {
 public:
  L2Manager(AgentConfig cfg, AgentEnv env, std::vector<reasoner::ChildInfo> children);

  void tick(double now_s) override;

  const std::optional<model::Intent>& active_intent() const { return intent_; }
  // child agent_id -> active sub-intent
  const std::map<std::string, model::SubIntent>& sub_intents() const { return subs_; }
  // child agent_id -> latest report under the active intent
  const std::map<std::string, model::ContextReport>& context() const { return context_; }
  const std::vector<reasoner::ChildInfo>& children() const { return children_; }
  int infeasible_count() const { return infeasible_; }
  int renegotiations() const { return renegotiations_; }
  int escalations() const { return escalations_; }
  Json status() const override;

 private:
  void on_message(const A2aMessage& m) override;
  void after_pump() override;

  void accept_intent(const model::Intent& intent, const A2aMessage& m);
  void handle_report(const A2aMessage& m);
  // Decomposes the active intent; throws on reasoner or validation failure.
  std::vector<model::SubIntent> decompose(const model::Intent& intent, bool refinement);
  void dispatch(const model::SubIntent& sub, bool refinement, bool status_check);
  void renegotiate();
  void escalate();
  std::string task_text(const model::Intent& intent, bool refinement) const;

  std::vector<reasoner::ChildInfo> children_;
  std::optional<model::Intent> intent_;
  std::map<std::string, model::SubIntent> subs_;
  std::map<std::string, model::ContextReport> context_;
  model::KpiWindow no_window_;
  int infeasible_ = 0;
  int renegotiations_ = 0;
  int escalations_ = 0;
  bool batch_constraints_ = false;
  bool batch_clean_ = false;
  double last_contact_s_ = 0.0;
};

}  // namespace agentran::agents
