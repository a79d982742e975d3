#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "agentran/agents/agent.hpp"
#include "agentran/model/kpi_window.hpp"
#include "agentran/model/records.hpp"

namespace agentran::agents {

// Power control or uplink resource allocation. Each cycle pulls KPIs from its
// dApp, asks the reasoner for actions, clamps them with the guardrails, calls
// the control tool and logs a DecisionRecord. A reasoner failure leaves the
// previous configuration in place.
class ControlAgent final : public Agent {
 public:
  ControlAgent(AgentConfig cfg, AgentEnv env);

  void tick(double now_s) override;
  // Runs one cycle now. Returns the record if any action was applied.
  std::optional<model::DecisionRecord> control_cycle();

  const model::KpiWindow& window() const { return window_; }
  const std::optional<model::SubIntent>& active() const { return active_; }
  const std::vector<model::DecisionRecord>& history() const { return history_; }
  std::uint64_t cycles() const { return cycle_index_; }
  int unmet_streak() const { return unmet_streak_; }
  std::vector<std::string> discovered_tools() const;
  Json status() const override;

 private:
  void on_message(const A2aMessage& m) override;
  bool discover_tools();
  Json call(const std::string& tool, const Json& args);
  void report(MessageKind kind, const std::string& correlation_id);
  bool requirements_unmet() const;

  model::KpiWindow window_;
  std::optional<model::SubIntent> active_;
  std::vector<model::DecisionRecord> history_;  // most recent kPromptHistoryDepth
  std::map<std::string, std::shared_ptr<fabric::ToolClient>> tools_;  // tool name -> client
  std::uint64_t cycle_index_ = 0;
  double next_cycle_s_ = 0.0;
  int unmet_streak_ = 0;
};

// Downlink allocation placeholder: acknowledges sub-intents with a context
// report carrying a fixed utilization.
class DlRaStub final : public Agent {
 public:
  DlRaStub(AgentConfig cfg, AgentEnv env);
  const std::optional<model::SubIntent>& active() const { return active_; }

 private:
  void on_message(const A2aMessage& m) override;
  std::optional<model::SubIntent> active_;
};

}  // namespace agentran::agents
