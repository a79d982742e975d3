#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>

#include "agentran/agents/control_agent.hpp"
#include "agentran/agents/dapp.hpp"
#include "agentran/agents/deployment.hpp"
#include "agentran/agents/l2_manager.hpp"
#include "agentran/agents/manager.hpp"
#include "agentran/reasoner/output.hpp"

using namespace agentran;
using namespace agentran::agents;
using fabric::A2aMessage;
using fabric::MessageKind;
using model::Intent;
using model::SliceRequirement;

namespace {

struct Rec {
  datalake::RecordKind kind;
  double t;
  Json payload;
  std::string agent;
};

sim::CellState three_ue_cell() {
  auto ue = [](int id, int slice, double pg) {
    sim::UeSpec u;
    u.initial.ue_id = id;
    u.initial.slice_id = slice;
    u.initial.snr_target_db = 15.0;
    u.initial.path_gain_db = pg;
    u.initial.tx_power_dbm = 15.0 - pg;
    u.offered_load_bps = 1e8;
    return u;
  };
  return sim::CellState::make({ue(1, 1, -3.0), ue(2, 1, -5.0), ue(3, 2, -2.0)},
                              {sim::SliceConfig{1, "FWA", sim::kMaxThrottleBps, 1.0},
                               sim::SliceConfig{2, "MTC", sim::kMaxThrottleBps, 1.0}});
}

// Returns scripted actions for control agents and defers everything else.
class ScriptedReasoner final : public reasoner::Reasoner {
 public:
  using Script = std::function<std::vector<model::ControlAction>()>;
  explicit ScriptedReasoner(Script s) : script_(std::move(s)) {}
  std::string name() const override { return "scripted"; }
  reasoner::ReasonerOutput decide(const reasoner::PromptContext&, const reasoner::ReasonerRequest&) override {
    if (!script_) throw reasoner::ReasonerError("backend unavailable");
    return reasoner::ReasonerOutput{reasoner::OutputKind::kActions, reasoner::actions_payload(script_()), "scripted",
                                    0, "scripted"};
  }

 private:
  Script script_;
};

ReasonerFactory control_override(const DeploymentDescriptor& d, ScriptedReasoner::Script script) {
  auto base = make_reasoner_factory(d);
  return [base, script](const AgentConfig& c) -> std::shared_ptr<reasoner::Reasoner> {
    if (model::is_control_role(c.role)) return std::make_shared<ScriptedReasoner>(script);
    return base(c);
  };
}

// Mirrors the gateway step: simulate one KPI period, deliver, cycle, deliver.
struct Harness {
  double t = 0.0;
  fabric::MessageBus bus{[this] { return t; }};
  std::vector<A2aMessage> wire;
  std::vector<Rec> records;
  std::mutex sim_mu;
  sim::Simulator sim{sim::SimParams{sim::CellConfig{}, sim::ChannelConfig{0.0, 0.0}, sim::PowerModel{}},
                     three_ue_cell(), 7};
  std::shared_ptr<fabric::Inbox> op = bus.subscribe("operator");
  std::unique_ptr<AgentHierarchy> h;

  explicit Harness(DeploymentDescriptor d = default_deployment(), ReasonerFactory f = {}) {
    bus.add_mirror([this](const A2aMessage& m) { wire.push_back(m); });
    const SimAccess access{&sim, &sim_mu};
    std::map<std::string, std::shared_ptr<fabric::ToolServer>> dapps{
        {"pc-dapp", make_dapp("pc-dapp", DappKind::kPowerControl, access)},
        {"ra-dapp", make_dapp("ra-dapp", DappKind::kResourceAllocation, access)}};
    AgentEnv env;
    env.bus = &bus;
    env.now = [this] { return t; };
    env.record = [this](datalake::RecordKind k, double ts, Json p, const std::string& a) {
      records.push_back({k, ts, std::move(p), a});
    };
    env.reasoner = std::move(f);
    env.connect = make_connector(dapps);
    env.slices = {reasoner::SliceInfo{1, "FWA", "Fixed wireless access.", {1, 2}},
                  reasoner::SliceInfo{2, "MTC", "CCTV cameras.", {3}}};
    h = std::make_unique<AgentHierarchy>(d, env);
  }

  void step(int n = 1) {
    for (int i = 0; i < n; ++i) {
      {
        std::lock_guard lock(sim_mu);
        sim.run_slots(1000);
      }
      t += 1.0;
      h->pump_until_idle();
      h->tick(t);
      h->pump_until_idle();
    }
  }

  void submit(const Intent& i) {
    A2aMessage m;
    m.sender = "operator";
    m.recipient = "manager";
    m.kind = MessageKind::kIntent;
    m.body_text = i.body_text.empty() ? "intent" : i.body_text;
    if (!i.requirements.empty() || !i.domain.empty()) m.body_structured = Json{{"intent", i}};
    m.correlation_id = i.intent_id;
    bus.send(std::move(m));
    h->pump_until_idle();
  }

  std::vector<Rec> lifecycle(const std::string& event, const std::string& agent = "") const {
    std::vector<Rec> out;
    for (const auto& r : records)
      if (r.kind == datalake::RecordKind::kLifecycle && r.payload["event"] == event &&
          (agent.empty() || r.agent == agent))
        out.push_back(r);
    return out;
  }

  std::vector<A2aMessage> sent(const std::string& from, const std::string& to, MessageKind kind) const {
    std::vector<A2aMessage> out;
    for (const auto& m : wire)
      if (m.sender == from && m.recipient == to && m.kind == kind) out.push_back(m);
    return out;
  }

  double per_ue(int slice_id) {
    std::lock_guard lock(sim_mu);
    const auto snap = sim.collect_kpis(1.0);
    for (const auto& s : snap.per_slice)
      if (s.slice_id == slice_id) return s.per_ue_throughput_bps();
    return 0.0;
  }

  template <class T>
  T* get(const std::string& id) const {
    return h->get<T>(id);
  }
};

Intent text_intent(const std::string& id, const std::string& text) {
  Intent i;
  i.intent_id = id;
  i.body_text = text;
  return i;
}

Intent mtc_intent(const std::string& id, std::optional<double> min_bps, std::optional<double> delay_s) {
  Intent i;
  i.intent_id = id;
  i.body_text = "MTC requirement";
  SliceRequirement r;
  r.slice_id = 2;
  r.min_throughput_bps = min_bps;
  r.max_delay_s = delay_s;
  i.requirements = {r};
  return i;
}

const char* kOriginal =
    "Maximize the overall throughput of the system and do not throttle any user or try to save battery.";
const char* kEmergency = "There was a life-emergency: all MTC sensors are high priority and need 30 Mbit/s minimum.";

}  // namespace

TEST(Hierarchy, BuildsTopDownAndDiscoversTools) {
  Harness hz;
  std::vector<std::string> ids;
  for (const auto& a : hz.h->agents()) ids.push_back(a->id());
  EXPECT_EQ(ids, (std::vector<std::string>{"manager", "l2", "pc", "ul-ra", "dl-ra"}));
  hz.step();
  EXPECT_EQ(hz.get<ControlAgent>("pc")->discovered_tools(), (std::vector<std::string>{"get_kpis", "set_snr_target"}));
  EXPECT_EQ(hz.get<ControlAgent>("ul-ra")->discovered_tools(),
            (std::vector<std::string>{"get_kpis", "set_throttle_limit"}));
  EXPECT_EQ(hz.lifecycle("tools_discovered").size(), 2u);
  // Windows fill even without a sub-intent; no decisions yet.
  EXPECT_EQ(hz.get<ControlAgent>("pc")->window().size(), 1u);
  EXPECT_EQ(hz.get<ControlAgent>("pc")->cycles(), 0u);
}

TEST(Hierarchy, EmergencyDialogueReachesMinimum) {
  Harness hz;
  hz.step(3);
  hz.submit(text_intent("emergency", kEmergency));

  ASSERT_EQ(hz.lifecycle("requirements_extracted", "manager").size(), 1u);
  const auto to_l2 = hz.sent("manager", "l2", MessageKind::kIntent);
  ASSERT_EQ(to_l2.size(), 1u);
  const auto to_pc = hz.sent("l2", "pc", MessageKind::kSubIntent);
  const auto to_ul = hz.sent("l2", "ul-ra", MessageKind::kSubIntent);
  ASSERT_GE(to_pc.size(), 1u);
  ASSERT_GE(to_ul.size(), 1u);
  EXPECT_TRUE(hz.sent("l2", "dl-ra", MessageKind::kSubIntent).empty());
  EXPECT_LT(to_l2[0].bus_seq, to_pc[0].bus_seq);

  // Children answer the first dispatch with context reports; the MTC gap
  // triggers an immediate refinement of the uplink sub-intent.
  const auto reports = hz.sent("ul-ra", "l2", MessageKind::kContextReport);
  ASSERT_EQ(reports.size(), 1u);
  EXPECT_FALSE((*reports[0].body_structured)["constraints"].empty());
  ASSERT_GE(to_ul.size(), 2u);
  EXPECT_TRUE((*to_ul[1].body_structured)["refinement"].get<bool>());
  EXPECT_EQ((*to_ul[1].body_structured)["sub_intent"]["revision"], 2);
  EXPECT_EQ(hz.get<L2Manager>("l2")->renegotiations(), 1);

  const auto acks = hz.op->drain();
  ASSERT_EQ(acks.size(), 1u);
  EXPECT_EQ(acks[0].kind, MessageKind::kAck);
  EXPECT_EQ(acks[0].sender, "manager");
  EXPECT_TRUE((*acks[0].body_structured)["accepted"].get<bool>());
  EXPECT_EQ(acks[0].correlation_id, "emergency");

  const double before = hz.per_ue(2);
  EXPECT_LT(before, 30e6);
  int reached = -1;
  for (int cycle = 1; cycle <= 10 && reached < 0; ++cycle) {
    hz.step();
    if (hz.per_ue(2) >= 30e6) reached = cycle;
  }
  EXPECT_GT(reached, 0) << "MTC per-UE throughput " << hz.per_ue(2);
  const auto* fwa = hz.get<ControlAgent>("ul-ra")->window().latest().slice(1);
  ASSERT_NE(fwa, nullptr);
  EXPECT_LT(fwa->throttle_limit_bps, sim::kMaxThrottleBps);
  // Every applied decision is logged.
  std::size_t decisions = 0;
  for (const auto& r : hz.records) decisions += r.kind == datalake::RecordKind::kDecision;
  EXPECT_EQ(decisions, hz.get<ControlAgent>("pc")->history().size() + hz.get<ControlAgent>("ul-ra")->history().size());
  EXPECT_GT(decisions, 0u);
}

TEST(Hierarchy, ContentionShiftsDelayBudgetToUplink) {
  Harness hz;
  hz.step(3);
  hz.submit(mtc_intent("delay", std::nullopt, 0.010));
  const auto* l2 = hz.get<L2Manager>("l2");
  const auto& subs = l2->sub_intents();
  ASSERT_TRUE(subs.count("ul-ra"));
  ASSERT_TRUE(subs.count("dl-ra"));
  const auto* ul = subs.at("ul-ra").requirement(2);
  const auto* dl = subs.at("dl-ra").requirement(2);
  ASSERT_TRUE(ul && dl && ul->max_delay_s && dl->max_delay_s);
  // The full-buffer cell is saturated, so the first reports flag contention.
  EXPECT_NEAR(*ul->max_delay_s, 0.008, 1e-12);
  EXPECT_NEAR(*dl->max_delay_s, 0.002, 1e-12);
  EXPECT_EQ(subs.at("ul-ra").revision, 2);
  EXPECT_EQ(subs.at("dl-ra").revision, 2);
  const auto first = hz.sent("l2", "ul-ra", MessageKind::kSubIntent).front();
  EXPECT_NEAR((*first.body_structured)["sub_intent"]["requirements"][0]["max_delay_s"].get<double>(), 0.005, 1e-12);
}

TEST(Hierarchy, EscalatesAfterThreeConstrainedBatches) {
  Harness hz;
  hz.step(3);
  hz.submit(mtc_intent("infeasible", 200e6, std::nullopt));
  hz.op->drain();
  auto* l2 = hz.get<L2Manager>("l2");
  EXPECT_EQ(l2->infeasible_count(), 1);
  int renegotiations_at_escalation = -1;
  for (int i = 0; i < 20 && l2->escalations() == 0; ++i) {
    hz.step();
    if (l2->escalations() == 1) renegotiations_at_escalation = l2->renegotiations();
  }
  ASSERT_EQ(l2->escalations(), 1);
  EXPECT_EQ(renegotiations_at_escalation, 2);
  EXPECT_EQ(l2->infeasible_count(), 0);
  EXPECT_EQ(hz.get<Manager>("manager")->escalations(), 1);
  const auto up = hz.sent("l2", "manager", MessageKind::kConstraintReport);
  ASSERT_EQ(up.size(), 1u);
  EXPECT_EQ((*up[0].body_structured)["infeasible_count"], 3);
  const auto relayed = hz.op->drain();
  ASSERT_EQ(relayed.size(), 1u);
  EXPECT_EQ(relayed[0].kind, MessageKind::kConstraintReport);
  EXPECT_EQ(relayed[0].correlation_id, "infeasible");
  EXPECT_EQ(hz.lifecycle("escalation_received", "manager").size(), 1u);
}

TEST(Hierarchy, UnmetMinimumReportsAfterFiveCycles) {
  Harness hz;
  hz.step(3);
  hz.submit(mtc_intent("unmet", 200e6, std::nullopt));
  const double submitted = hz.t;
  auto* pc = hz.get<ControlAgent>("pc");
  int cycles = 0;
  while (hz.sent("pc", "l2", MessageKind::kConstraintReport).empty() && cycles < 10) {
    hz.step();
    ++cycles;
    if (cycles < 5) {
      EXPECT_EQ(pc->unmet_streak(), cycles);
    }
  }
  EXPECT_EQ(cycles, 5);
  const auto rep = hz.sent("pc", "l2", MessageKind::kConstraintReport).front();
  EXPECT_DOUBLE_EQ(rep.timestamp_s, submitted + 5.0);
  EXPECT_EQ(pc->unmet_streak(), 0);
}

TEST(Hierarchy, HeartbeatResendsSubIntentsAfterSilence) {
  Harness hz;
  hz.step(3);
  hz.submit(text_intent("original", kOriginal));
  EXPECT_EQ(hz.get<L2Manager>("l2")->renegotiations(), 0);
  hz.step(21);
  std::vector<double> checks;
  for (const auto& m : hz.sent("l2", "pc", MessageKind::kSubIntent))
    if ((*m.body_structured)["status_check"].get<bool>()) checks.push_back(m.timestamp_s);
  EXPECT_EQ(checks, (std::vector<double>{13.0, 23.0}));
  // A status check is answered with a context report but is not a new revision.
  EXPECT_EQ(hz.sent("pc", "l2", MessageKind::kContextReport).size(), 3u);
  EXPECT_EQ(hz.lifecycle("sub_intent_accepted", "pc").size(), 1u);
}

TEST(Hierarchy, ReasonerFailureHoldsConfiguration) {
  const auto d = default_deployment();
  Harness hz(d, control_override(d, {}));
  hz.step(3);
  hz.submit(text_intent("emergency", kEmergency));
  hz.step(6);
  const auto failures = hz.lifecycle("reasoner_failure", "pc");
  ASSERT_EQ(failures.size(), 6u);
  EXPECT_EQ(failures[0].payload["details"]["policy"], "hold previous configuration");
  EXPECT_FALSE(hz.lifecycle("reasoner_failure", "ul-ra").empty());
  for (const auto& u : hz.sim.state().ues) EXPECT_DOUBLE_EQ(u.snr_target_db, 15.0);
  for (const auto& s : hz.sim.state().slices) EXPECT_DOUBLE_EQ(s.throttle_limit_bps, sim::kMaxThrottleBps);
  for (const auto& r : hz.records) EXPECT_NE(r.kind, datalake::RecordKind::kDecision);
  // The agent keeps monitoring, so the unmet minimum still gets reported.
  EXPECT_FALSE(hz.sent("pc", "l2", MessageKind::kConstraintReport).empty());
}

TEST(Hierarchy, GuardrailsClampScriptedActions) {
  const auto d = default_deployment();
  Harness hz(d, control_override(d, [] {
               return std::vector<model::ControlAction>{{model::ActionType::kSetSnrTarget, 3, 0.0},
                                                        {model::ActionType::kSetThrottleLimit, 1, 1e3}};
             }));
  hz.step(2);
  hz.submit(text_intent("emergency", kEmergency));
  hz.step();
  const auto& pc_hist = hz.get<ControlAgent>("pc")->history();
  ASSERT_EQ(pc_hist.size(), 1u);
  ASSERT_EQ(pc_hist[0].clamped_actions.size(), 1u);
  const auto& c = pc_hist[0].clamped_actions[0];
  EXPECT_TRUE(c.clamped);
  EXPECT_DOUBLE_EQ(c.applied.value, 12.0);
  EXPECT_DOUBLE_EQ(c.previous, 15.0);
  EXPECT_DOUBLE_EQ(hz.sim.state().ues[2].snr_target_db, 12.0);
  // The throttle action is not a power-control tool.
  const auto rejected = hz.lifecycle("action_rejected", "pc");
  ASSERT_EQ(rejected.size(), 1u);
  EXPECT_EQ(rejected[0].payload["details"]["reason"], "tool not available to this role");
  // The uplink agent clamps to the lowest throttle and rejects the SNR action.
  const auto& ul_hist = hz.get<ControlAgent>("ul-ra")->history();
  ASSERT_EQ(ul_hist.size(), 1u);
  EXPECT_DOUBLE_EQ(ul_hist[0].clamped_actions.at(0).applied.value, 3e6);
  EXPECT_EQ(hz.lifecycle("action_rejected", "ul-ra").size(), 1u);
  // The next cycle fills in the KPIs that followed the decision.
  EXPECT_FALSE(pc_hist[0].resulting_kpis.has_value());
  hz.step();
  EXPECT_TRUE(hz.get<ControlAgent>("pc")->history()[0].resulting_kpis.has_value());
}

TEST(Hierarchy, DecisionsOnlyLoggedWhenApplied) {
  const auto d = default_deployment();
  Harness hz(d, control_override(d, [] { return std::vector<model::ControlAction>{}; }));
  hz.step(2);
  hz.submit(text_intent("emergency", kEmergency));
  hz.step(4);
  EXPECT_EQ(hz.get<ControlAgent>("pc")->cycles(), 4u);
  for (const auto& r : hz.records) EXPECT_NE(r.kind, datalake::RecordKind::kDecision);
}

TEST(Hierarchy, StaleReportsAreIgnored) {
  Harness hz;
  hz.step(2);
  hz.submit(text_intent("original", kOriginal));
  hz.submit(text_intent("emergency", kEmergency));
  A2aMessage m;
  m.sender = "pc";
  m.recipient = "l2";
  m.kind = MessageKind::kContextReport;
  m.body_text = "old report";
  model::ContextReport rep;
  rep.reporter = "pc";
  rep.sub_intent_id = "original:pc";
  rep.constraints = {"something"};
  m.body_structured = Json(rep);
  const int before = hz.get<L2Manager>("l2")->renegotiations();
  hz.bus.send(m);
  hz.h->pump_until_idle();
  EXPECT_EQ(hz.lifecycle("stale_report", "l2").size(), 1u);
  EXPECT_EQ(hz.get<L2Manager>("l2")->renegotiations(), before);
}

TEST(Manager, RejectsInvalidIntentsWithField) {
  Harness hz;
  hz.submit(text_intent("vague", "Make it better."));
  auto acks = hz.op->drain();
  ASSERT_EQ(acks.size(), 1u);
  EXPECT_FALSE((*acks[0].body_structured)["accepted"].get<bool>());
  EXPECT_EQ((*acks[0].body_structured)["field"], "requirements");

  Intent routed = mtc_intent("l3", 1e6, std::nullopt);
  routed.domain = "L3";
  hz.submit(routed);
  acks = hz.op->drain();
  ASSERT_EQ(acks.size(), 1u);
  EXPECT_EQ((*acks[0].body_structured)["field"], "domain");
  EXPECT_EQ(hz.lifecycle("intent_rejected", "manager").size(), 2u);
  EXPECT_TRUE(hz.sent("manager", "l2", MessageKind::kIntent).empty());

  Intent lower = mtc_intent("l2-lower", 1e6, std::nullopt);
  lower.domain = "l2";
  hz.submit(lower);
  acks = hz.op->drain();
  ASSERT_EQ(acks.size(), 1u);
  EXPECT_TRUE((*acks[0].body_structured)["accepted"].get<bool>());
}

TEST(Manager, RouteIntent) {
  Intent i;
  const std::vector<LayerEntry> layers{{"l1", "L1"}, {"l2", "L2"}, {"l3", "L3"}};
  EXPECT_EQ(route_intent(i, layers).agent_id, "l2");
  i.domain = "l3";
  EXPECT_EQ(route_intent(i, layers).agent_id, "l3");
  i.domain = "L7";
  EXPECT_THROW(route_intent(i, layers), RoutingError);
  i.domain.clear();
  EXPECT_EQ(route_intent(i, {{"only", "L1"}}).agent_id, "only");
  EXPECT_THROW(route_intent(i, {{"a", "L1"}, {"b", "L3"}}), RoutingError);
  EXPECT_THROW(route_intent(i, {}), RoutingError);
}

TEST(Dapp, ToolErrorsNameTheField) {
  std::mutex mu;
  sim::Simulator s(sim::SimParams{}, three_ue_cell(), 1);
  auto pc = make_dapp("pc-dapp", DappKind::kPowerControl, {&s, &mu});
  auto ra = make_dapp("ra-dapp", DappKind::kResourceAllocation, {&s, &mu});
  auto code_and_field = [](const std::function<void()>& f) -> std::pair<int, std::string> {
    try {
      f();
    } catch (const fabric::RpcException& e) {
      const auto& err = e.error();
      return {err.code, err.data ? err.data->value("field", std::string{}) : std::string{}};
    }
    return {0, ""};
  };
  EXPECT_EQ(code_and_field([&] { pc->call("get_kpis", Json{{"window_s", 1.0}}); }),
            (std::pair<int, std::string>{fabric::rpc_code::kInternalError, "window_s"}));
  EXPECT_EQ(code_and_field([&] { pc->call("set_snr_target", Json{{"ue_id", 9}, {"target_db", 3.0}}); }),
            (std::pair<int, std::string>{fabric::rpc_code::kInvalidParams, "ue_id"}));
  EXPECT_EQ(code_and_field([&] { ra->call("set_throttle_limit", Json{{"slice_id", 1}, {"limit_bps", 1e3}}); }).first,
            fabric::rpc_code::kInvalidParams);
  EXPECT_EQ(code_and_field([&] { ra->call("set_throttle_limit", Json{{"slice_id", 5}, {"limit_bps", 1e7}}); }),
            (std::pair<int, std::string>{fabric::rpc_code::kInvalidParams, "slice_id"}));
  EXPECT_EQ(code_and_field([&] { pc->call("set_throttle_limit", Json{{"slice_id", 1}, {"limit_bps", 1e7}}); }).first,
            fabric::rpc_code::kMethodNotFound);

  pc->call("set_snr_target", Json{{"ue_id", 3}, {"target_db", 9.0}});
  EXPECT_DOUBLE_EQ(s.state().ue(3)->snr_target_db, 9.0);
  ra->call("set_throttle_limit", Json{{"slice_id", 2}, {"limit_bps", 2e7}});
  EXPECT_DOUBLE_EQ(s.state().slice(2)->throttle_limit_bps, 2e7);
  s.run_slots(10);
  const auto snap = pc->call("get_kpis", Json{{"window_s", 0.01}}).get<sim::KpiSnapshot>();
  EXPECT_EQ(snap.per_ue.size(), 3u);
}

TEST(Deployment, ValidationNamesTheField) {
  auto field_of = [](DeploymentDescriptor d) -> std::string {
    try {
      d.validate();
    } catch (const DeploymentError& e) {
      return e.field();
    }
    return "";
  };
  EXPECT_EQ(field_of(default_deployment()), "");
  auto d = default_deployment();
  d.agents[3].agent_id = "pc";
  EXPECT_EQ(field_of(d), "agents[3].agent_id");
  d = default_deployment();
  d.agents[2].parent_id = "nobody";
  EXPECT_EQ(field_of(d), "agents[2].parent_id");
  d = default_deployment();
  d.agents[2].tool_servers.clear();
  EXPECT_EQ(field_of(d), "agents[2].tool_servers");
  d = default_deployment();
  d.agents[3].tool_servers = {"udp://x"};
  EXPECT_EQ(field_of(d), "agents[3].tool_servers");
  d = default_deployment();
  d.agents.push_back(d.agents[0]);
  d.agents.back().agent_id = "manager2";
  EXPECT_EQ(field_of(d), "agents");
  d = default_deployment();
  d.agents[2].reasoner = "llm";
  EXPECT_EQ(field_of(d), "llm");
  d = default_deployment();
  d.agents[2].guardrails.snr_target_min_db = 40.0;
  EXPECT_EQ(field_of(d), "agents[2].guardrails");
}

TEST(Deployment, JsonRoundTrip) {
  auto d = default_deployment();
  d.agents[2].guardrails.max_snr_delta_per_cycle_db = 2.0;
  d.agents[1].heartbeat_s = 4.0;
  const Json j = d;
  const auto back = j.get<DeploymentDescriptor>();
  EXPECT_EQ(back.agents, d.agents);
  EXPECT_EQ(back.rule_engine, d.rule_engine);
  EXPECT_EQ(Json(back), j);
}
