#include "agentran/agents/deployment.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "agentran/agents/control_agent.hpp"
#include "agentran/agents/l2_manager.hpp"
#include "agentran/agents/manager.hpp"
#include "agentran/fabric/tcp.hpp"

namespace agentran::agents {

namespace {

int rank(AgentRole r) {
  switch (r) {
    case AgentRole::kManager: return 0;
    case AgentRole::kLayerManager: return 1;
    default: return 2;
  }
}

}  // namespace

const AgentConfig* DeploymentDescriptor::find(const std::string& agent_id) const {
  for (const auto& a : agents)
    if (a.agent_id == agent_id) return &a;
  return nullptr;
}

void DeploymentDescriptor::validate() const {
  if (agents.empty()) throw DeploymentError("agents", "at least one agent is required");
  std::set<std::string> ids;
  int managers = 0;
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const auto& a = agents[i];
    const std::string where = "agents[" + std::to_string(i) + "]";
    if (a.agent_id.empty()) throw DeploymentError(where + ".agent_id", "must not be empty");
    if (!ids.insert(a.agent_id).second) throw DeploymentError(where + ".agent_id", "duplicate id " + a.agent_id);
    if (!(a.cycle_period_s > 0.0)) throw DeploymentError(where + ".cycle_period_s", "must be positive");
    if (!(a.heartbeat_s > 0.0)) throw DeploymentError(where + ".heartbeat_s", "must be positive");
    if (!(a.kpi_window_s > 0.0)) throw DeploymentError(where + ".kpi_window_s", "must be positive");
    if (a.unmet_cycles_before_report < 1) throw DeploymentError(where + ".unmet_cycles_before_report", "must be >= 1");
    if (a.max_renegotiations < 1) throw DeploymentError(where + ".max_renegotiations", "must be >= 1");
    if (a.reasoner != "rule" && a.reasoner != "llm")
      throw DeploymentError(where + ".reasoner", "must be \"rule\" or \"llm\"");
    if (a.reasoner == "llm" && !llm) throw DeploymentError("llm", "agent " + a.agent_id + " uses llm but no endpoint");
    try {
      a.guardrails.validate();
    } catch (const std::exception& e) {
      throw DeploymentError(where + ".guardrails", e.what());
    }
    if (a.role == AgentRole::kManager) {
      ++managers;
      if (!a.parent_id.empty()) throw DeploymentError(where + ".parent_id", "the manager has no parent");
    }
  }
  if (managers != 1) throw DeploymentError("agents", "exactly one manager is required");
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const auto& a = agents[i];
    const std::string where = "agents[" + std::to_string(i) + "]";
    if (a.role == AgentRole::kManager) continue;
    const AgentConfig* parent = find(a.parent_id);
    if (!parent) throw DeploymentError(where + ".parent_id", "unknown parent " + a.parent_id);
    const AgentRole want = a.role == AgentRole::kLayerManager ? AgentRole::kManager : AgentRole::kLayerManager;
    if (parent->role != want)
      throw DeploymentError(where + ".parent_id", "parent " + a.parent_id + " must have role " + model::to_string(want));
    if (model::is_control_role(a.role) && a.role != AgentRole::kDlResourceAllocation && a.tool_servers.empty())
      throw DeploymentError(where + ".tool_servers", "a control agent needs at least one tool server");
    for (const auto& addr : a.tool_servers)
      if (addr.rfind("inproc://", 0) != 0 && addr.rfind("tcp://", 0) != 0)
        throw DeploymentError(where + ".tool_servers", "unsupported address " + addr);
  }
}

void to_json(Json& j, const DeploymentDescriptor& d) {
  j = Json{{"agents", d.agents}, {"rule_engine", d.rule_engine}};
  if (d.llm) j["llm"] = *d.llm;
}

void from_json(const Json& j, DeploymentDescriptor& d) {
  d = DeploymentDescriptor{};
  if (!j.is_object()) throw DeploymentError("deployment", "must be an object");
  if (!j.contains("agents") || !j["agents"].is_array()) throw DeploymentError("agents", "must be an array");
  for (std::size_t i = 0; i < j["agents"].size(); ++i) {
    try {
      d.agents.push_back(j["agents"][i].get<AgentConfig>());
    } catch (const std::exception& e) {
      throw DeploymentError("agents[" + std::to_string(i) + "]", e.what());
    }
  }
  if (j.contains("rule_engine")) d.rule_engine = j["rule_engine"].get<reasoner::RuleEngineConfig>();
  if (j.contains("llm") && !j["llm"].is_null()) d.llm = j["llm"].get<reasoner::EndpointConfig>();
}

DeploymentDescriptor default_deployment() {
  DeploymentDescriptor d;
  AgentConfig m;
  m.agent_id = "manager";
  m.role = AgentRole::kManager;
  AgentConfig l2;
  l2.agent_id = "l2";
  l2.role = AgentRole::kLayerManager;
  l2.parent_id = "manager";
  l2.domain = "L2";
  AgentConfig pc;
  pc.agent_id = "pc";
  pc.role = AgentRole::kPowerControl;
  pc.parent_id = "l2";
  pc.tool_servers = {"inproc://pc-dapp"};
  AgentConfig ul;
  ul.agent_id = "ul-ra";
  ul.role = AgentRole::kUlResourceAllocation;
  ul.parent_id = "l2";
  ul.tool_servers = {"inproc://ra-dapp"};
  AgentConfig dl;
  dl.agent_id = "dl-ra";
  dl.role = AgentRole::kDlResourceAllocation;
  dl.parent_id = "l2";
  d.agents = {m, l2, pc, ul, dl};
  return d;
}

DeploymentDescriptor load_deployment(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DeploymentError("deployment", "cannot open " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    throw DeploymentError("deployment", std::string("invalid JSON: ") + e.what());
  }
  auto d = j.get<DeploymentDescriptor>();
  d.validate();
  return d;
}

void set_reasoner_backend(DeploymentDescriptor& d, const std::string& backend) {
  if (backend != "rule" && backend != "llm") throw DeploymentError("reasoner", "must be \"rule\" or \"llm\"");
  for (auto& a : d.agents) a.reasoner = backend;
}

ReasonerFactory make_reasoner_factory(const DeploymentDescriptor& d) {
  return [rule = d.rule_engine, llm = d.llm](const AgentConfig& a) -> std::shared_ptr<reasoner::Reasoner> {
    if (a.reasoner == "llm") {
      if (!llm) throw DeploymentError("llm", "no endpoint configured for " + a.agent_id);
      return std::make_shared<reasoner::LlmReasoner>(*llm);
    }
    auto cfg = rule;
    cfg.guardrails = a.guardrails;
    return std::make_shared<reasoner::RuleEngine>(cfg);
  };
}

Connector make_connector(std::map<std::string, std::shared_ptr<fabric::ToolServer>> inproc) {
  return [servers = std::move(inproc)](const std::string& addr) -> std::shared_ptr<fabric::Transport> {
    constexpr std::string_view kInproc = "inproc://";
    constexpr std::string_view kTcp = "tcp://";
    if (addr.rfind(kInproc, 0) == 0) {
      const auto it = servers.find(addr.substr(kInproc.size()));
      if (it == servers.end()) throw std::runtime_error("no in-process tool server at " + addr);
      return std::make_shared<fabric::InProcessTransport>(it->second);
    }
    if (addr.rfind(kTcp, 0) == 0) {
      const std::string rest = addr.substr(kTcp.size());
      const auto colon = rest.rfind(':');
      if (colon == std::string::npos) throw std::runtime_error("tcp address without port: " + addr);
      const int port = std::stoi(rest.substr(colon + 1));
      if (port <= 0 || port > 65535) throw std::runtime_error("tcp port out of range: " + addr);
      return std::make_shared<fabric::TcpTransport>(rest.substr(0, colon), static_cast<unsigned short>(port));
    }
    throw std::runtime_error("unsupported tool server address " + addr);
  };
}

AgentHierarchy::AgentHierarchy(const DeploymentDescriptor& d, AgentEnv env) {
  d.validate();
  if (!env.reasoner) env.reasoner = make_reasoner_factory(d);
  std::vector<const AgentConfig*> order;
  for (const auto& a : d.agents) order.push_back(&a);
  std::stable_sort(order.begin(), order.end(), [](auto* a, auto* b) { return rank(a->role) < rank(b->role); });

  for (const AgentConfig* a : order) {
    switch (a->role) {
      case AgentRole::kManager: {
        std::vector<LayerEntry> layers;
        for (const auto& o : d.agents)
          if (o.role == AgentRole::kLayerManager && o.parent_id == a->agent_id)
            layers.push_back({o.agent_id, o.domain});
        manager_id_ = a->agent_id;
        agents_.push_back(std::make_unique<Manager>(*a, env, std::move(layers)));
        break;
      }
      case AgentRole::kLayerManager: {
        std::vector<reasoner::ChildInfo> kids;
        for (const auto& o : d.agents)
          if (o.parent_id == a->agent_id) kids.push_back({o.agent_id, o.role});
        agents_.push_back(std::make_unique<L2Manager>(*a, env, std::move(kids)));
        break;
      }
      case AgentRole::kDlResourceAllocation:
        agents_.push_back(std::make_unique<DlRaStub>(*a, env));
        break;
      default:
        agents_.push_back(std::make_unique<ControlAgent>(*a, env));
    }
  }
}

std::size_t AgentHierarchy::pump_until_idle(std::size_t max_rounds) {
  std::size_t total = 0;
  for (std::size_t round = 0; round < max_rounds; ++round) {
    std::size_t n = 0;
    for (auto& a : agents_) n += a->pump();
    total += n;
    if (n == 0) break;
  }
  return total;
}

void AgentHierarchy::tick(double now_s) {
  for (auto& a : agents_) a->tick(now_s);
}

Agent* AgentHierarchy::find(const std::string& agent_id) const {
  for (const auto& a : agents_)
    if (a->id() == agent_id) return a.get();
  return nullptr;
}

Json AgentHierarchy::status() const {
  Json out = Json::array();
  for (const auto& a : agents_) out.push_back(a->status());
  return out;
}

}  // namespace agentran::agents
