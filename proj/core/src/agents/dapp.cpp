#include "agentran/agents/dapp.hpp"

#include <stdexcept>

namespace agentran::agents {

using fabric::Json;
using fabric::ParamSpec;
using fabric::ParamType;
using fabric::RpcException;
using fabric::ToolDescriptor;
namespace rpc_code = fabric::rpc_code;

fabric::ToolDescriptor set_snr_target_descriptor() {
  ToolDescriptor d;
  d.name = "set_snr_target";
  d.description = "Sets the closed-loop uplink SNR target of one UE.";
  d.params = {ParamSpec{"ue_id", ParamType::kInteger, "UE identifier", "", std::nullopt, std::nullopt, true},
              ParamSpec{"target_db", ParamType::kNumber, "Target SNR", "dB", -40.0, 40.0, true}};
  return d;
}

fabric::ToolDescriptor set_throttle_limit_descriptor() {
  ToolDescriptor d;
  d.name = "set_throttle_limit";
  d.description = "Caps the uplink throughput of every UE in one slice.";
  d.params = {ParamSpec{"slice_id", ParamType::kInteger, "Slice identifier", "", std::nullopt, std::nullopt, true},
              ParamSpec{"limit_bps", ParamType::kNumber, "Throughput cap", "bit/s", 3e6, 1e8, true}};
  return d;
}

fabric::ToolDescriptor get_kpis_descriptor() {
  ToolDescriptor d;
  d.name = "get_kpis";
  d.description = "Returns per-UE and per-slice KPIs averaged over the last window_s seconds.";
  d.params = {ParamSpec{"window_s", ParamType::kNumber, "Averaging window", "s", 0.001, 60.0, false}};
  return d;
}

namespace {

[[noreturn]] void rethrow_as_rpc(const std::exception& e, const char* field) {
  throw RpcException(rpc_code::kInvalidParams, std::string("Invalid params: ") + e.what(), Json{{"field", field}});
}

}  // namespace

std::shared_ptr<fabric::ToolServer> make_dapp(const std::string& name, DappKind kind, SimAccess access) {
  if (!access.sim || !access.mu) throw std::invalid_argument("dApp " + name + " needs a simulator and a mutex");
  auto server = std::make_shared<fabric::ToolServer>(name);

  if (kind == DappKind::kPowerControl) {
    server->register_tool(set_snr_target_descriptor(), [access](const Json& a) {
      const int ue = a.at("ue_id").get<int>();
      const double target = a.at("target_db").get<double>();
      std::lock_guard lock(*access.mu);
      const auto* u = access.sim->state().ue(ue);
      if (!u) rethrow_as_rpc(std::out_of_range("unknown ue_id " + std::to_string(ue)), "ue_id");
      const double previous = u->snr_target_db;
      access.sim->set_snr_target(ue, target);
      return Json{{"ue_id", ue}, {"previous_target_db", previous}, {"applied_target_db", target}};
    });
  } else {
    server->register_tool(set_throttle_limit_descriptor(), [access](const Json& a) {
      const int slice = a.at("slice_id").get<int>();
      const double limit = a.at("limit_bps").get<double>();
      std::lock_guard lock(*access.mu);
      const auto* s = access.sim->state().slice(slice);
      if (!s) rethrow_as_rpc(std::out_of_range("unknown slice_id " + std::to_string(slice)), "slice_id");
      const double previous = s->throttle_limit_bps;
      access.sim->set_throttle_limit(slice, limit);
      return Json{{"slice_id", slice}, {"previous_limit_bps", previous}, {"applied_limit_bps", limit}};
    });
  }

  server->register_tool(get_kpis_descriptor(), [access](const Json& a) {
    const double window = a.value("window_s", 1.0);
    std::lock_guard lock(*access.mu);
    if (access.sim->elapsed_slots() == 0)
      throw RpcException(rpc_code::kInternalError, "no slots simulated yet", Json{{"field", "window_s"}});
    return Json(access.sim->collect_kpis(window));
  });
  return server;
}

}  // namespace agentran::agents
