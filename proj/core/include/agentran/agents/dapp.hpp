#pragma once

#include <memory>
#include <mutex>
#include <string>

#include "agentran/fabric/tools.hpp"
#include "agentran/sim/simulator.hpp"

namespace agentran::agents {

// Shared simulator handle; every tool call holds the mutex.
struct SimAccess {
  sim::Simulator* sim = nullptr;
  std::mutex* mu = nullptr;
};

enum class DappKind { kPowerControl, kResourceAllocation };

// Tool server exposing one control knob plus get_kpis:
//   power control:       set_snr_target {ue_id, target_db}
//   resource allocation: set_throttle_limit {slice_id, limit_bps}
std::shared_ptr<fabric::ToolServer> make_dapp(const std::string& name, DappKind kind, SimAccess access);

fabric::ToolDescriptor set_snr_target_descriptor();
fabric::ToolDescriptor set_throttle_limit_descriptor();
fabric::ToolDescriptor get_kpis_descriptor();

}  // namespace agentran::agents
