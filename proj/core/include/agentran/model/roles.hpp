#pragma once

#include <string>

namespace agentran::model {

enum class AgentRole { kManager, kLayerManager, kPowerControl, kUlResourceAllocation, kDlResourceAllocation };

std::string to_string(AgentRole r);
AgentRole role_from_string(const std::string& s);
bool is_control_role(AgentRole r);  // PC and UL RA run closed loops against a dApp

}  // namespace agentran::model
