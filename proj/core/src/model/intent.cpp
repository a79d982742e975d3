#include "agentran/model/intent.hpp"
#include "agentran/model/roles.hpp"

#include <algorithm>
#include <cmath>

namespace agentran::model {

std::string to_string(Priority p) {
  switch (p) {
    case Priority::kHigh: return "high";
    case Priority::kNormal: return "normal";
    case Priority::kLow: return "low";
  }
  return "normal";
}

std::string to_string(BatterySaving b) {
  switch (b) {
    case BatterySaving::kNone: return "none";
    case BatterySaving::kModerate: return "moderate";
    case BatterySaving::kAggressive: return "aggressive";
  }
  return "none";
}

Priority priority_from_string(const std::string& s) {
  if (s == "high") return Priority::kHigh;
  if (s == "normal") return Priority::kNormal;
  if (s == "low") return Priority::kLow;
  throw IntentError("priority", "unknown value \"" + s + "\"");
}

BatterySaving battery_from_string(const std::string& s) {
  if (s == "none") return BatterySaving::kNone;
  if (s == "moderate") return BatterySaving::kModerate;
  if (s == "aggressive") return BatterySaving::kAggressive;
  throw IntentError("battery_saving", "unknown value \"" + s + "\"");
}

bool SliceRequirement::has_any() const {
  return priority || min_throughput_bps || max_delay_s || battery_saving || spectral_efficiency_focus;
}

void SliceRequirement::validate(const std::string& where) const {
  if (!has_any()) throw IntentError(where, "requirement sets no field beyond slice_id");
  if (min_throughput_bps && (!std::isfinite(*min_throughput_bps) || *min_throughput_bps < 0.0))
    throw IntentError(where + ".min_throughput_bps", "must be a finite non-negative number");
  if (max_delay_s && (!std::isfinite(*max_delay_s) || *max_delay_s <= 0.0))
    throw IntentError(where + ".max_delay_s", "must be a finite positive number");
}

namespace {

template <typename T>
const SliceRequirement* find_req(const T& reqs, int slice_id) {
  auto it = std::find_if(reqs.begin(), reqs.end(), [&](const SliceRequirement& r) { return r.slice_id == slice_id; });
  return it == reqs.end() ? nullptr : &*it;
}

}  // namespace

const SliceRequirement* Intent::requirement(int slice_id) const { return find_req(requirements, slice_id); }
const SliceRequirement* SubIntent::requirement(int slice_id) const { return find_req(requirements, slice_id); }

void Intent::validate() const {
  if (body_text.empty()) throw IntentError("body_text", "must not be empty");
  for (std::size_t i = 0; i < requirements.size(); ++i) {
    requirements[i].validate("requirements[" + std::to_string(i) + "]");
    for (std::size_t k = 0; k < i; ++k)
      if (requirements[k].slice_id == requirements[i].slice_id)
        throw IntentError("requirements[" + std::to_string(i) + "].slice_id", "duplicate slice");
  }
}

bool covers(const std::vector<SliceRequirement>& parent, const std::vector<const SubIntent*>& children) {
  auto some_child = [&](int slice, auto pred) {
    return std::any_of(children.begin(), children.end(), [&](const SubIntent* c) {
      const SliceRequirement* r = c ? c->requirement(slice) : nullptr;
      return r && pred(*r);
    });
  };
  for (const auto& p : parent) {
    if (p.priority && !some_child(p.slice_id, [&](const SliceRequirement& r) { return r.priority == p.priority; }))
      return false;
    if (p.min_throughput_bps &&
        !some_child(p.slice_id, [&](const SliceRequirement& r) { return r.min_throughput_bps == p.min_throughput_bps; }))
      return false;
    if (p.max_delay_s && !some_child(p.slice_id, [&](const SliceRequirement& r) { return r.max_delay_s.has_value(); }))
      return false;  // delay budgets are split, only presence is preserved
    if (p.battery_saving &&
        !some_child(p.slice_id, [&](const SliceRequirement& r) { return r.battery_saving == p.battery_saving; }))
      return false;
    if (p.spectral_efficiency_focus &&
        !some_child(p.slice_id, [&](const SliceRequirement& r) {
          return r.spectral_efficiency_focus == p.spectral_efficiency_focus;
        }))
      return false;
  }
  return true;
}

void to_json(Json& j, const SliceRequirement& r) {
  j = Json{{"slice_id", r.slice_id}};
  if (r.priority) j["priority"] = to_string(*r.priority);
  if (r.min_throughput_bps) j["min_throughput_bps"] = *r.min_throughput_bps;
  if (r.max_delay_s) j["max_delay_s"] = *r.max_delay_s;
  if (r.battery_saving) j["battery_saving"] = to_string(*r.battery_saving);
  if (r.spectral_efficiency_focus) j["spectral_efficiency_focus"] = *r.spectral_efficiency_focus;
}

void from_json(const Json& j, SliceRequirement& r) {
  if (!j.is_object()) throw IntentError("requirement", "must be an object");
  for (const auto& [key, _] : j.items()) {
    if (key != "slice_id" && key != "priority" && key != "min_throughput_bps" && key != "max_delay_s" &&
        key != "battery_saving" && key != "spectral_efficiency_focus")
      throw IntentError(key, "unknown requirement field");
  }
  if (!j.contains("slice_id") || !j["slice_id"].is_number_integer())
    throw IntentError("slice_id", "must be an integer");
  r = SliceRequirement{};
  r.slice_id = j["slice_id"].get<int>();
  if (j.contains("priority")) {
    if (!j["priority"].is_string()) throw IntentError("priority", "must be a string");
    r.priority = priority_from_string(j["priority"].get<std::string>());
  }
  if (j.contains("min_throughput_bps")) {
    if (!j["min_throughput_bps"].is_number()) throw IntentError("min_throughput_bps", "must be a number");
    r.min_throughput_bps = j["min_throughput_bps"].get<double>();
  }
  if (j.contains("max_delay_s")) {
    if (!j["max_delay_s"].is_number()) throw IntentError("max_delay_s", "must be a number");
    r.max_delay_s = j["max_delay_s"].get<double>();
  }
  if (j.contains("battery_saving")) {
    if (!j["battery_saving"].is_string()) throw IntentError("battery_saving", "must be a string");
    r.battery_saving = battery_from_string(j["battery_saving"].get<std::string>());
  }
  if (j.contains("spectral_efficiency_focus")) {
    if (!j["spectral_efficiency_focus"].is_boolean())
      throw IntentError("spectral_efficiency_focus", "must be a boolean");
    r.spectral_efficiency_focus = j["spectral_efficiency_focus"].get<bool>();
  }
}

void to_json(Json& j, const Intent& i) {
  j = Json{{"intent_id", i.intent_id},
           {"issuer", i.issuer},
           {"body_text", i.body_text},
           {"requirements", i.requirements},
           {"timestamp_s", i.timestamp_s}};
  if (!i.domain.empty()) j["domain"] = i.domain;
}

void from_json(const Json& j, Intent& i) {
  if (!j.is_object()) throw IntentError("intent", "must be a JSON object");
  i = Intent{};
  if (!j.contains("body_text") || !j["body_text"].is_string()) throw IntentError("body_text", "must be a string");
  i.body_text = j["body_text"].get<std::string>();
  if (j.contains("intent_id")) {
    if (!j["intent_id"].is_string()) throw IntentError("intent_id", "must be a string");
    i.intent_id = j["intent_id"].get<std::string>();
  }
  if (j.contains("issuer")) {
    if (!j["issuer"].is_string()) throw IntentError("issuer", "must be a string");
    i.issuer = j["issuer"].get<std::string>();
  }
  if (j.contains("timestamp_s")) {
    if (!j["timestamp_s"].is_number()) throw IntentError("timestamp_s", "must be a number");
    i.timestamp_s = j["timestamp_s"].get<double>();
  }
  if (j.contains("domain")) {
    if (!j["domain"].is_string()) throw IntentError("domain", "must be a string");
    i.domain = j["domain"].get<std::string>();
  }
  if (j.contains("requirements")) {
    if (!j["requirements"].is_array()) throw IntentError("requirements", "must be an array");
    for (const auto& r : j["requirements"]) i.requirements.push_back(r.get<SliceRequirement>());
  }
}

void to_json(Json& j, const SubIntent& s) {
  j = Json{{"sub_intent_id", s.sub_intent_id}, {"parent_intent_id", s.parent_intent_id},
           {"issuer", s.issuer},               {"target_agent", s.target_agent},
           {"body_text", s.body_text},         {"requirements", s.requirements},
           {"revision", s.revision},           {"timestamp_s", s.timestamp_s}};
}

void from_json(const Json& j, SubIntent& s) {
  s.sub_intent_id = j.at("sub_intent_id").get<std::string>();
  s.parent_intent_id = j.at("parent_intent_id").get<std::string>();
  s.issuer = j.at("issuer").get<std::string>();
  s.target_agent = j.at("target_agent").get<std::string>();
  s.body_text = j.at("body_text").get<std::string>();
  s.requirements = j.at("requirements").get<std::vector<SliceRequirement>>();
  s.revision = j.value("revision", 0);
  s.timestamp_s = j.value("timestamp_s", 0.0);
}


std::string to_string(AgentRole r) {
  switch (r) {
    case AgentRole::kManager: return "manager";
    case AgentRole::kLayerManager: return "l2_manager";
    case AgentRole::kPowerControl: return "power_control";
    case AgentRole::kUlResourceAllocation: return "ul_ra";
    case AgentRole::kDlResourceAllocation: return "dl_ra";
  }
  return "manager";
}

AgentRole role_from_string(const std::string& s) {
  if (s == "manager") return AgentRole::kManager;
  if (s == "l2_manager") return AgentRole::kLayerManager;
  if (s == "power_control") return AgentRole::kPowerControl;
  if (s == "ul_ra") return AgentRole::kUlResourceAllocation;
  if (s == "dl_ra") return AgentRole::kDlResourceAllocation;
  throw std::invalid_argument("unknown agent role " + s);
}

bool is_control_role(AgentRole r) {
  return r == AgentRole::kPowerControl || r == AgentRole::kUlResourceAllocation;
}

}  // namespace agentran::model
