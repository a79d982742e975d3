#include "agentran/reasoner/output.hpp"

#include <cmath>
#include <set>

namespace agentran::reasoner {

std::string to_string(OutputKind k) {
  switch (k) {
    case OutputKind::kActions: return "actions";
    case OutputKind::kSubIntents: return "sub_intents";
    case OutputKind::kReport: return "report";
  }
  return "actions";
}

OutputKind output_kind_from_string(const std::string& s) {
  if (s == "actions") return OutputKind::kActions;
  if (s == "sub_intents") return OutputKind::kSubIntents;
  if (s == "report") return OutputKind::kReport;
  throw ValidationError("kind", "unknown kind \"" + s + "\"");
}

namespace {

void only_members(const Json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ValidationError(where + "." + key, "unknown field");
  }
}

const Json& member(const Json& obj, const std::string& where, const char* name) {
  if (!obj.contains(name)) throw ValidationError(where + "." + name, "is required");
  return obj[name];
}

void finite_number(const Json& v, const std::string& field) {
  if (!v.is_number()) throw ValidationError(field, "must be a number");
  if (!std::isfinite(v.get<double>())) throw ValidationError(field, "must be finite");
}

void integer(const Json& v, const std::string& field) {
  if (!v.is_number_integer()) throw ValidationError(field, "must be an integer");
}

void non_empty_string(const Json& v, const std::string& field) {
  if (!v.is_string() || v.get_ref<const std::string&>().empty())
    throw ValidationError(field, "must be a non-empty string");
}

void check_actions(const Json& p) {
  if (!p.is_object()) throw ValidationError("payload", "must be an object");
  only_members(p, "payload", {"actions"});
  const Json& arr = member(p, "payload", "actions");
  if (!arr.is_array()) throw ValidationError("payload.actions", "must be an array");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string where = "payload.actions[" + std::to_string(i) + "]";
    const Json& a = arr[i];
    if (!a.is_object()) throw ValidationError(where, "must be an object");
    const Json& tool = member(a, where, "tool");
    if (!tool.is_string()) throw ValidationError(where + ".tool", "must be a string");
    if (tool == "set_snr_target") {
      only_members(a, where, {"tool", "ue_id", "target_db"});
      integer(member(a, where, "ue_id"), where + ".ue_id");
      finite_number(member(a, where, "target_db"), where + ".target_db");
    } else if (tool == "set_throttle_limit") {
      only_members(a, where, {"tool", "slice_id", "limit_bps"});
      integer(member(a, where, "slice_id"), where + ".slice_id");
      finite_number(member(a, where, "limit_bps"), where + ".limit_bps");
    } else {
      throw ValidationError(where + ".tool", "unknown tool \"" + tool.get<std::string>() + "\"");
    }
  }
}

void check_sub_intents(const Json& p) {
  if (!p.is_object()) throw ValidationError("payload", "must be an object");
  only_members(p, "payload", {"sub_intents"});
  const Json& arr = member(p, "payload", "sub_intents");
  if (!arr.is_array()) throw ValidationError("payload.sub_intents", "must be an array");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string where = "payload.sub_intents[" + std::to_string(i) + "]";
    const Json& s = arr[i];
    if (!s.is_object()) throw ValidationError(where, "must be an object");
    only_members(s, where, {"target_agent", "body_text", "requirements"});
    non_empty_string(member(s, where, "target_agent"), where + ".target_agent");
    non_empty_string(member(s, where, "body_text"), where + ".body_text");
    const Json& reqs = member(s, where, "requirements");
    if (!reqs.is_array()) throw ValidationError(where + ".requirements", "must be an array");
    for (std::size_t k = 0; k < reqs.size(); ++k) {
      const std::string rw = where + ".requirements[" + std::to_string(k) + "]";
      model::SliceRequirement r;
      try {
        r = reqs[k].get<model::SliceRequirement>();
      } catch (const model::IntentError& e) {
        throw ValidationError(rw + "." + e.field(), e.what());
      } catch (const Json::exception& e) {
        throw ValidationError(rw, e.what());
      }
      try {
        r.validate(rw);
      } catch (const model::IntentError& e) {
        throw ValidationError(e.field(), e.what());
      }
    }
  }
}

void check_report(const Json& p) {
  if (!p.is_object()) throw ValidationError("payload", "must be an object");
  only_members(p, "payload", {"summary_text", "constraints"});
  non_empty_string(member(p, "payload", "summary_text"), "payload.summary_text");
  const Json& c = member(p, "payload", "constraints");
  if (!c.is_array()) throw ValidationError("payload.constraints", "must be an array");
  for (std::size_t i = 0; i < c.size(); ++i)
    non_empty_string(c[i], "payload.constraints[" + std::to_string(i) + "]");
}

}  // namespace

ReasonerOutput validate_output(const ReasonerOutput& o, OutputKind expected) {
  if (o.kind != expected)
    throw ValidationError("kind", "expected " + to_string(expected) + " but got " + to_string(o.kind));
  if (o.rationale_text.empty()) throw ValidationError("rationale_text", "must not be empty");
  switch (o.kind) {
    case OutputKind::kActions: check_actions(o.payload); break;
    case OutputKind::kSubIntents: check_sub_intents(o.payload); break;
    case OutputKind::kReport: check_report(o.payload); break;
  }
  return o;
}

ReasonerOutput validate_output(const Json& raw, OutputKind expected) {
  if (!raw.is_object()) throw ValidationError("output", "must be a JSON object");
  only_members(raw, "output", {"kind", "payload", "rationale_text"});
  const Json& kind = member(raw, "output", "kind");
  if (!kind.is_string()) throw ValidationError("kind", "must be a string");
  const Json& rationale = member(raw, "output", "rationale_text");
  if (!rationale.is_string()) throw ValidationError("rationale_text", "must be a string");
  ReasonerOutput o;
  o.kind = output_kind_from_string(kind.get<std::string>());
  o.payload = member(raw, "output", "payload");
  o.rationale_text = rationale.get<std::string>();
  return validate_output(o, expected);
}

std::vector<model::ControlAction> actions_of(const ReasonerOutput& o) {
  std::vector<model::ControlAction> out;
  if (o.kind != OutputKind::kActions) return out;
  for (const auto& a : o.payload.at("actions")) {
    if (a.at("tool") == "set_snr_target")
      out.push_back({model::ActionType::kSetSnrTarget, a.at("ue_id").get<int>(), a.at("target_db").get<double>()});
    else
      out.push_back(
          {model::ActionType::kSetThrottleLimit, a.at("slice_id").get<int>(), a.at("limit_bps").get<double>()});
  }
  return out;
}

std::vector<ProposedSubIntent> sub_intents_of(const ReasonerOutput& o) {
  std::vector<ProposedSubIntent> out;
  if (o.kind != OutputKind::kSubIntents) return out;
  for (const auto& s : o.payload.at("sub_intents"))
    out.push_back({s.at("target_agent").get<std::string>(), s.at("body_text").get<std::string>(),
                   s.at("requirements").get<std::vector<model::SliceRequirement>>()});
  return out;
}

Json actions_payload(const std::vector<model::ControlAction>& actions) {
  Json arr = Json::array();
  for (const auto& a : actions) {
    if (a.type == model::ActionType::kSetSnrTarget)
      arr.push_back({{"tool", "set_snr_target"}, {"ue_id", a.target_id}, {"target_db", a.value}});
    else
      arr.push_back({{"tool", "set_throttle_limit"}, {"slice_id", a.target_id}, {"limit_bps", a.value}});
  }
  return Json{{"actions", arr}};
}

Json to_json(const ReasonerOutput& o) {
  return Json{{"kind", to_string(o.kind)},
              {"payload", o.payload},
              {"rationale_text", o.rationale_text},
              {"retries", o.retries},
              {"backend", o.backend}};
}

std::string output_schema_text(OutputKind expected) {
  switch (expected) {
    case OutputKind::kActions:
      return "Reply with one ```json block: {\"kind\": \"actions\", \"rationale_text\": \"<why>\", \"payload\": "
             "{\"actions\": [{\"tool\": \"set_snr_target\", \"ue_id\": <int>, \"target_db\": <number>} or "
             "{\"tool\": \"set_throttle_limit\", \"slice_id\": <int>, \"limit_bps\": <number>}]}}. Use an empty "
             "actions list when nothing needs to change.";
    case OutputKind::kSubIntents:
      return "Reply with one ```json block: {\"kind\": \"sub_intents\", \"rationale_text\": \"<why>\", "
             "\"payload\": {\"sub_intents\": [{\"target_agent\": \"<agent id>\", \"body_text\": \"<instruction>\", "
             "\"requirements\": [{\"slice_id\": <int>, \"priority\": \"high|normal|low\", \"min_throughput_bps\": "
             "<number>, \"max_delay_s\": <number>, \"battery_saving\": \"none|moderate|aggressive\", "
             "\"spectral_efficiency_focus\": <bool>}]}]}}. Omit requirement fields that do not apply.";
    case OutputKind::kReport:
      return "Reply with one ```json block: {\"kind\": \"report\", \"rationale_text\": \"<why>\", \"payload\": "
             "{\"summary_text\": \"<summary>\", \"constraints\": [\"<constraint>\"]}}.";
  }
  return {};
}

}  // namespace agentran::reasoner
