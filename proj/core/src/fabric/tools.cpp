#include "agentran/fabric/tools.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace agentran::fabric {

namespace {

const char* type_name(ParamType t) {
  switch (t) {
    case ParamType::kNumber: return "number";
    case ParamType::kInteger: return "integer";
    case ParamType::kString: return "string";
    case ParamType::kBoolean: return "boolean";
  }
  return "number";
}

ParamType type_from_name(const std::string& s) {
  if (s == "number") return ParamType::kNumber;
  if (s == "integer") return ParamType::kInteger;
  if (s == "string") return ParamType::kString;
  if (s == "boolean") return ParamType::kBoolean;
  throw std::invalid_argument("unknown parameter type " + s);
}

[[noreturn]] void bad_param(const std::string& field, const std::string& why) {
  throw RpcException(rpc_code::kInvalidParams, "Invalid params: " + field + " " + why, Json{{"field", field}});
}

}  // namespace

Json ToolDescriptor::to_json() const {
  Json props = Json::object();
  Json required = Json::array();
  for (const auto& p : params) {
    Json prop = {{"type", type_name(p.type)}, {"description", p.description}};
    if (!p.unit.empty()) prop["x-unit"] = p.unit;
    if (p.minimum) prop["minimum"] = *p.minimum;
    if (p.maximum) prop["maximum"] = *p.maximum;
    props[p.name] = std::move(prop);
    if (p.required) required.push_back(p.name);
  }
  Json order = Json::array();
  for (const auto& p : params) order.push_back(p.name);
  return Json{{"name", name},
              {"description", description},
              {"inputSchema",
               {{"type", "object"}, {"properties", props}, {"required", required}, {"x-order", order}}}};
}

ToolDescriptor ToolDescriptor::from_json(const Json& j) {
  ToolDescriptor d;
  d.name = j.at("name").get<std::string>();
  d.description = j.value("description", std::string{});
  const Json& schema = j.at("inputSchema");
  const Json& props = schema.value("properties", Json::object());
  std::set<std::string> required;
  for (const auto& r : schema.value("required", Json::array())) required.insert(r.get<std::string>());
  std::vector<std::string> order;
  if (schema.contains("x-order"))
    for (const auto& n : schema["x-order"]) order.push_back(n.get<std::string>());
  else
    for (const auto& [k, _] : props.items()) order.push_back(k);
  for (const auto& name : order) {
    const Json& p = props.at(name);
    ParamSpec spec;
    spec.name = name;
    spec.type = type_from_name(p.value("type", std::string{"number"}));
    spec.description = p.value("description", std::string{});
    spec.unit = p.value("x-unit", std::string{});
    if (p.contains("minimum")) spec.minimum = p["minimum"].get<double>();
    if (p.contains("maximum")) spec.maximum = p["maximum"].get<double>();
    spec.required = required.count(name) > 0;
    d.params.push_back(std::move(spec));
  }
  return d;
}

void validate_args(const ToolDescriptor& desc, const Json& args) {
  if (!args.is_object()) bad_param("arguments", "must be an object");
  for (const auto& [key, _] : args.items()) {
    const bool known = std::any_of(desc.params.begin(), desc.params.end(),
                                   [&](const ParamSpec& p) { return p.name == key; });
    if (!known) bad_param(key, "is not a parameter of " + desc.name);
  }
  for (const auto& p : desc.params) {
    if (!args.contains(p.name)) {
      if (p.required) bad_param(p.name, "is required");
      continue;
    }
    const Json& v = args[p.name];
    switch (p.type) {
      case ParamType::kInteger:
        if (!v.is_number_integer()) bad_param(p.name, "must be an integer");
        break;
      case ParamType::kNumber:
        if (!v.is_number() || !std::isfinite(v.get<double>())) bad_param(p.name, "must be a finite number");
        break;
      case ParamType::kString:
        if (!v.is_string()) bad_param(p.name, "must be a string");
        break;
      case ParamType::kBoolean:
        if (!v.is_boolean()) bad_param(p.name, "must be a boolean");
        break;
    }
    if (v.is_number()) {
      const double x = v.get<double>();
      if (p.minimum && x < *p.minimum) bad_param(p.name, "is below its minimum");
      if (p.maximum && x > *p.maximum) bad_param(p.name, "is above its maximum");
    }
  }
}

void ToolServer::register_tool(ToolDescriptor desc, ToolHandler handler) {
  if (desc.name.empty()) throw RegistrationError("tool name must not be empty");
  if (!handler) throw RegistrationError("tool " + desc.name + " has no handler");
  std::lock_guard lock(mu_);
  for (const auto& e : tools_)
    if (e.desc.name == desc.name) throw RegistrationError("duplicate tool name: " + desc.name);
  tools_.push_back({std::move(desc), std::move(handler)});
}

std::vector<ToolDescriptor> ToolServer::list_tools() const {
  std::lock_guard lock(mu_);
  std::vector<ToolDescriptor> out;
  out.reserve(tools_.size());
  for (const auto& e : tools_) out.push_back(e.desc);
  return out;
}

Json ToolServer::call(const std::string& tool, const Json& args) {
  ToolHandler handler;
  {
    std::lock_guard lock(mu_);
    auto it = std::find_if(tools_.begin(), tools_.end(), [&](const Entry& e) { return e.desc.name == tool; });
    if (it == tools_.end()) throw RpcException(rpc_code::kMethodNotFound, "Method not found: " + tool);
    validate_args(it->desc, args);
    handler = it->handler;
  }
  return handler(args);
}

Json ToolServer::dispatch(const std::string& m, const Json& params) {
  if (m == method::kToolsList) {
    Json tools = Json::array();
    for (const auto& d : list_tools()) tools.push_back(d.to_json());
    return Json{{"tools", tools}};
  }
  if (m == method::kToolsCall) {
    if (!params.is_object() || !params.contains("name") || !params["name"].is_string())
      bad_param("name", "must be a string");
    const Json args = params.value("arguments", Json::object());
    Json structured = call(params["name"].get<std::string>(), args);
    return Json{{"content", Json::array({Json{{"type", "text"}, {"text", structured.dump()}}})},
                {"structuredContent", structured},
                {"isError", false}};
  }
  throw RpcException(rpc_code::kMethodNotFound, "Method not found: " + m);
}

std::optional<std::string> ToolServer::handle_frame(std::string_view frame) {
  return serve_frame(frame, [this](const std::string& m, const Json& p) { return dispatch(m, p); });
}

std::string InProcessTransport::roundtrip(const std::string& frame) {
  auto reply = server_->handle_frame(frame);
  return reply.value_or(std::string{});
}

Json ToolClient::request(const std::string& m, Json params) {
  const std::int64_t id = next_id_++;
  const auto reply = transport_->roundtrip(encode_envelope(RpcEnvelope::request(id, m, std::move(params))));
  const RpcEnvelope resp = decode_envelope(reply);
  if (!resp.is_response() || !resp.id || *resp.id != RpcId{id})
    throw RpcException(rpc_code::kInternalError, "response id does not match request " + std::to_string(id));
  if (resp.error) throw RpcException(*resp.error);
  return resp.result.value_or(Json());
}

std::vector<ToolDescriptor> ToolClient::list_tools() {
  const Json r = request(std::string(method::kToolsList), Json::object());
  std::vector<ToolDescriptor> out;
  for (const auto& t : r.at("tools")) out.push_back(ToolDescriptor::from_json(t));
  return out;
}

Json ToolClient::call_tool(const std::string& name, const Json& args) {
  const Json r = request(std::string(method::kToolsCall), Json{{"name", name}, {"arguments", args}});
  return r.value("structuredContent", Json());
}

}  // namespace agentran::fabric
