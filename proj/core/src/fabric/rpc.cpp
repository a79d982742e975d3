#include "agentran/fabric/rpc.hpp"

namespace agentran::fabric {

namespace {

[[noreturn]] void invalid(const std::string& why) {
  throw RpcException(rpc_code::kInvalidRequest, "Invalid Request: " + why);
}

RpcId parse_id(const Json& j, bool allow_null) {
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_string()) return j.get<std::string>();
  if (j.is_null() && allow_null) return nullptr;
  invalid("id must be an integer or a string");
}

}  // namespace

RpcEnvelope RpcEnvelope::request(RpcId id, std::string method, std::optional<Json> params) {
  RpcEnvelope e;
  e.id = std::move(id);
  e.method = std::move(method);
  e.params = std::move(params);
  return e;
}

RpcEnvelope RpcEnvelope::notification(std::string method, std::optional<Json> params) {
  RpcEnvelope e;
  e.method = std::move(method);
  e.params = std::move(params);
  return e;
}

RpcEnvelope RpcEnvelope::success(RpcId id, Json result) {
  RpcEnvelope e;
  e.id = std::move(id);
  e.result = std::move(result);
  return e;
}

RpcEnvelope RpcEnvelope::failure(RpcId id, RpcError err) {
  RpcEnvelope e;
  e.id = std::move(id);
  e.error = std::move(err);
  return e;
}

Json id_to_json(const RpcId& id) {
  return std::visit(
      [](const auto& v) -> Json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::nullptr_t>) return nullptr;
        else return v;
      },
      id);
}

std::string id_to_string(const RpcId& id) { return id_to_json(id).dump(); }

std::string encode_envelope(const RpcEnvelope& env) {
  Json j = Json::object();
  j["jsonrpc"] = "2.0";
  if (env.id) j["id"] = id_to_json(*env.id);
  if (env.is_request()) {
    j["method"] = env.method;
    if (env.params) j["params"] = *env.params;
  } else if (env.error) {
    Json e = {{"code", env.error->code}, {"message", env.error->message}};
    if (env.error->data) e["data"] = *env.error->data;
    j["error"] = std::move(e);
  } else {
    j["result"] = env.result.value_or(Json());
  }
  return j.dump();
}

RpcEnvelope decode_envelope(std::string_view bytes) {
  Json j;
  try {
    j = Json::parse(bytes.begin(), bytes.end());
  } catch (const Json::exception& e) {
    throw RpcException(rpc_code::kParseError, std::string("Parse error: ") + e.what());
  }
  if (!j.is_object()) invalid("envelope must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (key != "jsonrpc" && key != "id" && key != "method" && key != "params" && key != "result" &&
        key != "error")
      invalid("unexpected member \"" + key + "\"");
  }
  if (!j.contains("jsonrpc") || j["jsonrpc"] != "2.0") invalid("jsonrpc must be \"2.0\"");

  RpcEnvelope env;
  const bool has_result = j.contains("result");
  const bool has_error = j.contains("error");

  if (j.contains("method")) {
    const Json& m = j["method"];
    if (!m.is_string() || m.get_ref<const std::string&>().empty()) invalid("method must be a non-empty string");
    if (has_result || has_error) invalid("a request cannot carry result or error");
    env.method = m.get<std::string>();
    if (j.contains("id")) env.id = parse_id(j["id"], false);
    if (j.contains("params")) {
      const Json& p = j["params"];
      if (!p.is_object() && !p.is_array()) invalid("params must be an object or an array");
      env.params = p;
    }
    return env;
  }

  if (!has_result && !has_error) invalid("missing method");
  if (has_result && has_error) invalid("a response carries exactly one of result and error");
  if (j.contains("params")) invalid("a response cannot carry params");
  if (!j.contains("id")) invalid("a response must carry an id");
  env.id = parse_id(j["id"], true);
  if (has_result) {
    env.result = j["result"];
  } else {
    const Json& e = j["error"];
    if (!e.is_object() || !e.contains("code") || !e["code"].is_number_integer() || !e.contains("message") ||
        !e["message"].is_string())
      invalid("error must be an object with an integer code and a string message");
    for (const auto& [key, _] : e.items())
      if (key != "code" && key != "message" && key != "data") invalid("unexpected error member \"" + key + "\"");
    RpcError err{e["code"].get<int>(), e["message"].get<std::string>(), std::nullopt};
    if (e.contains("data")) err.data = e["data"];
    env.error = std::move(err);
  }
  return env;
}

}  // namespace agentran::fabric
