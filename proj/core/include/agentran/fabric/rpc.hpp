#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include <nlohmann/json.hpp>

namespace agentran::fabric {

using Json = nlohmann::json;

namespace rpc_code {
inline constexpr int kParseError = -32700;
inline constexpr int kInvalidRequest = -32600;
inline constexpr int kMethodNotFound = -32601;
inline constexpr int kInvalidParams = -32602;
inline constexpr int kInternalError = -32603;
}  // namespace rpc_code

namespace method {
inline constexpr std::string_view kA2aSend = "a2a/send";
inline constexpr std::string_view kToolsList = "tools/list";
inline constexpr std::string_view kToolsCall = "tools/call";
}  // namespace method

struct RpcError {
  int code = 0;
  std::string message;
  std::optional<Json> data;

  friend bool operator==(const RpcError&, const RpcError&) = default;
};

class RpcException : public std::runtime_error {
 public:
  RpcException(int code, const std::string& message, std::optional<Json> data = std::nullopt)
      : std::runtime_error(message), error_{code, message, std::move(data)} {}
  explicit RpcException(RpcError e) : std::runtime_error(e.message), error_(std::move(e)) {}
  int code() const noexcept { return error_.code; }
  const RpcError& error() const noexcept { return error_; }

 private:
  RpcError error_;
};

// JSON-RPC id: null is only legal on error responses to unreadable requests.
using RpcId = std::variant<std::nullptr_t, std::int64_t, std::string>;

// A request carries a method (no id = notification); a response carries
// exactly one of result/error and echoes the request id.
struct RpcEnvelope {
  std::optional<RpcId> id;
  std::string method;
  std::optional<Json> params;
  std::optional<Json> result;
  std::optional<RpcError> error;

  bool is_request() const { return !method.empty(); }
  bool is_notification() const { return is_request() && !id.has_value(); }
  bool is_response() const { return !is_request(); }

  static RpcEnvelope request(RpcId id, std::string method, std::optional<Json> params = std::nullopt);
  static RpcEnvelope notification(std::string method, std::optional<Json> params = std::nullopt);
  static RpcEnvelope success(RpcId id, Json result);
  static RpcEnvelope failure(RpcId id, RpcError err);

  friend bool operator==(const RpcEnvelope&, const RpcEnvelope&) = default;
};

std::string encode_envelope(const RpcEnvelope& env);

// Throws RpcException with kParseError for unreadable JSON and
// kInvalidRequest for JSON that is not a valid envelope.
RpcEnvelope decode_envelope(std::string_view bytes);

// Serves raw frames: decodes, dispatches requests to the handler and encodes
// the reply. Returns nullopt for notifications. Handler errors surface as
// error responses (RpcException keeps its code; anything else is -32603).
template <typename Handler>
std::optional<std::string> serve_frame(std::string_view frame, Handler&& handler);

Json id_to_json(const RpcId& id);
std::string id_to_string(const RpcId& id);

}  // namespace agentran::fabric

#include "agentran/fabric/rpc_inl.hpp"
