#pragma once

// Implementation of serve_frame; included from rpc.hpp.

namespace agentran::fabric {

template <typename Handler>
std::optional<std::string> serve_frame(std::string_view frame, Handler&& handler) {
  RpcEnvelope req;
  try {
    req = decode_envelope(frame);
  } catch (const RpcException& e) {
    return encode_envelope(RpcEnvelope::failure(nullptr, e.error()));
  }
  if (!req.is_request())
    return encode_envelope(RpcEnvelope::failure(
        req.id.value_or(nullptr), RpcError{rpc_code::kInvalidRequest, "expected a request", std::nullopt}));
  try {
    Json result = handler(req.method, req.params.value_or(Json::object()));
    if (req.is_notification()) return std::nullopt;
    return encode_envelope(RpcEnvelope::success(*req.id, std::move(result)));
  } catch (const RpcException& e) {
    if (req.is_notification()) return std::nullopt;
    return encode_envelope(RpcEnvelope::failure(*req.id, e.error()));
  } catch (const std::exception& e) {
    if (req.is_notification()) return std::nullopt;
    return encode_envelope(
        RpcEnvelope::failure(*req.id, RpcError{rpc_code::kInternalError, e.what(), std::nullopt}));
  }
}

}  // namespace agentran::fabric
