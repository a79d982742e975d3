#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "agentran/fabric/rpc.hpp"

namespace agentran::fabric {

enum class ParamType { kNumber, kInteger, kString, kBoolean };

struct ParamSpec {
  std::string name;
  ParamType type = ParamType::kNumber;
  std::string description;
  std::string unit;  // semantic type, e.g. "dB", "bit/s"
  std::optional<double> minimum;
  std::optional<double> maximum;
  bool required = true;

  friend bool operator==(const ParamSpec&, const ParamSpec&) = default;
};

struct ToolDescriptor {
  std::string name;
  std::string description;
  std::vector<ParamSpec> params;

  // MCP-style {"name", "description", "inputSchema"} object.
  Json to_json() const;
  static ToolDescriptor from_json(const Json& j);
  friend bool operator==(const ToolDescriptor&, const ToolDescriptor&) = default;
};

using ToolHandler = std::function<Json(const Json& args)>;

class RegistrationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Throws RpcException(kInvalidParams) naming the offending field.
void validate_args(const ToolDescriptor& desc, const Json& args);

class ToolServer {
 public:
  explicit ToolServer(std::string name = "tools") : name_(std::move(name)) {}

  void register_tool(ToolDescriptor desc, ToolHandler handler);
  std::vector<ToolDescriptor> list_tools() const;  // registration order
  const std::string& name() const { return name_; }

  // Direct dispatch (already-decoded arguments). Unknown tool -> -32601,
  // schema violation -> -32602. The handler runs exactly once on success.
  Json call(const std::string& tool, const Json& args);

  // JSON-RPC dispatch of "tools/list" and "tools/call".
  Json dispatch(const std::string& method, const Json& params);
  std::optional<std::string> handle_frame(std::string_view frame);

 private:
  struct Entry {
    ToolDescriptor desc;
    ToolHandler handler;
  };
  std::string name_;
  mutable std::mutex mu_;
  std::vector<Entry> tools_;
};

// Request/response channel carrying encoded JSON-RPC frames.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual std::string roundtrip(const std::string& frame) = 0;
};

class InProcessTransport final : public Transport {
 public:
  explicit InProcessTransport(std::shared_ptr<ToolServer> server) : server_(std::move(server)) {}
  std::string roundtrip(const std::string& frame) override;

 private:
  std::shared_ptr<ToolServer> server_;
};

class ToolClient {
 public:
  explicit ToolClient(std::shared_ptr<Transport> transport) : transport_(std::move(transport)) {}

  std::vector<ToolDescriptor> list_tools();
  // Returns the tool's structured result; RpcException carries the error code.
  Json call_tool(const std::string& name, const Json& args);

 private:
  Json request(const std::string& method, Json params);

  std::shared_ptr<Transport> transport_;
  std::int64_t next_id_ = 1;
};

}  // namespace agentran::fabric
