#pragma once

#include <atomic>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "agentran/fabric/tools.hpp"

namespace agentran::fabric {

using FrameHandler = std::function<std::optional<std::string>(std::string_view)>;

// Length-prefixed JSON-RPC over TCP. One thread per connection; replies go
// back on the connection the request came from.
class TcpRpcHost {
 public:
  TcpRpcHost(FrameHandler handler, const std::string& host = "127.0.0.1", unsigned short port = 0);
  ~TcpRpcHost();
  TcpRpcHost(const TcpRpcHost&) = delete;
  TcpRpcHost& operator=(const TcpRpcHost&) = delete;

  unsigned short port() const { return port_; }
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  unsigned short port_ = 0;
};

class TcpTransport final : public Transport {
 public:
  TcpTransport(const std::string& host, unsigned short port);
  ~TcpTransport() override;
  std::string roundtrip(const std::string& frame) override;
  void send_only(const std::string& frame);  // for notifications

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace agentran::fabric
