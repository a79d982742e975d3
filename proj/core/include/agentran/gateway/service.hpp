#pragma once

#include <memory>
#include <string>

#include "agentran/gateway/engine.hpp"

namespace agentran::gateway {

// Event frame for one data-lake record:
// {"type": "a2a_message"|"decision"|"kpi"|"violation"|"lifecycle", "seq", "timestamp", "data"}.
Json event_frame(const datalake::LogRecord& r);

struct ListenAddress {
  std::string host = "127.0.0.1";
  unsigned short port = 0;
};
// "host:port" or ":port"; throws std::invalid_argument.
ListenAddress parse_listen_address(const std::string& s);

// HTTP + WebSocket front end over a running engine:
//   POST /intents          Intent JSON -> 202 {"intent_id"}; 400 with detail on bad input
//   GET  /kpis?window=n    latest n KPI snapshots
//   GET  /agents           agent registry with active sub-intents
//   GET  /records?since_seq=n   event frames after seq n
//   GET  /events[?since_seq=n]  WebSocket stream of event frames, in seq order
// Anything else is 404. The engine is driven elsewhere; the service only
// reads thread-safe engine state and queues intents.
class Service {
 public:
  Service(Engine& engine, const ListenAddress& addr);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  unsigned short port() const;
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace agentran::gateway
