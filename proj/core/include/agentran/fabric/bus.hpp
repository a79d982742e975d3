#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "agentran/fabric/rpc.hpp"

namespace agentran::fabric {

enum class MessageKind { kIntent, kSubIntent, kContextReport, kConstraintReport, kAck };

std::string to_string(MessageKind k);
MessageKind message_kind_from_string(const std::string& s);

struct A2aMessage {
  std::string sender;
  std::string recipient;
  MessageKind kind = MessageKind::kAck;
  std::string body_text;
  std::optional<Json> body_structured;
  std::string correlation_id;
  double timestamp_s = 0.0;  // stamped by the bus on send
  std::uint64_t bus_seq = 0;  // global send order, stamped by the bus

  void validate() const;  // throws std::invalid_argument
  friend bool operator==(const A2aMessage&, const A2aMessage&) = default;
};

void to_json(Json& j, const A2aMessage& m);
void from_json(const Json& j, A2aMessage& m);

// "a2a/send" notification carrying one message.
RpcEnvelope to_envelope(const A2aMessage& m);
A2aMessage message_from_envelope(const RpcEnvelope& env);

struct DeadLetter {
  A2aMessage message;
  double expired_at_s = 0.0;
  std::string reason;
};

// Single consumer queue handed out by MessageBus::subscribe.
class Inbox {
 public:
  std::optional<A2aMessage> try_pop();
  std::optional<A2aMessage> pop_for(std::chrono::milliseconds timeout);
  std::vector<A2aMessage> drain();
  std::size_t size() const;
  const std::string& agent_id() const { return agent_id_; }

 private:
  friend class MessageBus;
  explicit Inbox(std::string id) : agent_id_(std::move(id)) {}
  void push(A2aMessage m);

  std::string agent_id_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<A2aMessage> q_;
};

// Point-to-point A2A delivery. Every send is mirrored (data lake, event
// stream) before delivery; a sender's messages to one recipient arrive in
// send order. Messages for an agent that has not subscribed wait until it
// does, or until dead_letter_timeout_s elapses on the bus clock.
class MessageBus {
 public:
  using Clock = std::function<double()>;
  using Mirror = std::function<void(const A2aMessage&)>;
  using DeadLetterSink = std::function<void(const DeadLetter&)>;

  explicit MessageBus(Clock clock, double dead_letter_timeout_s = 5.0);

  std::shared_ptr<Inbox> subscribe(const std::string& agent_id);
  bool is_subscribed(const std::string& agent_id) const;

  void send(A2aMessage msg);

  void add_mirror(Mirror m);
  void set_dead_letter_sink(DeadLetterSink s);

  // Expires pending messages older than the timeout; returns the new dead letters.
  std::vector<DeadLetter> sweep();
  std::vector<DeadLetter> dead_letters() const;
  std::size_t pending_count() const;
  double now() const { return clock_(); }

 private:
  Clock clock_;
  double timeout_s_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Inbox>> inboxes_;
  std::map<std::string, std::deque<A2aMessage>> pending_;
  std::vector<DeadLetter> dead_;
  std::vector<Mirror> mirrors_;
  DeadLetterSink dead_sink_;
  std::uint64_t next_seq_ = 1;
};

}  // namespace agentran::fabric
