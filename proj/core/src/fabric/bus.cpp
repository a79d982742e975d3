#include "agentran/fabric/bus.hpp"

#include <stdexcept>

namespace agentran::fabric {

std::string to_string(MessageKind k) {
  switch (k) {
    case MessageKind::kIntent: return "intent";
    case MessageKind::kSubIntent: return "sub_intent";
    case MessageKind::kContextReport: return "context_report";
    case MessageKind::kConstraintReport: return "constraint_report";
    case MessageKind::kAck: return "ack";
  }
  return "ack";
}

MessageKind message_kind_from_string(const std::string& s) {
  if (s == "intent") return MessageKind::kIntent;
  if (s == "sub_intent") return MessageKind::kSubIntent;
  if (s == "context_report") return MessageKind::kContextReport;
  if (s == "constraint_report") return MessageKind::kConstraintReport;
  if (s == "ack") return MessageKind::kAck;
  throw std::invalid_argument("unknown message kind: " + s);
}

void A2aMessage::validate() const {
  if (sender.empty()) throw std::invalid_argument("A2A message without sender");
  if (recipient.empty()) throw std::invalid_argument("A2A message without recipient");
  if (body_text.empty()) throw std::invalid_argument("A2A message body_text must not be empty");
}

void to_json(Json& j, const A2aMessage& m) {
  j = Json{{"sender", m.sender},
           {"recipient", m.recipient},
           {"kind", to_string(m.kind)},
           {"body_text", m.body_text},
           {"correlation_id", m.correlation_id},
           {"timestamp_s", m.timestamp_s},
           {"bus_seq", m.bus_seq}};
  if (m.body_structured) j["body_structured"] = *m.body_structured;
}

void from_json(const Json& j, A2aMessage& m) {
  m.sender = j.at("sender").get<std::string>();
  m.recipient = j.at("recipient").get<std::string>();
  m.kind = message_kind_from_string(j.at("kind").get<std::string>());
  m.body_text = j.at("body_text").get<std::string>();
  m.correlation_id = j.value("correlation_id", std::string{});
  m.timestamp_s = j.value("timestamp_s", 0.0);
  m.bus_seq = j.value("bus_seq", std::uint64_t{0});
  if (j.contains("body_structured")) m.body_structured = j["body_structured"];
  else m.body_structured.reset();
}

RpcEnvelope to_envelope(const A2aMessage& m) {
  return RpcEnvelope::notification(std::string(method::kA2aSend), Json{{"message", m}});
}

A2aMessage message_from_envelope(const RpcEnvelope& env) {
  if (env.method != method::kA2aSend)
    throw RpcException(rpc_code::kMethodNotFound, "Method not found: " + env.method);
  if (!env.params || !env.params->contains("message"))
    throw RpcException(rpc_code::kInvalidParams, "Invalid params: message is required", Json{{"field", "message"}});
  try {
    A2aMessage m = env.params->at("message").get<A2aMessage>();
    m.validate();
    return m;
  } catch (const std::exception& e) {
    throw RpcException(rpc_code::kInvalidParams, std::string("Invalid params: ") + e.what(),
                       Json{{"field", "message"}});
  }
}

void Inbox::push(A2aMessage m) {
  {
    std::lock_guard lock(mu_);
    q_.push_back(std::move(m));
  }
  cv_.notify_one();
}

std::optional<A2aMessage> Inbox::try_pop() {
  std::lock_guard lock(mu_);
  if (q_.empty()) return std::nullopt;
  A2aMessage m = std::move(q_.front());
  q_.pop_front();
  return m;
}

std::optional<A2aMessage> Inbox::pop_for(std::chrono::milliseconds timeout) {
  std::unique_lock lock(mu_);
  if (!cv_.wait_for(lock, timeout, [&] { return !q_.empty(); })) return std::nullopt;
  A2aMessage m = std::move(q_.front());
  q_.pop_front();
  return m;
}

std::vector<A2aMessage> Inbox::drain() {
  std::lock_guard lock(mu_);
  std::vector<A2aMessage> out(std::make_move_iterator(q_.begin()), std::make_move_iterator(q_.end()));
  q_.clear();
  return out;
}

std::size_t Inbox::size() const {
  std::lock_guard lock(mu_);
  return q_.size();
}

MessageBus::MessageBus(Clock clock, double dead_letter_timeout_s)
    : clock_(std::move(clock)), timeout_s_(dead_letter_timeout_s) {
  if (!clock_) throw std::invalid_argument("MessageBus needs a clock");
}

std::shared_ptr<Inbox> MessageBus::subscribe(const std::string& agent_id) {
  std::lock_guard lock(mu_);
  auto& slot = inboxes_[agent_id];
  if (!slot) slot = std::shared_ptr<Inbox>(new Inbox(agent_id));
  if (auto it = pending_.find(agent_id); it != pending_.end()) {
    for (auto& m : it->second) slot->push(std::move(m));
    pending_.erase(it);
  }
  return slot;
}

bool MessageBus::is_subscribed(const std::string& agent_id) const {
  std::lock_guard lock(mu_);
  return inboxes_.count(agent_id) > 0;
}

void MessageBus::send(A2aMessage msg) {
  msg.validate();
  std::lock_guard lock(mu_);
  msg.timestamp_s = clock_();
  msg.bus_seq = next_seq_++;
  for (const auto& mirror : mirrors_) mirror(msg);
  if (auto it = inboxes_.find(msg.recipient); it != inboxes_.end()) {
    it->second->push(std::move(msg));
  } else {
    pending_[msg.recipient].push_back(std::move(msg));
  }
}

void MessageBus::add_mirror(Mirror m) {
  std::lock_guard lock(mu_);
  mirrors_.push_back(std::move(m));
}

void MessageBus::set_dead_letter_sink(DeadLetterSink s) {
  std::lock_guard lock(mu_);
  dead_sink_ = std::move(s);
}

std::vector<DeadLetter> MessageBus::sweep() {
  std::lock_guard lock(mu_);
  const double now = clock_();
  std::vector<DeadLetter> fresh;
  for (auto it = pending_.begin(); it != pending_.end();) {
    auto& q = it->second;
    while (!q.empty() && now - q.front().timestamp_s >= timeout_s_) {
      fresh.push_back(DeadLetter{std::move(q.front()), now, "recipient " + it->first + " never subscribed"});
      q.pop_front();
    }
    it = q.empty() ? pending_.erase(it) : std::next(it);
  }
  for (const auto& d : fresh) {
    if (dead_sink_) dead_sink_(d);
    dead_.push_back(d);
  }
  return fresh;
}

std::vector<DeadLetter> MessageBus::dead_letters() const {
  std::lock_guard lock(mu_);
  return dead_;
}

std::size_t MessageBus::pending_count() const {
  std::lock_guard lock(mu_);
  std::size_t n = 0;
  for (const auto& [_, q] : pending_) n += q.size();
  return n;
}

}  // namespace agentran::fabric
