#pragma once

// Random A2A messages and JSON-RPC envelopes for codec round trips.

#include <random>
#include <string>

#include "agentran/fabric/bus.hpp"

namespace agentran::oracle {

using fabric::Json;

inline std::string random_text(std::mt19937_64& rng, std::size_t max_len) {
  static const std::string alphabet =
      "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789 .,:;-_/\\\"'{}[]\n\t";
  std::uniform_int_distribution<std::size_t> len(1, max_len), pick(0, alphabet.size() - 1);
  std::string s;
  const std::size_t n = len(rng);
  for (std::size_t i = 0; i < n; ++i) s.push_back(alphabet[pick(rng)]);
  // Exercise multi-byte UTF-8 in some bodies.
  if (rng() % 4 == 0) s += "\xc3\xa9\xe2\x86\x92";
  return s;
}

inline Json random_json(std::mt19937_64& rng, int depth) {
  switch (rng() % (depth > 0 ? 7 : 5)) {
    case 0: return nullptr;
    case 1: return static_cast<bool>(rng() % 2);
    case 2: return static_cast<std::int64_t>(rng() % 2000000) - 1000000;
    case 3: return std::uniform_real_distribution<double>(-1e9, 1e9)(rng);
    case 4: return random_text(rng, 12);
    case 5: {
      Json a = Json::array();
      for (int i = 0, n = static_cast<int>(rng() % 4); i < n; ++i) a.push_back(random_json(rng, depth - 1));
      return a;
    }
    default: {
      Json o = Json::object();
      for (int i = 0, n = static_cast<int>(rng() % 4); i < n; ++i)
        o["k" + std::to_string(rng() % 100)] = random_json(rng, depth - 1);
      return o;
    }
  }
}

inline fabric::A2aMessage random_message(std::mt19937_64& rng) {
  using fabric::MessageKind;
  static const MessageKind kinds[] = {MessageKind::kIntent, MessageKind::kSubIntent, MessageKind::kContextReport,
                                      MessageKind::kConstraintReport, MessageKind::kAck};
  fabric::A2aMessage m;
  m.sender = "agent-" + std::to_string(rng() % 16);
  m.recipient = "agent-" + std::to_string(rng() % 16);
  m.kind = kinds[rng() % 5];
  m.body_text = random_text(rng, 200);
  if (rng() % 2) m.body_structured = random_json(rng, 3);
  if (rng() % 2) m.correlation_id = "intent-" + std::to_string(rng() % 1000);
  m.timestamp_s = std::uniform_real_distribution<double>(0, 1e4)(rng);
  m.bus_seq = rng() % 100000;
  return m;
}

}  // namespace agentran::oracle
