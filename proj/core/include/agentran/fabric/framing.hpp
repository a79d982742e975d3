#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace agentran::fabric {

// Stream framing: 4-byte big-endian payload length, then the payload.
inline constexpr std::size_t kMaxFrameBytes = 16u * 1024u * 1024u;

class FramingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string encode_frame(std::string_view payload);

// Incremental decoder; feed arbitrary chunks, pop complete payloads.
class FrameDecoder {
 public:
  void feed(std::string_view bytes);
  std::optional<std::string> next();
  std::size_t buffered() const { return buf_.size(); }

 private:
  std::string buf_;
  std::deque<std::string> ready_;
};

}  // namespace agentran::fabric
