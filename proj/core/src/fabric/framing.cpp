#include "agentran/fabric/framing.hpp"

namespace agentran::fabric {

std::string encode_frame(std::string_view payload) {
  if (payload.size() > kMaxFrameBytes) throw FramingError("frame exceeds maximum size");
  const auto n = static_cast<std::uint32_t>(payload.size());
  std::string out;
  out.reserve(4 + payload.size());
  out.push_back(static_cast<char>((n >> 24) & 0xff));
  out.push_back(static_cast<char>((n >> 16) & 0xff));
  out.push_back(static_cast<char>((n >> 8) & 0xff));
  out.push_back(static_cast<char>(n & 0xff));
  out.append(payload);
  return out;
}

void FrameDecoder::feed(std::string_view bytes) {
  buf_.append(bytes);
  for (;;) {
    if (buf_.size() < 4) return;
    const auto b = [&](int i) { return static_cast<std::uint32_t>(static_cast<unsigned char>(buf_[i])); };
    const std::uint32_t n = (b(0) << 24) | (b(1) << 16) | (b(2) << 8) | b(3);
    if (n > kMaxFrameBytes) throw FramingError("declared frame length " + std::to_string(n) + " too large");
    if (buf_.size() < 4 + static_cast<std::size_t>(n)) return;
    ready_.push_back(buf_.substr(4, n));
    buf_.erase(0, 4 + n);
  }
}

std::optional<std::string> FrameDecoder::next() {
  if (ready_.empty()) return std::nullopt;
  std::string s = std::move(ready_.front());
  ready_.pop_front();
  return s;
}

}  // namespace agentran::fabric
