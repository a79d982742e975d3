#include "agentran/model/kpi_window.hpp"

#include <cstdint>
#include <cstdio>

namespace agentran::model {

KpiWindow::KpiWindow(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw std::invalid_argument("KpiWindow capacity must be positive");
}

void KpiWindow::push(const KpiSnapshot& s) {
  if (!samples_.empty() && !(s.timestamp_s > samples_.back().timestamp_s))
    throw OrderingError("snapshot at t=" + std::to_string(s.timestamp_s) + " is not newer than t=" +
                        std::to_string(samples_.back().timestamp_s));
  samples_.push_back(s);
  while (samples_.size() > capacity_) samples_.pop_front();
}

const KpiSnapshot& KpiWindow::latest() const {
  if (samples_.empty()) throw std::logic_error("KpiWindow is empty");
  return samples_.back();
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string KpiWindow::digest() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& s : samples_) arr.push_back(s);
  return fnv1a_hex(arr.dump());
}

KpiWindow update_kpi_window(KpiWindow w, const KpiSnapshot& s) {
  w.push(s);
  return w;
}

}  // namespace agentran::model
