#pragma once

#include <cstddef>
#include <deque>
#include <stdexcept>
#include <string>

#include "agentran/sim/types.hpp"

namespace agentran::model {

using sim::KpiSnapshot;

class OrderingError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Rolling window of the most recent snapshots, oldest first.
class KpiWindow {
 public:
  static constexpr std::size_t kDefaultCapacity = 10;

  explicit KpiWindow(std::size_t capacity = kDefaultCapacity);

  // Throws OrderingError unless s is strictly newer than the latest sample.
  void push(const KpiSnapshot& s);

  const std::deque<KpiSnapshot>& samples() const { return samples_; }
  const KpiSnapshot& latest() const;
  bool empty() const { return samples_.empty(); }
  std::size_t size() const { return samples_.size(); }
  std::size_t capacity() const { return capacity_; }

  // Hex FNV-1a over the serialized samples.
  std::string digest() const;

 private:
  std::size_t capacity_;
  std::deque<KpiSnapshot> samples_;
};

// Functional form: returns a copy with s appended.
KpiWindow update_kpi_window(KpiWindow w, const KpiSnapshot& s);

std::string fnv1a_hex(const std::string& bytes);

}  // namespace agentran::model
