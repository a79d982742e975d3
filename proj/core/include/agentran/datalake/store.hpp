#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace agentran::datalake {

using Json = nlohmann::json;

enum class RecordKind { kKpi, kDecision, kMessage, kViolation, kLifecycle };

std::string to_string(RecordKind k);
RecordKind record_kind_from_string(const std::string& s);

struct LogRecord {
  std::uint64_t seq = 0;
  double timestamp_s = 0.0;
  RecordKind kind = RecordKind::kLifecycle;
  Json payload;
  std::optional<std::string> agent_id;

  friend bool operator==(const LogRecord&, const LogRecord&) = default;
};

void to_json(Json& j, const LogRecord& r);
void from_json(const Json& j, LogRecord& r);

struct StoreOptions {
  std::size_t segment_max_records = 4096;
  bool fsync = true;
  std::size_t retry_capacity = 1000;
};

// Raised when a record could not be made durable. The record is kept in the
// retry buffer (buffered == true) unless that buffer is full.
class StoreWriteError : public std::runtime_error {
 public:
  StoreWriteError(const std::string& what, std::uint64_t seq, bool buffered)
      : std::runtime_error(what), seq_(seq), buffered_(buffered) {}
  std::uint64_t seq() const noexcept { return seq_; }
  bool buffered() const noexcept { return buffered_; }

 private:
  std::uint64_t seq_;
  bool buffered_;
};

// Append-only NDJSON log split into numbered segment files, with an index
// file mapping each segment to its first seq. A torn trailing line (crash
// mid-write) is ignored on reopen.
class LogStore {
 public:
  using Listener = std::function<void(const LogRecord&)>;

  explicit LogStore(std::filesystem::path dir, StoreOptions opts = {});
  ~LogStore();
  LogStore(const LogStore&) = delete;
  LogStore& operator=(const LogStore&) = delete;

  // Durable before return. Buffered records are retried first, in seq order.
  std::uint64_t append(RecordKind kind, double timestamp_s, Json payload,
                       std::optional<std::string> agent_id = std::nullopt);
  // Retries buffered records; returns how many are still pending.
  std::size_t flush();

  // Records in [t0, t1] whose kind is in kinds (all kinds if empty), seq order.
  std::vector<LogRecord> query_range(const std::set<RecordKind>& kinds, double t0, double t1) const;
  std::vector<LogRecord> records_since(std::uint64_t after_seq) const;
  std::vector<LogRecord> all() const;

  std::uint64_t last_seq() const;
  std::size_t size() const;
  std::size_t pending() const;
  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path segment_path(std::size_t index) const;
  std::size_t segment_count() const;

  // Called (under the store lock) after each durable append.
  void add_listener(Listener l);

 private:
  void load();
  void write_durable(const LogRecord& r);  // throws on failure
  void open_segment(std::size_t index, std::uint64_t first_seq);
  void close_segment();

  std::filesystem::path dir_;
  StoreOptions opts_;
  mutable std::mutex mu_;
  std::vector<LogRecord> records_;
  std::deque<LogRecord> retry_;
  std::uint64_t next_seq_ = 1;
  int fd_ = -1;
  std::size_t segment_index_ = 0;
  std::size_t segment_records_ = 0;
  std::vector<std::pair<std::size_t, std::uint64_t>> index_;
  std::vector<Listener> listeners_;
};

}  // namespace agentran::datalake
