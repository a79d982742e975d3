#include "agentran/datalake/store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>

#include <fmt/format.h>

namespace agentran::datalake {

namespace fs = std::filesystem;

std::string to_string(RecordKind k) {
  switch (k) {
    case RecordKind::kKpi: return "kpi";
    case RecordKind::kDecision: return "decision";
    case RecordKind::kMessage: return "message";
    case RecordKind::kViolation: return "violation";
    case RecordKind::kLifecycle: return "lifecycle";
  }
  return "lifecycle";
}

RecordKind record_kind_from_string(const std::string& s) {
  if (s == "kpi") return RecordKind::kKpi;
  if (s == "decision") return RecordKind::kDecision;
  if (s == "message") return RecordKind::kMessage;
  if (s == "violation") return RecordKind::kViolation;
  if (s == "lifecycle") return RecordKind::kLifecycle;
  throw std::invalid_argument("unknown record kind " + s);
}

void to_json(Json& j, const LogRecord& r) {
  j = Json{{"seq", r.seq}, {"timestamp_s", r.timestamp_s}, {"kind", to_string(r.kind)}, {"payload", r.payload}};
  j["agent_id"] = r.agent_id ? Json(*r.agent_id) : Json(nullptr);
}

void from_json(const Json& j, LogRecord& r) {
  r.seq = j.at("seq").get<std::uint64_t>();
  r.timestamp_s = j.at("timestamp_s").get<double>();
  r.kind = record_kind_from_string(j.at("kind").get<std::string>());
  r.payload = j.at("payload");
  if (j.contains("agent_id") && j["agent_id"].is_string()) r.agent_id = j["agent_id"].get<std::string>();
  else r.agent_id.reset();
}

LogStore::LogStore(fs::path dir, StoreOptions opts) : dir_(std::move(dir)), opts_(opts) {
  if (opts_.segment_max_records == 0) throw std::invalid_argument("segment_max_records must be positive");
  fs::create_directories(dir_);
  load();
}

LogStore::~LogStore() { close_segment(); }

fs::path LogStore::segment_path(std::size_t index) const {
  return dir_ / fmt::format("segment-{:06d}.ndjson", index);
}

std::size_t LogStore::segment_count() const {
  std::lock_guard lock(mu_);
  return index_.size();
}

void LogStore::load() {
  // Segments are discovered from disk; the index file is rewritten to match.
  std::vector<std::size_t> found;
  std::size_t highest = 0;
  for (const auto& e : fs::directory_iterator(dir_)) {
    const std::string name = e.path().filename().string();
    unsigned idx = 0;
    if (std::sscanf(name.c_str(), "segment-%6u.ndjson", &idx) != 1 || name.size() != 21) continue;
    highest = std::max<std::size_t>(highest, idx);
    if (e.is_regular_file()) found.push_back(idx);  // skip segments redirected to devices
  }
  std::sort(found.begin(), found.end());
  for (std::size_t idx : found) {
    std::ifstream in(segment_path(idx), std::ios::binary);
    std::string line;
    std::uint64_t first = 0;
    while (std::getline(in, line)) {
      if (in.eof()) break;  // no trailing newline: torn write
      LogRecord r;
      try {
        r = Json::parse(line).get<LogRecord>();
      } catch (const std::exception&) {
        break;
      }
      if (!records_.empty() && r.seq <= records_.back().seq) break;
      if (first == 0) first = r.seq;
      records_.push_back(std::move(r));
    }
    if (first != 0) index_.emplace_back(idx, first);
  }
  next_seq_ = records_.empty() ? 1 : records_.back().seq + 1;
  // New writes always start a fresh segment so a torn tail is never appended to.
  segment_index_ = highest;
  segment_records_ = opts_.segment_max_records;
}

void LogStore::close_segment() {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

void LogStore::open_segment(std::size_t index, std::uint64_t first_seq) {
  close_segment();
  const std::string path = segment_path(index).string();
  const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd < 0) throw std::runtime_error(fmt::format("cannot open segment {}: {}", path, std::strerror(errno)));
  fd_ = fd;
  segment_index_ = index;
  segment_records_ = 0;
  index_.emplace_back(index, first_seq);
  std::ofstream idx(dir_ / "index.ndjson", std::ios::trunc);
  for (const auto& [i, s] : index_)
    idx << Json{{"segment", segment_path(i).filename().string()}, {"first_seq", s}}.dump() << '\n';
}

void LogStore::write_durable(const LogRecord& r) {
  if (fd_ < 0 || segment_records_ >= opts_.segment_max_records) open_segment(segment_index_ + 1, r.seq);
  const std::string line = Json(r).dump() + "\n";
  std::size_t off = 0;
  while (off < line.size()) {
    const ssize_t n = ::write(fd_, line.data() + off, line.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw std::runtime_error(fmt::format("write failed: {}", std::strerror(errno)));
    }
    off += static_cast<std::size_t>(n);
  }
  if (opts_.fsync && ::fsync(fd_) != 0 && errno != EINVAL)
    throw std::runtime_error(fmt::format("fsync failed: {}", std::strerror(errno)));
  ++segment_records_;
}

std::size_t LogStore::flush() {
  std::lock_guard lock(mu_);
  while (!retry_.empty()) {
    try {
      write_durable(retry_.front());
    } catch (const std::exception&) {
      // A failed segment is abandoned; a partial line there is dropped on reopen.
      close_segment();
      if (!index_.empty() && index_.back().first == segment_index_ && segment_records_ == 0) index_.pop_back();
      return retry_.size();
    }
    records_.push_back(retry_.front());
    for (const auto& l : listeners_) l(records_.back());
    retry_.pop_front();
  }
  return 0;
}

std::uint64_t LogStore::append(RecordKind kind, double timestamp_s, Json payload,
                               std::optional<std::string> agent_id) {
  flush();
  std::lock_guard lock(mu_);
  LogRecord r{next_seq_, timestamp_s, kind, std::move(payload), std::move(agent_id)};
  if (!retry_.empty()) {
    if (retry_.size() >= opts_.retry_capacity)
      throw StoreWriteError("store unavailable and retry buffer full; record dropped", 0, false);
    ++next_seq_;
    retry_.push_back(std::move(r));
    throw StoreWriteError("store unavailable; record buffered", retry_.back().seq, true);
  }
  try {
    write_durable(r);
  } catch (const std::exception& e) {
    close_segment();
    if (!index_.empty() && index_.back().first == segment_index_ && segment_records_ == 0) index_.pop_back();
    if (retry_.size() >= opts_.retry_capacity)
      throw StoreWriteError(std::string(e.what()) + "; record dropped", 0, false);
    const std::uint64_t seq = r.seq;
    ++next_seq_;
    retry_.push_back(std::move(r));
    throw StoreWriteError(std::string(e.what()) + "; record buffered", seq, true);
  }
  ++next_seq_;
  records_.push_back(std::move(r));
  for (const auto& l : listeners_) l(records_.back());
  return records_.back().seq;
}

std::vector<LogRecord> LogStore::query_range(const std::set<RecordKind>& kinds, double t0, double t1) const {
  if (t0 > t1) throw std::invalid_argument("query_range: t0 must not exceed t1");
  std::lock_guard lock(mu_);
  std::vector<LogRecord> out;
  for (const auto& r : records_)
    if (r.timestamp_s >= t0 && r.timestamp_s <= t1 && (kinds.empty() || kinds.count(r.kind))) out.push_back(r);
  return out;
}

std::vector<LogRecord> LogStore::records_since(std::uint64_t after_seq) const {
  std::lock_guard lock(mu_);
  auto it = std::upper_bound(records_.begin(), records_.end(), after_seq,
                             [](std::uint64_t s, const LogRecord& r) { return s < r.seq; });
  return {it, records_.end()};
}

std::vector<LogRecord> LogStore::all() const {
  std::lock_guard lock(mu_);
  return records_;
}

std::uint64_t LogStore::last_seq() const {
  std::lock_guard lock(mu_);
  return records_.empty() ? 0 : records_.back().seq;
}

std::size_t LogStore::size() const {
  std::lock_guard lock(mu_);
  return records_.size();
}

std::size_t LogStore::pending() const {
  std::lock_guard lock(mu_);
  return retry_.size();
}

void LogStore::add_listener(Listener l) {
  std::lock_guard lock(mu_);
  listeners_.push_back(std::move(l));
}

}  // namespace agentran::datalake
