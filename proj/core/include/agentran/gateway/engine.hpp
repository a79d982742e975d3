#pragma once

#include <atomic>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "agentran/agents/deployment.hpp"
#include "agentran/datalake/analytics.hpp"
#include "agentran/datalake/store.hpp"
#include "agentran/fabric/bus.hpp"
#include "agentran/fabric/tcp.hpp"
#include "agentran/gateway/scenario.hpp"

namespace agentran::gateway {

struct SliceSeries {
  int slice_id = 0;
  std::string name;
  std::vector<double> per_ue_throughput_bps;
  std::vector<double> aggregate_throughput_bps;
  std::vector<double> throttle_limit_bps;

  friend bool operator==(const SliceSeries&, const SliceSeries&) = default;
};

struct UeSeries {
  int ue_id = 0;
  int slice_id = 0;
  std::vector<double> throughput_bps;
  std::vector<double> snr_target_db;
  std::vector<double> tx_power_dbm;
  std::vector<double> power_draw_mw;

  friend bool operator==(const UeSeries&, const UeSeries&) = default;
};

struct PhaseSeries {
  int index = 0;
  std::string intent_id;
  double start_s = 0.0;
  double end_s = 0.0;
  std::vector<double> time_s;  // KPI sample timestamps in (start, end]
  std::vector<SliceSeries> slices;
  std::vector<UeSeries> ues;
  // KPI periods from injection to the first sample meeting every minimum;
  // empty when the intent has no minimum or it is never met.
  std::optional<int> latency_cycles;

  friend bool operator==(const PhaseSeries&, const PhaseSeries&) = default;
};

struct ScenarioResult {
  std::string scenario;
  std::uint64_t seed = 0;
  double duration_s = 0.0;
  double kpi_period_s = 0.0;
  std::vector<PhaseSeries> phases;
  std::vector<datalake::ViolationReport> violations;
  std::map<std::string, std::size_t> decisions_per_agent;
  std::size_t messages = 0;
  std::size_t samples = 0;

  bool empty() const { return samples == 0; }
  friend bool operator==(const ScenarioResult&, const ScenarioResult&) = default;
};

void to_json(Json& j, const SliceSeries& s);
void from_json(const Json& j, SliceSeries& s);
void to_json(Json& j, const UeSeries& s);
void from_json(const Json& j, UeSeries& s);
void to_json(Json& j, const PhaseSeries& p);
void from_json(const Json& j, PhaseSeries& p);
void to_json(Json& j, const ScenarioResult& r);
void from_json(const Json& j, ScenarioResult& r);

// Rebuilds the result from data-lake records alone, so a replayed log yields
// the same result as the live run.
ScenarioResult result_from_log(const ScenarioConfig& cfg, std::span<const datalake::LogRecord> records);

struct EngineOptions {
  std::filesystem::path datalake_dir;
  datalake::StoreOptions store;
  std::optional<std::string> reasoner;  // overrides every agent's backend
  agents::ReasonerFactory reasoner_factory;  // replaces the descriptor-based factory
  bool tcp_tools = false;  // serve the dApps over loopback TCP instead of in-process
};

// Shared virtual clock over simulator slots and agent cycles. Each step
// advances one KPI period: simulate, inject due intents, let agents handle
// messages, record the KPI sample, run due agent cycles, handle the replies.
class Engine {
 public:
  Engine(ScenarioConfig cfg, EngineOptions opts);
  ~Engine();
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  void step();
  bool done() const;  // virtual time reached duration_s
  // Steps until done (or until keep_going returns false). With compression
  // > 0 each step waits until virtual time / compression of wall time passed.
  void run(double compression = 0.0, const std::function<bool()>& keep_going = {});
  // Records violations still open and a closing lifecycle record.
  void finish();

  double now() const { return now_s_.load(); }
  std::size_t steps() const { return steps_; }
  const ScenarioConfig& config() const { return cfg_; }
  datalake::LogStore& store() { return *store_; }
  const datalake::LogStore& store() const { return *store_; }
  agents::AgentHierarchy& hierarchy() { return *hierarchy_; }
  fabric::MessageBus& bus() { return *bus_; }

  // Thread-safe. Queues an operator intent for the next step; fills in a
  // missing id and returns it. Throws model::IntentError on invalid input.
  std::string submit_intent(model::Intent intent);
  std::vector<sim::KpiSnapshot> latest_kpis(std::size_t n) const;
  Json agents_snapshot() const;

  ScenarioResult result() const;

 private:
  void inject(const model::Intent& intent);
  void record_kpi(const sim::KpiSnapshot& snap);
  void monitor_violations(bool closing);

  ScenarioConfig cfg_;
  EngineOptions opts_;
  std::atomic<double> now_s_{0.0};
  std::size_t steps_ = 0;
  std::size_t next_phase_ = 0;
  std::uint64_t slots_per_period_ = 0;

  std::unique_ptr<datalake::LogStore> store_;
  std::unique_ptr<fabric::MessageBus> bus_;
  std::unique_ptr<sim::Simulator> sim_;
  std::mutex sim_mu_;
  std::map<std::string, std::shared_ptr<fabric::ToolServer>> dapps_;
  std::vector<std::unique_ptr<fabric::TcpRpcHost>> hosts_;
  std::unique_ptr<agents::AgentHierarchy> hierarchy_;
  std::shared_ptr<fabric::Inbox> operator_inbox_;

  // Violation monitoring for the most recent intent.
  std::optional<model::Intent> monitored_;
  std::vector<datalake::LogRecord> monitored_kpis_;
  std::set<std::tuple<std::string, int, double>> reported_;

  mutable std::mutex shared_mu_;  // guards everything below
  std::deque<model::Intent> submitted_;
  std::set<std::string> intent_ids_;
  std::size_t submitted_count_ = 0;
  std::deque<sim::KpiSnapshot> recent_kpis_;
  Json agents_snapshot_ = Json::array();
};

struct RunOptions {
  std::filesystem::path out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> reasoner;
  std::optional<double> compression;  // pace the run; unpaced when empty
  datalake::StoreOptions store;
  agents::ReasonerFactory reasoner_factory;
};

// Validates first (named-field error, nothing written), then runs the whole
// scenario and writes out_dir/{result.json, kpis.csv, datalake/}.
ScenarioResult run_scenario(ScenarioConfig cfg, const RunOptions& opts);

}  // namespace agentran::gateway
