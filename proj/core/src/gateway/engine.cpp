#include "agentran/gateway/engine.hpp"

#include <chrono>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <thread>

#include "agentran/agents/dapp.hpp"
#include "agentran/datalake/export.hpp"
#include "agentran/reasoner/intent_parser.hpp"

namespace agentran::gateway {

using datalake::LogRecord;
using datalake::RecordKind;

namespace {

constexpr double kEps = 1e-9;
constexpr std::size_t kRecentKpis = 1024;
const char* kSimSource = "ran-sim";

}  // namespace

void to_json(Json& j, const SliceSeries& s) {
  j = Json{{"slice_id", s.slice_id},
           {"name", s.name},
           {"per_ue_throughput_bps", s.per_ue_throughput_bps},
           {"aggregate_throughput_bps", s.aggregate_throughput_bps},
           {"throttle_limit_bps", s.throttle_limit_bps}};
}

void from_json(const Json& j, SliceSeries& s) {
  s.slice_id = j.at("slice_id").get<int>();
  s.name = j.at("name").get<std::string>();
  s.per_ue_throughput_bps = j.at("per_ue_throughput_bps").get<std::vector<double>>();
  s.aggregate_throughput_bps = j.at("aggregate_throughput_bps").get<std::vector<double>>();
  s.throttle_limit_bps = j.at("throttle_limit_bps").get<std::vector<double>>();
}

void to_json(Json& j, const UeSeries& s) {
  j = Json{{"ue_id", s.ue_id},
           {"slice_id", s.slice_id},
           {"throughput_bps", s.throughput_bps},
           {"snr_target_db", s.snr_target_db},
           {"tx_power_dbm", s.tx_power_dbm},
           {"power_draw_mw", s.power_draw_mw}};
}

void from_json(const Json& j, UeSeries& s) {
  s.ue_id = j.at("ue_id").get<int>();
  s.slice_id = j.at("slice_id").get<int>();
  s.throughput_bps = j.at("throughput_bps").get<std::vector<double>>();
  s.snr_target_db = j.at("snr_target_db").get<std::vector<double>>();
  s.tx_power_dbm = j.at("tx_power_dbm").get<std::vector<double>>();
  s.power_draw_mw = j.at("power_draw_mw").get<std::vector<double>>();
}

void to_json(Json& j, const PhaseSeries& p) {
  j = Json{{"index", p.index},     {"intent_id", p.intent_id}, {"start_s", p.start_s}, {"end_s", p.end_s},
           {"time_s", p.time_s},   {"slices", p.slices},       {"ues", p.ues},
           {"latency_cycles", p.latency_cycles ? Json(*p.latency_cycles) : Json()}};
}

void from_json(const Json& j, PhaseSeries& p) {
  p.index = j.at("index").get<int>();
  p.intent_id = j.at("intent_id").get<std::string>();
  p.start_s = j.at("start_s").get<double>();
  p.end_s = j.at("end_s").get<double>();
  p.time_s = j.at("time_s").get<std::vector<double>>();
  p.slices = j.at("slices").get<std::vector<SliceSeries>>();
  p.ues = j.at("ues").get<std::vector<UeSeries>>();
  if (j.contains("latency_cycles") && !j["latency_cycles"].is_null()) p.latency_cycles = j["latency_cycles"].get<int>();
  else p.latency_cycles.reset();
}

void to_json(Json& j, const ScenarioResult& r) {
  j = Json{{"scenario", r.scenario},
           {"seed", r.seed},
           {"duration_s", r.duration_s},
           {"kpi_period_s", r.kpi_period_s},
           {"phases", r.phases},
           {"violations", r.violations},
           {"decisions_per_agent", r.decisions_per_agent},
           {"messages", r.messages},
           {"samples", r.samples}};
}

void from_json(const Json& j, ScenarioResult& r) {
  r.scenario = j.at("scenario").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.duration_s = j.at("duration_s").get<double>();
  r.kpi_period_s = j.at("kpi_period_s").get<double>();
  r.phases = j.at("phases").get<std::vector<PhaseSeries>>();
  r.violations = j.at("violations").get<std::vector<datalake::ViolationReport>>();
  r.decisions_per_agent = j.at("decisions_per_agent").get<std::map<std::string, std::size_t>>();
  r.messages = j.at("messages").get<std::size_t>();
  r.samples = j.at("samples").get<std::size_t>();
}

ScenarioResult result_from_log(const ScenarioConfig& cfg, std::span<const LogRecord> records) {
  ScenarioResult r;
  r.scenario = cfg.name;
  r.seed = cfg.seed;
  r.duration_s = cfg.duration_s;
  r.kpi_period_s = cfg.kpi_period_s;
  for (std::size_t i = 0; i < cfg.phases.size(); ++i) {
    PhaseSeries p;
    p.index = static_cast<int>(i);
    p.intent_id = cfg.phases[i].intent_id;
    p.start_s = cfg.phases[i].start_s;
    p.end_s = i + 1 < cfg.phases.size() ? cfg.phases[i + 1].start_s : cfg.duration_s;
    for (const auto& s : cfg.slices) p.slices.push_back(SliceSeries{s.config.slice_id, s.config.name, {}, {}, {}});
    for (const auto& u : cfg.ues) {
      UeSeries us;
      us.ue_id = u.initial.ue_id;
      us.slice_id = u.initial.slice_id;
      p.ues.push_back(std::move(us));
    }
    r.phases.push_back(std::move(p));
  }

  for (const auto& rec : records) {
    switch (rec.kind) {
      case RecordKind::kKpi: {
        const int idx = cfg.phase_at(rec.timestamp_s);
        if (idx < 0) break;
        const auto snap = rec.payload.get<sim::KpiSnapshot>();
        auto& p = r.phases[static_cast<std::size_t>(idx)];
        p.time_s.push_back(rec.timestamp_s);
        p.end_s = std::max(p.end_s, rec.timestamp_s);
        for (auto& s : p.slices) {
          const auto* k = snap.slice(s.slice_id);
          s.per_ue_throughput_bps.push_back(k ? k->per_ue_throughput_bps() : 0.0);
          s.aggregate_throughput_bps.push_back(k ? k->aggregate_throughput_bps : 0.0);
          s.throttle_limit_bps.push_back(k ? k->throttle_limit_bps : 0.0);
        }
        for (auto& u : p.ues) {
          const auto* k = snap.ue(u.ue_id);
          u.throughput_bps.push_back(k ? k->throughput_bps : 0.0);
          u.snr_target_db.push_back(k ? k->snr_target_db : 0.0);
          u.tx_power_dbm.push_back(k ? k->tx_power_dbm : 0.0);
          u.power_draw_mw.push_back(k ? k->power_draw_mw : 0.0);
        }
        ++r.samples;
        break;
      }
      case RecordKind::kDecision:
        ++r.decisions_per_agent[rec.agent_id.value_or("")];
        break;
      case RecordKind::kMessage:
        ++r.messages;
        break;
      case RecordKind::kViolation:
        r.violations.push_back(rec.payload.get<datalake::ViolationReport>());
        break;
      case RecordKind::kLifecycle:
        break;
    }
  }

  for (std::size_t i = 0; i < r.phases.size(); ++i) {
    auto& p = r.phases[i];
    const auto& reqs = cfg.phases[i].requirements;
    const bool has_min = std::any_of(reqs.begin(), reqs.end(), [](const auto& q) { return q.min_throughput_bps; });
    if (!has_min) continue;
    for (std::size_t k = 0; k < p.time_s.size(); ++k) {
      bool ok = true;
      for (const auto& q : reqs) {
        if (!q.min_throughput_bps) continue;
        for (const auto& s : p.slices)
          if (s.slice_id == q.slice_id && s.per_ue_throughput_bps[k] < *q.min_throughput_bps) ok = false;
      }
      if (ok) {
        p.latency_cycles = static_cast<int>(std::llround((p.time_s[k] - p.start_s) / cfg.kpi_period_s));
        break;
      }
    }
  }
  return r;
}

Engine::Engine(ScenarioConfig cfg, EngineOptions opts) : cfg_(std::move(cfg)), opts_(std::move(opts)) {
  if (opts_.reasoner) {
    try {
      agents::set_reasoner_backend(cfg_.deployment, *opts_.reasoner);
    } catch (const agents::DeploymentError& e) {
      throw ScenarioError(e.field(), e.what());
    }
  }
  cfg_.validate();
  if (opts_.datalake_dir.empty()) throw ScenarioError("datalake_dir", "must be given");
  slots_per_period_ = static_cast<std::uint64_t>(std::llround(cfg_.kpi_period_s / cfg_.cell.slot_duration_s));
  for (const auto& p : cfg_.phases) intent_ids_.insert(p.intent_id);

  store_ = std::make_unique<datalake::LogStore>(opts_.datalake_dir, opts_.store);
  bus_ = std::make_unique<fabric::MessageBus>([this] { return now(); });
  bus_->add_mirror([this](const fabric::A2aMessage& m) {
    try {
      store_->append(RecordKind::kMessage, m.timestamp_s, Json(m), m.sender);
    } catch (const datalake::StoreWriteError& e) {
      if (!e.buffered()) throw;
    }
  });
  bus_->set_dead_letter_sink([this](const fabric::DeadLetter& d) {
    store_->append(RecordKind::kLifecycle, d.expired_at_s,
                   Json{{"event", "dead_letter"}, {"details", {{"message", d.message}, {"reason", d.reason}}}},
                   std::string("bus"));
  });

  sim_ = std::make_unique<sim::Simulator>(cfg_.sim_params(), cfg_.initial_state(), cfg_.seed);
  const agents::SimAccess access{sim_.get(), &sim_mu_};
  dapps_["pc-dapp"] = agents::make_dapp("pc-dapp", agents::DappKind::kPowerControl, access);
  dapps_["ra-dapp"] = agents::make_dapp("ra-dapp", agents::DappKind::kResourceAllocation, access);

  if (opts_.tcp_tools) {
    std::map<std::string, std::string> rewrite;
    for (const auto& [name, srv] : dapps_) {
      auto host = std::make_unique<fabric::TcpRpcHost>([srv = srv](std::string_view f) { return srv->handle_frame(f); });
      rewrite["inproc://" + name] = fmt::format("tcp://127.0.0.1:{}", host->port());
      hosts_.push_back(std::move(host));
    }
    for (auto& a : cfg_.deployment.agents)
      for (auto& addr : a.tool_servers)
        if (auto it = rewrite.find(addr); it != rewrite.end()) addr = it->second;
  }

  agents::AgentEnv env;
  env.bus = bus_.get();
  env.now = [this] { return now(); };
  env.record = [this](RecordKind kind, double t, Json payload, const std::string& agent) {
    store_->append(kind, t, std::move(payload), agent);
  };
  env.reasoner = opts_.reasoner_factory;
  env.connect = agents::make_connector(dapps_);
  env.slices = cfg_.slice_infos();
  env.scenario_text = cfg_.description;
  operator_inbox_ = bus_->subscribe("operator");
  hierarchy_ = std::make_unique<agents::AgentHierarchy>(cfg_.deployment, env);

  store_->append(RecordKind::kLifecycle, 0.0,
                 Json{{"event", "run_started"},
                      {"details", {{"scenario", cfg_.name}, {"seed", cfg_.seed}, {"duration_s", cfg_.duration_s}}}},
                 std::string("gateway"));
  agents_snapshot_ = hierarchy_->status();
}

Engine::~Engine() {
  for (auto& h : hosts_) h->stop();
}

bool Engine::done() const { return steps_ > cfg_.sample_count(); }

void Engine::inject(const model::Intent& in) {
  model::Intent intent = in;
  intent.timestamp_s = now();
  monitor_violations(true);
  monitored_.reset();
  monitored_kpis_.clear();
  reported_.clear();
  model::Intent watched = intent;
  if (watched.requirements.empty()) watched.requirements = reasoner::parse_intent_text(watched.body_text, cfg_.slice_infos());
  if (std::any_of(watched.requirements.begin(), watched.requirements.end(),
                  [](const auto& r) { return r.min_throughput_bps.has_value(); }))
    monitored_ = watched;

  fabric::A2aMessage m;
  m.sender = "operator";
  m.recipient = hierarchy_->manager_id();
  m.kind = fabric::MessageKind::kIntent;
  m.body_text = intent.body_text;
  m.body_structured = Json{{"intent", intent}};
  m.correlation_id = intent.intent_id;
  bus_->send(std::move(m));
}

void Engine::record_kpi(const sim::KpiSnapshot& snap) {
  const Json payload = snap;
  const auto seq = store_->append(RecordKind::kKpi, snap.timestamp_s, payload, std::string(kSimSource));
  if (monitored_) monitored_kpis_.push_back(LogRecord{seq, snap.timestamp_s, RecordKind::kKpi, payload, kSimSource});
  std::lock_guard lock(shared_mu_);
  recent_kpis_.push_back(snap);
  if (recent_kpis_.size() > kRecentKpis) recent_kpis_.pop_front();
}

void Engine::monitor_violations(bool closing) {
  if (!monitored_ || monitored_kpis_.empty()) return;
  const auto reports = datalake::detect_violations(monitored_kpis_, *monitored_, cfg_.kpi_period_s, now());
  std::vector<datalake::ViolationReport> fresh;
  for (const auto& v : reports) {
    if (!v.resolved && !closing) continue;
    if (reported_.insert({v.intent_id, v.slice_id, v.start_s}).second) fresh.push_back(v);
  }
  if (!fresh.empty()) datalake::record_violations(*store_, fresh);
}

void Engine::step() {
  const double t = static_cast<double>(steps_) * cfg_.kpi_period_s;
  if (steps_ > 0) {
    std::lock_guard lock(sim_mu_);
    sim_->run_slots(slots_per_period_);
  }
  now_s_.store(t);

  while (next_phase_ < cfg_.phases.size() && cfg_.phases[next_phase_].start_s <= t + kEps)
    inject(cfg_.phases[next_phase_++].intent());
  std::deque<model::Intent> queued;
  {
    std::lock_guard lock(shared_mu_);
    queued.swap(submitted_);
  }
  for (const auto& i : queued) inject(i);
  hierarchy_->pump_until_idle();

  if (steps_ > 0) {
    sim::KpiSnapshot snap;
    {
      std::lock_guard lock(sim_mu_);
      snap = sim_->collect_kpis(cfg_.kpi_period_s);
    }
    snap.timestamp_s = t;
    record_kpi(snap);
    monitor_violations(false);
  }

  hierarchy_->tick(t);
  hierarchy_->pump_until_idle();
  operator_inbox_->drain();
  bus_->sweep();
  {
    Json status = hierarchy_->status();
    std::lock_guard lock(shared_mu_);
    agents_snapshot_ = std::move(status);
  }
  ++steps_;
}

void Engine::run(double compression, const std::function<bool()>& keep_going) {
  const auto wall0 = std::chrono::steady_clock::now();
  const double virt0 = now();
  while (!done() && (!keep_going || keep_going())) {
    step();
    if (compression > 0.0) {
      const auto due = wall0 + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                   std::chrono::duration<double>((now() - virt0) / compression));
      std::this_thread::sleep_until(due);
    }
  }
}

void Engine::finish() {
  monitor_violations(true);
  store_->append(RecordKind::kLifecycle, now(),
                 Json{{"event", "run_finished"}, {"details", {{"steps", steps_}, {"records", store_->size()}}}},
                 std::string("gateway"));
  store_->flush();
}

std::string Engine::submit_intent(model::Intent intent) {
  std::set<int> known;
  for (const auto& s : cfg_.slices) known.insert(s.config.slice_id);
  for (std::size_t i = 0; i < intent.requirements.size(); ++i)
    if (!known.count(intent.requirements[i].slice_id))
      throw model::IntentError(fmt::format("requirements[{}].slice_id", i),
                               fmt::format("unknown slice {}", intent.requirements[i].slice_id));
  intent.issuer = "operator";
  intent.validate();
  std::lock_guard lock(shared_mu_);
  if (intent.intent_id.empty()) {
    do {
      intent.intent_id = fmt::format("intent-{}", ++submitted_count_);
    } while (intent_ids_.count(intent.intent_id));
  } else if (intent_ids_.count(intent.intent_id)) {
    throw model::IntentError("intent_id", "duplicate intent id " + intent.intent_id);
  }
  intent_ids_.insert(intent.intent_id);
  submitted_.push_back(intent);
  return intent.intent_id;
}

std::vector<sim::KpiSnapshot> Engine::latest_kpis(std::size_t n) const {
  std::lock_guard lock(shared_mu_);
  const std::size_t k = std::min(n, recent_kpis_.size());
  return {recent_kpis_.end() - static_cast<std::ptrdiff_t>(k), recent_kpis_.end()};
}

Json Engine::agents_snapshot() const {
  std::lock_guard lock(shared_mu_);
  return agents_snapshot_;
}

ScenarioResult Engine::result() const {
  const auto records = store_->all();
  return result_from_log(cfg_, records);
}

ScenarioResult run_scenario(ScenarioConfig cfg, const RunOptions& opts) {
  if (opts.seed) cfg.seed = *opts.seed;
  if (opts.reasoner) {
    try {
      agents::set_reasoner_backend(cfg.deployment, *opts.reasoner);
    } catch (const agents::DeploymentError& e) {
      throw ScenarioError(e.field(), e.what());
    }
  }
  cfg.validate();
  if (opts.compression && !(*opts.compression >= 1.0)) throw ScenarioError("compress", "must be >= 1");
  if (opts.out_dir.empty()) throw ScenarioError("out", "an output directory is required");
  const auto lake = opts.out_dir / "datalake";
  if (std::filesystem::exists(lake) && !std::filesystem::is_empty(lake))
    throw ScenarioError("out", lake.string() + " already holds a data lake");
  std::filesystem::create_directories(lake);

  EngineOptions eo;
  eo.datalake_dir = lake;
  eo.store = opts.store;
  eo.reasoner_factory = opts.reasoner_factory;
  Engine engine(cfg, eo);
  engine.run(opts.compression.value_or(0.0));
  engine.finish();

  auto result = engine.result();
  {
    std::ofstream out(opts.out_dir / "result.json");
    out << Json(result).dump(2) << '\n';
    if (!out) throw std::runtime_error("cannot write " + (opts.out_dir / "result.json").string());
  }
  {
    const auto records = engine.store().all();
    std::ofstream csv(opts.out_dir / "kpis.csv");
    datalake::export_kpi_csv(records, csv);
    if (!csv) throw std::runtime_error("cannot write " + (opts.out_dir / "kpis.csv").string());
  }
  return result;
}

}  // namespace agentran::gateway
