// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero when any fails.
#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "agentran/datalake/analytics.hpp"
#include "agentran/fabric/bus.hpp"
#include "agentran/gateway/engine.hpp"
#include "agentran/reasoner/intent_parser.hpp"
#include "agentran/reasoner/rule_engine.hpp"
#include "agentran/sim/control.hpp"
#include "support/fabric_corpus.hpp"
#include "support/guardrail_oracle.hpp"
#include "support/sim_oracle.hpp"
#include "support/violation_oracle.hpp"

namespace fs = std::filesystem;
using namespace agentran;
using Json = nlohmann::json;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Filled by the scenario check and reused by the determinism check.
struct Shared {
  fs::path work;
  gateway::ScenarioResult first;
  bool have_first = false;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double mean(const std::vector<double>& v, std::size_t from = 0) {
  if (v.size() <= from) return 0.0;
  double s = 0.0;
  for (std::size_t i = from; i < v.size(); ++i) s += v[i];
  return s / static_cast<double>(v.size() - from);
}

const gateway::UeSeries* ue_series(const gateway::PhaseSeries& p, int ue_id) {
  for (const auto& u : p.ues)
    if (u.ue_id == ue_id) return &u;
  return nullptr;
}

const gateway::SliceSeries* slice_series(const gateway::PhaseSeries& p, int slice_id) {
  for (const auto& s : p.slices)
    if (s.slice_id == slice_id) return &s;
  return nullptr;
}

Outcome three_phase(Shared& sh) {
  const auto cfg = gateway::default_scenario();
  gateway::RunOptions o;
  o.out_dir = sh.work / "run-a";
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = gateway::run_scenario(cfg, o);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  sh.first = r;
  sh.have_first = true;

  std::vector<std::string> fails;
  if (wall >= 120.0) fails.push_back(fmt::format("run took {:.1f} s", wall));
  if (r.phases.size() != 3) return {false, fmt::format("expected 3 phases, got {}", r.phases.size())};

  // Phase 1: every UE within 10% of the equal share, after a 5 s settle.
  const auto& p1 = r.phases[0];
  std::vector<double> per_ue;
  for (const auto& u : p1.ues) per_ue.push_back(mean(u.throughput_bps, 5));
  const double share = mean(per_ue);
  double worst = 0.0;
  for (double x : per_ue) worst = std::max(worst, std::abs(x - share) / share);
  if (worst > 0.10) fails.push_back(fmt::format("phase 1 deviation {:.1f}% from equal share", worst * 100));

  // Phase 2: MTC reaches 30 Mbit/s within 10 cycles with FWA throttled.
  const auto& p2 = r.phases[1];
  if (!p2.latency_cycles || *p2.latency_cycles > 10)
    fails.push_back(p2.latency_cycles ? fmt::format("phase 2 latency {} cycles", *p2.latency_cycles)
                                      : std::string("phase 2 minimum never met"));
  const auto* mtc2 = slice_series(p2, 2);
  const auto* fwa2 = slice_series(p2, 1);
  double mtc_tail = 0.0, fwa_throttle = 1e9;
  if (mtc2 && fwa2 && !mtc2->aggregate_throughput_bps.empty()) {
    mtc_tail = mean(mtc2->aggregate_throughput_bps, std::min<std::size_t>(10, mtc2->aggregate_throughput_bps.size() - 1));
    fwa_throttle = fwa2->throttle_limit_bps.back();
    if (mtc_tail < 30e6) fails.push_back(fmt::format("phase 2 MTC mean after 10 cycles {:.2f} Mbit/s", mtc_tail / 1e6));
    if (!(fwa_throttle < sim::kMaxThrottleBps)) fails.push_back("phase 2 FWA throttle not reduced");
  } else {
    fails.push_back("phase 2 series missing");
  }

  // Phase 3: MTC transmit power steps down by at most 3 dB per cycle and the
  // modeled draw falls by about 200 mW.
  const auto& p3 = r.phases[2];
  const auto* ue3 = ue_series(p3, 3);
  const auto* ue3_before = ue_series(p2, 3);
  double saved = 0.0, max_drop = 0.0;
  if (ue3 && ue3_before && !ue3->tx_power_dbm.empty() && !ue3_before->power_draw_mw.empty()) {
    double prev = ue3_before->tx_power_dbm.back();
    for (double tx : ue3->tx_power_dbm) {
      max_drop = std::max(max_drop, prev - tx);
      prev = tx;
    }
    saved = ue3_before->power_draw_mw.back() - ue3->power_draw_mw.back();
    if (!(ue3->tx_power_dbm.back() < ue3_before->tx_power_dbm.back())) fails.push_back("phase 3 MTC tx did not decrease");
    if (max_drop > 3.0 + 1e-6) fails.push_back(fmt::format("phase 3 tx drop {:.2f} dB in one cycle", max_drop));
    if (saved < 150.0 || saved > 250.0) fails.push_back(fmt::format("phase 3 saved {:.1f} mW", saved));
  } else {
    fails.push_back("phase 3 series missing");
  }

  std::string detail = fmt::format(
      "wall {:.1f} s; phase 1 max deviation {:.1f}%; phase 2 latency {} cycles, MTC {:.1f} Mbit/s, FWA throttle "
      "{:.1f} Mbit/s; phase 3 max tx drop {:.2f} dB, saved {:.1f} mW",
      wall, worst * 100, p2.latency_cycles ? std::to_string(*p2.latency_cycles) : std::string("-"), mtc_tail / 1e6,
      fwa_throttle / 1e6, max_drop, saved);
  for (const auto& f : fails) detail += "; " + f;
  return {fails.empty(), detail};
}

Outcome guardrail_fuzz() {
  std::mt19937_64 rng(20240611);
  constexpr int kCases = 10000;
  int bad = 0;
  std::string first;
  for (int i = 0; i < kCases; ++i) {
    const auto c = oracle::random_guardrail_case(rng);
    const auto why = oracle::check_guardrail_case(c);
    if (!why.empty() && bad++ == 0) first = fmt::format("case {}: {}", i, why);
  }
  return {bad == 0, fmt::format("{} cases, {} mismatches{}", kCases, bad, first.empty() ? "" : "; " + first)};
}

Outcome decomposition() {
  const auto cfg = gateway::default_scenario();
  const auto slices = cfg.slice_infos();
  reasoner::RuleEngine engine(cfg.deployment.rule_engine);
  int consistent = 0, total = 0;
  std::string why;
  for (const auto& phase : cfg.phases) {
    model::Intent intent;
    intent.intent_id = phase.intent_id;
    intent.body_text = phase.body_text;
    intent.requirements = reasoner::parse_intent_text(phase.body_text, slices);
    reasoner::ReasonerRequest req;
    req.expected = reasoner::OutputKind::kSubIntents;
    req.role = model::AgentRole::kLayerManager;
    req.intent = intent;
    req.slices = slices;
    req.children = {{"pc", model::AgentRole::kPowerControl},
                    {"ul-ra", model::AgentRole::kUlResourceAllocation},
                    {"dl-ra", model::AgentRole::kDlResourceAllocation}};
    std::optional<reasoner::ReasonerOutput> first;
    int ok = 0;
    for (int run = 0; run < 20; ++run) {
      const auto out = engine.decide(reasoner::PromptContext{}, req);
      std::vector<model::SubIntent> subs;
      for (const auto& p : reasoner::sub_intents_of(out)) {
        model::SubIntent s;
        s.target_agent = p.target_agent;
        s.requirements = p.requirements;
        subs.push_back(std::move(s));
      }
      std::vector<const model::SubIntent*> ptrs;
      for (const auto& s : subs) ptrs.push_back(&s);
      if (!first) first = out;
      if (out == *first && model::covers(intent.requirements, ptrs)) ++ok;
      else if (why.empty()) why = fmt::format("{} run {} differs or does not cover", phase.intent_id, run);
    }
    if (ok == 20) ++consistent;
    ++total;
  }
  return {consistent == total && total == 3,
          fmt::format("{}/{} intents decomposed identically and completely in 20/20 runs{}", consistent, total,
                      why.empty() ? "" : "; " + why)};
}

Outcome scheduler_oracle() {
  std::mt19937_64 rng(77);
  constexpr int kStates = 2000;
  int bad = 0;
  for (int i = 0; i < kStates; ++i) {
    auto c = oracle::random_cell(rng, 5, 12);
    const auto got = sim::schedule_uplink(c.state.ues, c.state.slices, c.params.cell);
    std::map<int, int> m;
    for (const auto& a : got) m[a.ue_id] = a.prbs;
    if (m != oracle::oracle_schedule(c.state.ues, c.state.slices, c.params.cell)) ++bad;
  }
  return {bad == 0, fmt::format("{} random states, {} allocation mismatches", kStates, bad)};
}

Outcome tpc_convergence() {
  sim::SimParams p;
  p.channel.walk_step_db = 0;
  p.channel.walk_bound_db = 0;
  int bad = 0, worst_slack = 0;
  std::vector<double> errs;
  for (int i = -200; i <= 200; ++i) errs.push_back(i * 0.1);
  for (double err : errs) {
    sim::UeSpec u;
    u.initial = {1, 1, -err, 0, -5.0, 0, 0, -5.0};
    auto s = sim::CellState::make({u}, {sim::SliceConfig{1, "s", 1e8, 1.0}});
    const int bound = static_cast<int>(std::ceil(std::abs(err))) + 4;
    int converged = -1;
    bool stayed = true;
    for (int slot = 1; slot <= bound + 20; ++slot) {
      auto [next, rec] = sim::step_slot(s, p, 1);
      s = std::move(next);
      const bool in = std::abs(rec.ues[0].snr_db + 5.0) <= 0.5;
      if (converged < 0 && in) converged = slot;
      if (converged > 0 && !in) stayed = false;
    }
    if (converged < 0 || converged > bound || !stayed) ++bad;
    else worst_slack = std::max(worst_slack, converged);
  }
  return {bad == 0, fmt::format("{} initial errors in [-20, 20] dB, {} outside ceil(|e|)+4 slots or unstable, slowest "
                                "{} slots",
                                errs.size(), bad, worst_slack)};
}

Outcome protocol_suite() {
  std::vector<std::string> fails;
  std::mt19937_64 rng(4242);
  int codec_bad = 0;
  for (int i = 0; i < 500; ++i) {
    const auto m = oracle::random_message(rng);
    const auto wire = fabric::encode_envelope(fabric::to_envelope(m));
    const auto back = fabric::message_from_envelope(fabric::decode_envelope(wire));
    if (!(back == m) || fabric::encode_envelope(fabric::to_envelope(back)) != wire) ++codec_bad;
  }
  if (codec_bad) fails.push_back(fmt::format("{} codec round-trip failures", codec_bad));

  auto code_of = [](std::string_view bytes) {
    try {
      fabric::decode_envelope(bytes);
    } catch (const fabric::RpcException& e) {
      return e.code();
    }
    return 0;
  };
  const std::vector<std::pair<std::string, int>> malformed = {
      {"{", fabric::rpc_code::kParseError},
      {"[1]", fabric::rpc_code::kInvalidRequest},
      {R"({"jsonrpc":"2.0","id":1})", fabric::rpc_code::kInvalidRequest},
      {R"({"jsonrpc":"1.0","id":1,"method":"x"})", fabric::rpc_code::kInvalidRequest}};
  for (const auto& [bytes, code] : malformed)
    if (code_of(bytes) != code) fails.push_back(fmt::format("{} -> {}, want {}", bytes, code_of(bytes), code));

  fabric::ToolServer server("probe");
  fabric::ToolDescriptor d{"echo", "", {fabric::ParamSpec{"x", fabric::ParamType::kInteger, "", "", 0.0, 10.0, true}}};
  server.register_tool(d, [](const Json& a) { return a; });
  auto reply_code = [&](const std::string& frame) {
    const auto r = server.handle_frame(frame);
    if (!r) return 1;
    const auto j = Json::parse(*r);
    return j.contains("error") ? j["error"]["code"].get<int>() : 0;
  };
  if (reply_code(R"({"jsonrpc":"2.0","id":1,"method":"nope"})") != fabric::rpc_code::kMethodNotFound)
    fails.push_back("unknown method code");
  if (reply_code(R"({"jsonrpc":"2.0","id":1,"method":"tools/call","params":{"name":"echo","arguments":{"x":11}}})") !=
      fabric::rpc_code::kInvalidParams)
    fails.push_back("invalid params code");
  if (reply_code(R"({"jsonrpc":"2.0","id":1,"method":"tools/call","params":{"name":"echo","arguments":{"x":3}}})") != 0)
    fails.push_back("valid call failed");

  fabric::MessageBus bus([] { return 0.0; });
  auto inbox = bus.subscribe("sink");
  constexpr int kSenders = 8, kPer = 500;
  std::vector<std::thread> threads;
  for (int s = 0; s < kSenders; ++s)
    threads.emplace_back([&, s] {
      for (int i = 0; i < kPer; ++i)
        bus.send(fabric::A2aMessage{"s" + std::to_string(s), "sink", fabric::MessageKind::kAck, std::to_string(i),
                                    std::nullopt, "", 0, 0});
    });
  for (auto& t : threads) t.join();
  std::vector<int> next(kSenders, 0);
  int order_bad = 0, n = 0;
  for (const auto& m : inbox->drain()) {
    const int s = std::stoi(m.sender.substr(1));
    if (std::stoi(m.body_text) != next[s]++) ++order_bad;
    ++n;
  }
  if (order_bad || n != kSenders * kPer) fails.push_back(fmt::format("FIFO: {} of {} out of order", order_bad, n));

  std::string detail = fmt::format("500 codec cases, {} error-code probes, {} concurrent messages", malformed.size() + 3,
                                   kSenders * kPer);
  for (const auto& f : fails) detail += "; " + f;
  return {fails.empty(), detail};
}

Outcome violation_detection() {
  auto series = [](const std::vector<double>& bps) {
    std::vector<datalake::LogRecord> out;
    for (std::size_t i = 0; i < bps.size(); ++i)
      out.push_back(datalake::LogRecord{i + 1, 1.0 + static_cast<double>(i), datalake::RecordKind::kKpi,
                                        Json(oracle::slice_sample(1.0 + static_cast<double>(i), 2, bps[i])),
                                        std::string("ran-sim")});
    return out;
  };
  model::Intent intent;
  intent.intent_id = "emergency";
  intent.body_text = "MTC needs 30 Mbit/s";
  model::SliceRequirement r;
  r.slice_id = 2;
  r.min_throughput_bps = 30e6;
  intent.requirements = {r};

  std::vector<double> dip3(20, 32e6), dip1(20, 32e6);
  dip3[5] = dip3[6] = dip3[7] = 20e6;
  dip1[9] = 1e6;
  const auto rec3 = series(dip3), rec1 = series(dip1);
  const auto v3 = datalake::detect_violations(std::span<const datalake::LogRecord>(rec3), intent, 1.0);
  const auto v1 = datalake::detect_violations(std::span<const datalake::LogRecord>(rec1), intent, 1.0);
  const bool ok3 = v3.size() == 1 && v3[0].start_s == 6.0 && v3[0].end_s == 8.0 && v3[0].resolved;
  return {ok3 && v1.empty(), fmt::format("3-sample dip -> {} report(s){}; 1-sample dip -> {} report(s)", v3.size(),
                                         v3.empty() ? "" : fmt::format(" [{}, {}]", v3[0].start_s, v3[0].end_s),
                                         v1.size())};
}

Outcome determinism(Shared& sh) {
  const auto cfg = gateway::default_scenario();
  gateway::RunOptions o;
  o.out_dir = sh.work / "run-b";
  const auto r = gateway::run_scenario(cfg, o);
  if (!sh.have_first) {
    gateway::RunOptions oa;
    oa.out_dir = sh.work / "run-a";
    sh.first = gateway::run_scenario(cfg, oa);
  }
  std::vector<std::string> fails;
  if (!(r == sh.first)) fails.push_back("results differ");
  if (slurp(sh.work / "run-a" / "result.json") != slurp(sh.work / "run-b" / "result.json"))
    fails.push_back("result.json differs");
  std::size_t segments = 0;
  for (const auto& e : fs::directory_iterator(sh.work / "run-a" / "datalake")) {
    ++segments;
    const auto other = sh.work / "run-b" / "datalake" / e.path().filename();
    if (!fs::exists(other) || slurp(e.path()) != slurp(other))
      fails.push_back(e.path().filename().string() + " differs");
  }
  std::string detail = fmt::format("seed {}: result.json and {} data-lake files compared", cfg.seed, segments);
  for (const auto& f : fails) detail += "; " + f;
  return {fails.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
  Shared sh;
  sh.work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "agentran-acceptance";
  std::error_code ec;
  fs::remove_all(sh.work, ec);
  fs::create_directories(sh.work);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> checks = {
      {"three_phase_scenario", [&] { return three_phase(sh); }},
      {"guardrail_fuzz_10k", guardrail_fuzz},
      {"decomposition_20_of_20", decomposition},
      {"scheduler_matches_oracle", scheduler_oracle},
      {"tpc_convergence_bound", tpc_convergence},
      {"protocol_suite", protocol_suite},
      {"violation_detection", violation_detection},
      {"deterministic_replay", [&] { return determinism(sh); }},
  };
  int failed = 0;
  for (const auto& [name, fn] : checks) {
    Outcome out;
    try {
      out = fn();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    fmt::print("{} {}: {}\n", out.pass ? "PASS" : "FAIL", name, out.detail);
    std::fflush(stdout);
    failed += !out.pass;
  }
  fmt::print("{} of {} acceptance criteria passed\n", checks.size() - static_cast<std::size_t>(failed), checks.size());
  return failed == 0 ? 0 : 1;
}
