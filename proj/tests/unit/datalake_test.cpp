#include <gtest/gtest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "agentran/datalake/analytics.hpp"
#include "agentran/datalake/export.hpp"
#include "agentran/datalake/store.hpp"
#include "agentran/model/records.hpp"
#include "agentran/sim/csv.hpp"
#include "support/violation_oracle.hpp"

namespace fs = std::filesystem;
using namespace agentran::datalake;
using agentran::oracle::slice_sample;

namespace {

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() / ("agentran-dl-" + std::to_string(::getpid()) + "-" + std::to_string(next_++));
    fs::remove_all(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
  static inline int next_ = 0;
};

agentran::model::Intent mtc_intent(double t0, double min_bps) {
  agentran::model::Intent i;
  i.intent_id = "emergency";
  i.body_text = "MTC needs 30 Mbit/s";
  i.timestamp_s = t0;
  i.requirements = {agentran::model::SliceRequirement{2, std::nullopt, min_bps}};
  return i;
}

std::vector<LogRecord> series(const std::vector<double>& bps, double t0 = 1.0) {
  std::vector<LogRecord> out;
  for (std::size_t i = 0; i < bps.size(); ++i)
    out.push_back(LogRecord{i + 1, t0 + static_cast<double>(i), RecordKind::kKpi,
                            Json(slice_sample(t0 + static_cast<double>(i), 2, bps[i])), "ran-sim"});
  return out;
}

}  // namespace

TEST(Store, AppendIsDurableAcrossReopen) {
  TempDir d;
  {
    LogStore s(d.path(), StoreOptions{3, true, 10});
    for (int i = 0; i < 10; ++i)
      EXPECT_EQ(s.append(RecordKind::kLifecycle, i, Json{{"i", i}}, "a"), static_cast<std::uint64_t>(i + 1));
    EXPECT_EQ(s.segment_count(), 4u);
  }
  LogStore s(d.path());
  ASSERT_EQ(s.size(), 10u);
  EXPECT_EQ(s.all()[9].payload["i"], 9);
  EXPECT_EQ(s.all()[9].agent_id, "a");
  EXPECT_EQ(s.append(RecordKind::kKpi, 11, Json::object()), 11u);
  std::ifstream idx(d.path() / "index.ndjson");
  std::string line;
  int lines = 0;
  while (std::getline(idx, line)) ++lines;
  EXPECT_EQ(lines, 5);
}

TEST(Store, TornTrailingLineIsIgnored) {
  TempDir d;
  {
    LogStore s(d.path());
    for (int i = 0; i < 3; ++i) s.append(RecordKind::kLifecycle, i, Json{{"i", i}});
  }
  {
    std::ofstream seg(d.path() / "segment-000001.ndjson", std::ios::app);
    seg << R"({"seq":4,"timestamp_s":3,"kind":"lifec)";
  }
  LogStore s(d.path());
  EXPECT_EQ(s.size(), 3u);
  EXPECT_EQ(s.append(RecordKind::kLifecycle, 4, Json::object()), 4u);
  LogStore again(d.path());
  EXPECT_EQ(again.size(), 4u);
}

TEST(Store, WriteFailureBuffersAndRecovers) {
  TempDir d;
  LogStore s(d.path(), StoreOptions{2, true, 3});
  s.append(RecordKind::kLifecycle, 0, Json{{"i", 0}});
  s.append(RecordKind::kLifecycle, 1, Json{{"i", 1}});
  // The next record opens segment 2; point it at a full device.
  fs::create_symlink("/dev/full", s.segment_path(2));
  try {
    s.append(RecordKind::kLifecycle, 2, Json{{"i", 2}});
    FAIL();
  } catch (const StoreWriteError& e) {
    EXPECT_TRUE(e.buffered());
    EXPECT_EQ(e.seq(), 3u);
  }
  EXPECT_EQ(s.pending(), 1u);
  EXPECT_EQ(s.size(), 2u);
  fs::remove(s.segment_path(2));
  EXPECT_EQ(s.flush(), 0u);
  EXPECT_EQ(s.append(RecordKind::kLifecycle, 3, Json{{"i", 3}}), 4u);
  const auto all = s.all();
  ASSERT_EQ(all.size(), 4u);
  for (std::size_t i = 0; i < all.size(); ++i) EXPECT_EQ(all[i].seq, i + 1);
  LogStore reopened(d.path());
  EXPECT_EQ(reopened.all(), all);
}

TEST(Store, RetryBufferOverflowDropsWithError) {
  TempDir d;
  LogStore s(d.path(), StoreOptions{1, true, 2});
  s.append(RecordKind::kLifecycle, 0, Json::object());
  for (int i = 2; i < 8; ++i) fs::create_symlink("/dev/full", s.segment_path(static_cast<std::size_t>(i)));
  int buffered = 0, dropped = 0;
  for (int i = 0; i < 4; ++i) {
    try {
      s.append(RecordKind::kLifecycle, 1 + i, Json::object());
    } catch (const StoreWriteError& e) {
      e.buffered() ? ++buffered : ++dropped;
    }
  }
  EXPECT_EQ(buffered, 2);
  EXPECT_EQ(dropped, 2);
  EXPECT_EQ(s.pending(), 2u);
}

TEST(Store, QueryRangeIsInclusiveAndFiltered) {
  TempDir d;
  LogStore s(d.path(), StoreOptions{4096, false, 10});
  for (int t = 0; t < 10; ++t) s.append(t % 2 ? RecordKind::kKpi : RecordKind::kMessage, t, Json{{"t", t}});
  const auto kpis = s.query_range({RecordKind::kKpi}, 3, 7);
  ASSERT_EQ(kpis.size(), 3u);
  EXPECT_EQ(kpis.front().timestamp_s, 3);
  EXPECT_EQ(kpis.back().timestamp_s, 7);
  EXPECT_EQ(s.query_range({}, 2, 2).size(), 1u);
  EXPECT_THROW(s.query_range({}, 5, 4), std::invalid_argument);
  EXPECT_EQ(s.records_since(7).size(), 3u);
  EXPECT_EQ(s.records_since(0).size(), 10u);
  EXPECT_TRUE(s.records_since(10).empty());
  std::vector<std::uint64_t> seen;
  s.add_listener([&](const LogRecord& r) { seen.push_back(r.seq); });
  s.append(RecordKind::kKpi, 10, Json::object());
  EXPECT_EQ(seen, (std::vector<std::uint64_t>{11}));
}

TEST(Violations, ThreeSampleDipGivesOneReport) {
  std::vector<double> bps(20, 32e6);
  bps[5] = bps[6] = bps[7] = 20e6;
  const auto recs = series(bps);
  const auto v = detect_violations(std::span<const LogRecord>(recs), mtc_intent(0, 30e6), 1.0);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].start_s, 6.0);
  EXPECT_EQ(v[0].end_s, 8.0);
  EXPECT_TRUE(v[0].resolved);
  EXPECT_DOUBLE_EQ(v[0].observed, 20e6);
  EXPECT_EQ(v[0].requirement, "min_throughput_bps");
  EXPECT_EQ(v[0].slice_id, 2);
}

TEST(Violations, SingleSampleDipIsDebounced) {
  std::vector<double> bps(20, 32e6);
  bps[9] = 1e6;
  const auto recs = series(bps);
  EXPECT_TRUE(detect_violations(std::span<const LogRecord>(recs), mtc_intent(0, 30e6), 1.0).empty());
}

TEST(Violations, OpenEpisodeAndIntentStart) {
  std::vector<double> bps(10, 32e6);
  bps[1] = bps[2] = 1e6;  // before the intent
  bps[8] = bps[9] = 1e6;
  const auto recs = series(bps);
  const auto v = detect_violations(std::span<const LogRecord>(recs), mtc_intent(5, 30e6), 1.0);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_FALSE(v[0].resolved);
  EXPECT_EQ(v[0].start_s, 9.0);
  EXPECT_TRUE(detect_violations(std::span<const LogRecord>(recs), mtc_intent(0, 30e6), 1.0, 8.5).size() == 1);
}

TEST(Violations, RandomSequencesMatchOracle) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> bps, t;
    const int n = 1 + static_cast<int>(rng() % 40);
    for (int i = 0; i < n; ++i) {
      bps.push_back(rng() % 3 == 0 ? 10e6 + (rng() % 100) * 1e5 : 31e6);
      t.push_back(1.0 + i);
    }
    const auto recs = series(bps);
    const auto got = detect_violations(std::span<const LogRecord>(recs), mtc_intent(0, 30e6), 1.0);
    const auto want = agentran::oracle::expected_episodes(t, bps, 30e6);
    ASSERT_EQ(got.size(), want.size()) << "trial " << trial;
    for (std::size_t k = 0; k < got.size(); ++k) {
      EXPECT_EQ(got[k].start_s, want[k].start_s);
      EXPECT_EQ(got[k].end_s, want[k].end_s);
      EXPECT_EQ(got[k].resolved, want[k].resolved);
      EXPECT_NEAR(got[k].observed, want[k].observed, 1e-6);
    }
  }
}

TEST(Violations, WindowAveragingSmoothsDips) {
  std::vector<double> bps(20, 40e6);
  bps[5] = bps[6] = 25e6;  // two-sample window means: 32.5, 25, 32.5
  const auto recs = series(bps);
  EXPECT_TRUE(detect_violations(std::span<const LogRecord>(recs), mtc_intent(0, 30e6), 2.0).empty());
  EXPECT_EQ(detect_violations(std::span<const LogRecord>(recs), mtc_intent(0, 30e6), 1.0).size(), 1u);
}

TEST(Violations, RecordedThroughTheStore) {
  TempDir d;
  LogStore s(d.path(), StoreOptions{4096, false, 10});
  std::vector<double> bps(12, 32e6);
  bps[3] = bps[4] = bps[5] = 5e6;
  for (const auto& r : series(bps)) s.append(r.kind, r.timestamp_s, r.payload, r.agent_id);
  const auto v = detect_violations(s, mtc_intent(0, 30e6), 1.0);
  ASSERT_EQ(v.size(), 1u);
  const auto seqs = record_violations(s, v);
  ASSERT_EQ(seqs.size(), 1u);
  const auto back = s.query_range({RecordKind::kViolation}, 0, 100);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].payload.get<ViolationReport>(), v[0]);
}

TEST(Behavior, SummarizesDecisionsAndMaxStepRuns) {
  using namespace agentran::model;
  std::vector<LogRecord> recs;
  std::uint64_t seq = 1;
  double target = 15.0;
  for (std::uint64_t c = 0; c < 5; ++c) {
    DecisionRecord d;
    d.agent_id = "pc";
    d.cycle_index = c;
    d.timestamp_s = 181.0 + static_cast<double>(c);
    const double proposed = c < 4 ? target - 5.0 : target - 1.0;
    d.proposed_actions = {{ActionType::kSetSnrTarget, 3, proposed}};
    d.clamped_actions = {apply_guardrails(d.proposed_actions[0], target, GuardrailConfig{})};
    target = d.clamped_actions[0].applied.value;
    d.rationale_text = "save battery";
    recs.push_back(LogRecord{seq++, d.timestamp_s, RecordKind::kDecision, Json(d), "pc"});
  }
  ViolationReport v{"i", 2, "MTC", "min_throughput_bps", 1, 2, 181.5, 182.5, true};
  recs.push_back(LogRecord{seq++, 182.5, RecordKind::kViolation, Json(v), "datalake"});
  const auto rep = summarize_agent_behavior(std::span<const LogRecord>(recs), "pc", 180, 190);
  EXPECT_TRUE(rep.found);
  EXPECT_EQ(rep.cycles, 5u);
  EXPECT_EQ(rep.actions, 5u);
  EXPECT_EQ(rep.actions_by_type.at("set_snr_target"), 5u);
  EXPECT_EQ(rep.clamp_count, 4u);
  EXPECT_DOUBLE_EQ(rep.clamp_rate, 0.8);
  EXPECT_EQ(rep.clamps_by_reason.at("delta"), 4u);
  EXPECT_DOUBLE_EQ(rep.violation_overlap_ratio, 0.2);
  ASSERT_EQ(rep.max_step_runs.size(), 1u);
  EXPECT_EQ(rep.max_step_runs[0].cycles, 4u);
  EXPECT_EQ(rep.max_step_runs[0].direction, -1.0);
  EXPECT_EQ(rep.max_step_runs[0].start_s, 181.0);
  EXPECT_EQ(rep.max_step_runs[0].end_s, 184.0);
  EXPECT_NE(rep.text.find("4 consecutive -3 dB steps for UE 3"), std::string::npos);
  const auto none = summarize_agent_behavior(std::span<const LogRecord>(recs), "ghost", 0, 1000);
  EXPECT_FALSE(none.found);
  EXPECT_NE(none.text.find("No records"), std::string::npos);
}

TEST(Export, KpiCsvHasOneRowPerUePerSample) {
  TempDir d;
  {
    LogStore s(d.path(), StoreOptions{4096, false, 10});
    for (const auto& r : series(std::vector<double>(7, 1e7))) s.append(r.kind, r.timestamp_s, r.payload, r.agent_id);
    s.append(RecordKind::kLifecycle, 9, Json::object());
  }
  const fs::path csv = d.path() / "kpis.csv";
  EXPECT_EQ(export_kpi_csv(d.path(), csv), 7u);
  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, agentran::sim::kSlotCsvHeader);
  EXPECT_THROW(export_kpi_csv(d.path() / "missing", csv), std::runtime_error);
}
