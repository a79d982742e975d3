#include "agentran/datalake/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include <fmt/format.h>

#include "agentran/model/records.hpp"
#include "agentran/sim/types.hpp"

namespace agentran::datalake {

void to_json(Json& j, const ViolationReport& v) {
  j = Json{{"intent_id", v.intent_id}, {"slice_id", v.slice_id}, {"slice_name", v.slice_name},
           {"requirement", v.requirement}, {"observed", v.observed}, {"required", v.required},
           {"start_s", v.start_s},     {"end_s", v.end_s},       {"resolved", v.resolved}};
}

void from_json(const Json& j, ViolationReport& v) {
  v.intent_id = j.at("intent_id").get<std::string>();
  v.slice_id = j.at("slice_id").get<int>();
  v.slice_name = j.value("slice_name", std::string{});
  v.requirement = j.at("requirement").get<std::string>();
  v.observed = j.at("observed").get<double>();
  v.required = j.at("required").get<double>();
  v.start_s = j.at("start_s").get<double>();
  v.end_s = j.at("end_s").get<double>();
  v.resolved = j.at("resolved").get<bool>();
}

namespace {

struct Sample {
  double t;
  double value;
  std::string name;
};

std::vector<ViolationReport> detect_for(const std::vector<Sample>& raw, const model::Intent& intent, int slice_id,
                                        double required, double window_s) {
  std::vector<ViolationReport> out;
  std::deque<Sample> win;
  double win_sum = 0.0;
  int fail_run = 0, pass_run = 0;
  bool open = false;
  ViolationReport cur;
  std::vector<Sample> pending;  // failing samples not yet confirmed
  double ep_sum = 0.0;
  std::size_t ep_n = 0;

  for (const auto& s : raw) {
    win.push_back(s);
    win_sum += s.value;
    while (!win.empty() && win.front().t <= s.t - window_s) {
      win_sum -= win.front().value;
      win.pop_front();
    }
    const double mean = win_sum / static_cast<double>(win.size());
    const bool failing = mean < required;
    if (failing) {
      pass_run = 0;
      ++fail_run;
      if (!open) {
        pending.push_back({s.t, mean, s.name});
        if (fail_run >= kViolationDebounceSamples) {
          open = true;
          cur = ViolationReport{intent.intent_id, slice_id, s.name, "min_throughput_bps", 0.0, required,
                                pending.front().t, s.t, false};
          ep_sum = 0.0;
          ep_n = 0;
          for (const auto& p : pending) {
            ep_sum += p.value;
            ++ep_n;
          }
          pending.clear();
        }
      } else {
        cur.end_s = s.t;
        ep_sum += mean;
        ++ep_n;
      }
    } else {
      fail_run = 0;
      pending.clear();
      if (open && ++pass_run >= kViolationDebounceSamples) {
        cur.resolved = true;
        cur.observed = ep_sum / static_cast<double>(ep_n);
        out.push_back(cur);
        open = false;
        pass_run = 0;
      }
    }
  }
  if (open) {
    cur.observed = ep_sum / static_cast<double>(ep_n);
    out.push_back(cur);
  }
  return out;
}

}  // namespace

std::vector<ViolationReport> detect_violations(std::span<const LogRecord> records, const model::Intent& intent,
                                               double window_s, std::optional<double> until_s) {
  std::vector<ViolationReport> out;
  for (const auto& req : intent.requirements) {
    if (!req.min_throughput_bps) continue;
    std::vector<Sample> samples;
    for (const auto& r : records) {
      if (r.kind != RecordKind::kKpi) continue;
      if (r.timestamp_s < intent.timestamp_s || (until_s && r.timestamp_s > *until_s)) continue;
      const auto snap = r.payload.get<sim::KpiSnapshot>();
      if (const auto* sk = snap.slice(req.slice_id))
        samples.push_back({r.timestamp_s, sk->per_ue_throughput_bps(), sk->name});
    }
    auto found = detect_for(samples, intent, req.slice_id, *req.min_throughput_bps, window_s);
    out.insert(out.end(), found.begin(), found.end());
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const ViolationReport& a, const ViolationReport& b) { return a.start_s < b.start_s; });
  return out;
}

std::vector<ViolationReport> detect_violations(const LogStore& store, const model::Intent& intent, double window_s,
                                               std::optional<double> until_s) {
  const auto recs = store.query_range({RecordKind::kKpi}, intent.timestamp_s,
                                      until_s.value_or(std::numeric_limits<double>::max()));
  return detect_violations(std::span<const LogRecord>(recs), intent, window_s, until_s);
}

std::vector<std::uint64_t> record_violations(LogStore& store, const std::vector<ViolationReport>& reports) {
  std::vector<std::uint64_t> seqs;
  for (const auto& v : reports) seqs.push_back(store.append(RecordKind::kViolation, v.end_s, Json(v), "datalake"));
  return seqs;
}

AgentBehaviorReport summarize_agent_behavior(std::span<const LogRecord> records, const std::string& agent_id,
                                             double t0, double t1, double max_step_db) {
  AgentBehaviorReport rep;
  rep.agent_id = agent_id;
  std::vector<std::pair<double, double>> violations;
  std::vector<model::DecisionRecord> decisions;
  for (const auto& r : records) {
    if (r.timestamp_s < t0 || r.timestamp_s > t1) continue;
    if (r.kind == RecordKind::kViolation) {
      const auto v = r.payload.get<ViolationReport>();
      violations.emplace_back(v.start_s, v.end_s);
    }
    if (r.agent_id && *r.agent_id == agent_id) {
      rep.found = true;
      if (r.kind == RecordKind::kDecision) decisions.push_back(r.payload.get<model::DecisionRecord>());
    }
  }
  if (!rep.found) {
    rep.text = fmt::format("No records for agent {} in [{:g}, {:g}] s.", agent_id, t0, t1);
    return rep;
  }
  rep.cycles = decisions.size();
  std::size_t overlapping = 0;
  std::map<int, MaxStepRun> open_runs;
  std::map<int, std::uint64_t> last_cycle;
  auto close_run = [&](int target) {
    auto it = open_runs.find(target);
    if (it == open_runs.end()) return;
    if (it->second.cycles >= 2) rep.max_step_runs.push_back(it->second);
    open_runs.erase(it);
  };
  for (const auto& d : decisions) {
    if (std::any_of(violations.begin(), violations.end(),
                    [&](const auto& v) { return d.timestamp_s >= v.first && d.timestamp_s <= v.second; }))
      ++overlapping;
    for (const auto& a : d.clamped_actions) {
      ++rep.actions;
      ++rep.actions_by_type[model::to_string(a.applied.type)];
      if (a.clamped) {
        ++rep.clamp_count;
        for (const auto& why : a.clamp_reasons) ++rep.clamps_by_reason[why];
      }
      if (a.applied.type != model::ActionType::kSetSnrTarget) continue;
      const double step = a.applied.value - a.previous;
      const int target = a.applied.target_id;
      const bool full = std::abs(std::abs(step) - max_step_db) < 1e-9;
      auto it = open_runs.find(target);
      const bool contiguous = it != open_runs.end() && last_cycle[target] + 1 == d.cycle_index &&
                              it->second.direction == (step > 0 ? 1.0 : -1.0);
      if (!full) {
        close_run(target);
      } else if (contiguous) {
        ++it->second.cycles;
        it->second.end_s = d.timestamp_s;
      } else {
        close_run(target);
        open_runs[target] = MaxStepRun{target, 1, d.timestamp_s, d.timestamp_s, step > 0 ? 1.0 : -1.0};
      }
      last_cycle[target] = d.cycle_index;
    }
  }
  std::vector<int> targets;
  for (const auto& [t, _] : open_runs) targets.push_back(t);
  for (int t : targets) close_run(t);
  std::sort(rep.max_step_runs.begin(), rep.max_step_runs.end(),
            [](const MaxStepRun& a, const MaxStepRun& b) { return a.start_s < b.start_s; });

  rep.clamp_rate = rep.actions ? static_cast<double>(rep.clamp_count) / static_cast<double>(rep.actions) : 0.0;
  rep.violation_overlap_ratio =
      rep.cycles ? static_cast<double>(overlapping) / static_cast<double>(rep.cycles) : 0.0;

  std::string text = fmt::format("Agent {} over [{:g}, {:g}] s: {} decision cycles with {} actions", agent_id, t0,
                                 t1, rep.cycles, rep.actions);
  for (const auto& [type, n] : rep.actions_by_type) text += fmt::format(", {} x {}", n, type);
  text += fmt::format(". Guardrails clamped {} actions ({:.0f}%)", rep.clamp_count, rep.clamp_rate * 100.0);
  for (const auto& [why, n] : rep.clamps_by_reason) text += fmt::format(", {} on {}", n, why);
  text += fmt::format(". {:.0f}% of decisions overlapped an open violation.", rep.violation_overlap_ratio * 100.0);
  for (const auto& run : rep.max_step_runs)
    text += fmt::format(" Max-step sequence: {} consecutive {:+g} dB steps for UE {} from {:g} s to {:g} s.",
                        run.cycles, run.direction * max_step_db, run.target_id, run.start_s, run.end_s);
  rep.text = std::move(text);
  return rep;
}

AgentBehaviorReport summarize_agent_behavior(const LogStore& store, const std::string& agent_id, double t0,
                                             double t1, double max_step_db) {
  const auto recs = store.query_range({}, t0, t1);
  return summarize_agent_behavior(std::span<const LogRecord>(recs), agent_id, t0, t1, max_step_db);
}

}  // namespace agentran::datalake
