#include "agentran/model/records.hpp"

#include <algorithm>
#include <map>

#include <fmt/format.h>

namespace agentran::model {

std::size_t DecisionRecord::clamp_count() const {
  return static_cast<std::size_t>(
      std::count_if(clamped_actions.begin(), clamped_actions.end(), [](const ClampedAction& a) { return a.clamped; }));
}

const SliceMetrics* ContextReport::slice(int slice_id) const {
  auto it = std::find_if(metrics.begin(), metrics.end(), [&](const SliceMetrics& m) { return m.slice_id == slice_id; });
  return it == metrics.end() ? nullptr : &*it;
}

std::string format_mbps(double bps) { return fmt::format("{:.1f} Mbit/s", bps / 1e6); }

ContextReport build_context_report(const std::string& reporter, const KpiWindow& window,
                                   const std::vector<SliceRequirement>& requirements,
                                   const std::string& sub_intent_id) {
  ContextReport rep;
  rep.reporter = reporter;
  rep.sub_intent_id = sub_intent_id;
  rep.samples = window.size();
  if (window.empty()) {
    rep.no_data = true;
    rep.summary_text = reporter + ": no data, the KPI window is empty.";
    return rep;
  }
  rep.timestamp_s = window.latest().timestamp_s;

  std::map<int, SliceMetrics> acc;
  std::map<int, int> ue_samples;
  const double n = static_cast<double>(window.size());
  for (const auto& s : window.samples()) {
    double util = 0.0;
    for (const auto& sk : s.per_slice) {
      auto& m = acc[sk.slice_id];
      m.slice_id = sk.slice_id;
      m.name = sk.name;
      m.ue_count = sk.ue_count;
      m.mean_aggregate_throughput_bps += sk.aggregate_throughput_bps / n;
      m.mean_per_ue_throughput_bps += sk.per_ue_throughput_bps() / n;
      m.mean_prb_utilization += sk.prb_utilization / n;
      m.throttle_limit_bps = sk.throttle_limit_bps;
      util += sk.prb_utilization;
    }
    for (const auto& u : s.per_ue) {
      auto& m = acc[u.slice_id];
      m.mean_snr_db += u.snr_db;
      m.mean_snr_target_db += u.snr_target_db;
      m.mean_tx_power_dbm += u.tx_power_dbm;
      m.mean_power_draw_mw += u.power_draw_mw;
      m.mean_mcs_index += u.mcs_index;
      ++ue_samples[u.slice_id];
    }
    rep.mean_cell_throughput_bps += s.cell_throughput_bps() / n;
    rep.mean_cell_utilization += util / n;
  }
  for (auto& [id, m] : acc) {
    if (const int k = ue_samples[id]; k > 0) {
      m.mean_snr_db /= k;
      m.mean_snr_target_db /= k;
      m.mean_tx_power_dbm /= k;
      m.mean_power_draw_mw /= k;
      m.mean_mcs_index /= k;
    }
    rep.metrics.push_back(m);
  }

  const bool contended = rep.mean_cell_utilization >= kContentionUtilization;
  for (const auto& req : requirements) {
    const SliceMetrics* m = rep.slice(req.slice_id);
    if (!m) continue;
    if (req.min_throughput_bps && m->mean_per_ue_throughput_bps < *req.min_throughput_bps) {
      const double gap = *req.min_throughput_bps - m->mean_per_ue_throughput_bps;
      rep.notes.push_back({"below_min", m->slice_id, m->name, m->mean_per_ue_throughput_bps, *req.min_throughput_bps,
                           fmt::format("{} is below its minimum: {} per UE against {} required (short by {})",
                                       m->name, format_mbps(m->mean_per_ue_throughput_bps),
                                       format_mbps(*req.min_throughput_bps), format_mbps(gap))});
      if (m->mean_snr_db < kPoorMcsSnrDb)
        rep.notes.push_back({"poor_mcs", m->slice_id, m->name, m->mean_snr_db, kPoorMcsSnrDb,
                             fmt::format("{} runs at {:.1f} dB SNR (MCS {:.0f}), too low to carry its minimum",
                                         m->name, m->mean_snr_db, m->mean_mcs_index)});
    }
    if (req.max_delay_s && contended)
      rep.notes.push_back({"contention", m->slice_id, m->name, rep.mean_cell_utilization, kContentionUtilization,
                           fmt::format("contention with average throughput of {} and {:.0f}% PRB utilization; "
                                       "the {:.0f} ms budget of {} is at risk",
                                       format_mbps(rep.mean_cell_throughput_bps), rep.mean_cell_utilization * 100.0,
                                       *req.max_delay_s * 1e3, m->name)});
  }
  for (const auto& note : rep.notes) rep.constraints.push_back(note.text);

  std::string text = fmt::format("{} over the last {} samples:", reporter, window.size());
  for (const auto& m : rep.metrics)
    text += fmt::format(" {} averages {} ({} per UE, throttle {}, SNR {:.1f} dB, tx {:.1f} dBm);", m.name,
                        format_mbps(m.mean_aggregate_throughput_bps), format_mbps(m.mean_per_ue_throughput_bps),
                        format_mbps(m.throttle_limit_bps), m.mean_snr_db, m.mean_tx_power_dbm);
  text += fmt::format(" cell throughput {} at {:.0f}% PRB utilization{}.", format_mbps(rep.mean_cell_throughput_bps),
                      rep.mean_cell_utilization * 100.0, contended ? " (contention)" : "");
  if (rep.constraints.empty()) {
    text += " All requirements are met.";
  } else {
    text += " Constraints:";
    for (const auto& c : rep.constraints) text += " " + c + ".";
  }
  rep.summary_text = std::move(text);
  return rep;
}

void to_json(Json& j, const DecisionRecord& r) {
  j = Json{{"agent_id", r.agent_id},
           {"cycle_index", r.cycle_index},
           {"timestamp_s", r.timestamp_s},
           {"sub_intent_id", r.sub_intent_id},
           {"input_window_digest", r.input_window_digest},
           {"proposed_actions", r.proposed_actions},
           {"clamped_actions", r.clamped_actions},
           {"rationale_text", r.rationale_text},
           {"backend", r.backend},
           {"retries", r.retries}};
  j["resulting_kpis"] = r.resulting_kpis ? *r.resulting_kpis : Json(nullptr);
}

void from_json(const Json& j, DecisionRecord& r) {
  r.agent_id = j.at("agent_id").get<std::string>();
  r.cycle_index = j.at("cycle_index").get<std::uint64_t>();
  r.timestamp_s = j.at("timestamp_s").get<double>();
  r.sub_intent_id = j.value("sub_intent_id", std::string{});
  r.input_window_digest = j.value("input_window_digest", std::string{});
  r.proposed_actions = j.at("proposed_actions").get<std::vector<ControlAction>>();
  r.clamped_actions = j.at("clamped_actions").get<std::vector<ClampedAction>>();
  r.rationale_text = j.at("rationale_text").get<std::string>();
  r.backend = j.value("backend", std::string{});
  r.retries = j.value("retries", 0);
  if (j.contains("resulting_kpis") && !j["resulting_kpis"].is_null()) r.resulting_kpis = j["resulting_kpis"];
  else r.resulting_kpis.reset();
}

void to_json(Json& j, const ConstraintNote& n) {
  j = Json{{"kind", n.kind},         {"slice_id", n.slice_id}, {"slice_name", n.slice_name},
           {"observed", n.observed}, {"required", n.required}, {"text", n.text}};
}

void from_json(const Json& j, ConstraintNote& n) {
  n.kind = j.at("kind").get<std::string>();
  n.slice_id = j.at("slice_id").get<int>();
  n.slice_name = j.value("slice_name", std::string{});
  n.observed = j.value("observed", 0.0);
  n.required = j.value("required", 0.0);
  n.text = j.value("text", std::string{});
}

void to_json(Json& j, const SliceMetrics& m) {
  j = Json{{"slice_id", m.slice_id},
           {"name", m.name},
           {"ue_count", m.ue_count},
           {"mean_aggregate_throughput_bps", m.mean_aggregate_throughput_bps},
           {"mean_per_ue_throughput_bps", m.mean_per_ue_throughput_bps},
           {"mean_prb_utilization", m.mean_prb_utilization},
           {"mean_snr_db", m.mean_snr_db},
           {"mean_snr_target_db", m.mean_snr_target_db},
           {"mean_tx_power_dbm", m.mean_tx_power_dbm},
           {"mean_power_draw_mw", m.mean_power_draw_mw},
           {"mean_mcs_index", m.mean_mcs_index},
           {"throttle_limit_bps", m.throttle_limit_bps}};
}

void from_json(const Json& j, SliceMetrics& m) {
  m.slice_id = j.at("slice_id").get<int>();
  m.name = j.value("name", std::string{});
  m.ue_count = j.value("ue_count", 0);
  m.mean_aggregate_throughput_bps = j.value("mean_aggregate_throughput_bps", 0.0);
  m.mean_per_ue_throughput_bps = j.value("mean_per_ue_throughput_bps", 0.0);
  m.mean_prb_utilization = j.value("mean_prb_utilization", 0.0);
  m.mean_snr_db = j.value("mean_snr_db", 0.0);
  m.mean_snr_target_db = j.value("mean_snr_target_db", 0.0);
  m.mean_tx_power_dbm = j.value("mean_tx_power_dbm", 0.0);
  m.mean_power_draw_mw = j.value("mean_power_draw_mw", 0.0);
  m.mean_mcs_index = j.value("mean_mcs_index", 0.0);
  m.throttle_limit_bps = j.value("throttle_limit_bps", 0.0);
}

void to_json(Json& j, const ContextReport& r) {
  j = Json{{"reporter", r.reporter},
           {"sub_intent_id", r.sub_intent_id},
           {"timestamp_s", r.timestamp_s},
           {"summary_text", r.summary_text},
           {"metrics", r.metrics},
           {"mean_cell_throughput_bps", r.mean_cell_throughput_bps},
           {"mean_cell_utilization", r.mean_cell_utilization},
           {"constraints", r.constraints},
           {"notes", r.notes},
           {"no_data", r.no_data},
           {"samples", r.samples}};
}

void from_json(const Json& j, ContextReport& r) {
  r.reporter = j.at("reporter").get<std::string>();
  r.sub_intent_id = j.value("sub_intent_id", std::string{});
  r.timestamp_s = j.value("timestamp_s", 0.0);
  r.summary_text = j.at("summary_text").get<std::string>();
  r.metrics = j.value("metrics", std::vector<SliceMetrics>{});
  r.mean_cell_throughput_bps = j.value("mean_cell_throughput_bps", 0.0);
  r.mean_cell_utilization = j.value("mean_cell_utilization", 0.0);
  r.constraints = j.value("constraints", std::vector<std::string>{});
  r.notes = j.value("notes", std::vector<ConstraintNote>{});
  r.no_data = j.value("no_data", false);
  r.samples = j.value("samples", std::size_t{0});
}

}  // namespace agentran::model
