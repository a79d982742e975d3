#include "agentran/sim/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace agentran::sim {

using nlohmann::json;

std::vector<RateEntry> default_rate_table() {
  return {
      {-6.7, 55},  {-4.7, 84},  {-2.3, 136}, {0.2, 217},   {2.4, 316},
      {4.3, 423},  {5.9, 532},  {8.1, 689},  {10.3, 866},  {11.7, 983},
      {14.1, 1196}, {16.3, 1405}, {18.7, 1628}, {21.0, 1841}, {22.7, 2000},
  };
}

void CellConfig::validate() const {
  if (num_prbs <= 0) throw ConfigError("cell.num_prbs", "must be positive");
  if (!(slot_duration_s > 0.0) || !std::isfinite(slot_duration_s))
    throw ConfigError("cell.slot_duration_s", "must be positive");
  if (!(ewma_alpha > 0.0 && ewma_alpha <= 1.0))
    throw ConfigError("cell.ewma_alpha", "must lie in (0, 1]");
  if (prb_rate_table.empty()) throw ConfigError("cell.prb_rate_table", "must not be empty");
  for (std::size_t i = 0; i < prb_rate_table.size(); ++i) {
    const auto& e = prb_rate_table[i];
    if (!std::isfinite(e.snr_threshold_db) || e.bits_per_prb < 0)
      throw ConfigError("cell.prb_rate_table[" + std::to_string(i) + "]", "invalid entry");
    if (i > 0) {
      const auto& prev = prb_rate_table[i - 1];
      if (!(e.snr_threshold_db > prev.snr_threshold_db))
        throw ConfigError("cell.prb_rate_table[" + std::to_string(i) + "]",
                          "thresholds must be strictly increasing");
      if (e.bits_per_prb < prev.bits_per_prb)
        throw ConfigError("cell.prb_rate_table[" + std::to_string(i) + "]",
                          "rates must be non-decreasing");
    }
  }
}

void ChannelConfig::validate() const {
  if (!(walk_step_db >= 0.0) || !std::isfinite(walk_step_db))
    throw ConfigError("channel.walk_step_db", "must be >= 0");
  if (!(walk_bound_db >= 0.0) || !std::isfinite(walk_bound_db))
    throw ConfigError("channel.walk_bound_db", "must be >= 0");
}

void SliceConfig::validate() const {
  if (!(throttle_limit_bps >= kMinThrottleBps && throttle_limit_bps <= kMaxThrottleBps))
    throw ConfigError("slices[" + std::to_string(slice_id) + "].throttle_limit_bps",
                      "must lie in [3e6, 1e8]");
  if (!(priority_weight > 0.0) || !std::isfinite(priority_weight))
    throw ConfigError("slices[" + std::to_string(slice_id) + "].priority_weight",
                      "must be positive");
}

const SliceKpi* KpiSnapshot::slice(int slice_id) const {
  auto it = std::find_if(per_slice.begin(), per_slice.end(),
                         [&](const SliceKpi& s) { return s.slice_id == slice_id; });
  return it == per_slice.end() ? nullptr : &*it;
}

const UeKpi* KpiSnapshot::ue(int ue_id) const {
  auto it = std::find_if(per_ue.begin(), per_ue.end(),
                         [&](const UeKpi& u) { return u.ue_id == ue_id; });
  return it == per_ue.end() ? nullptr : &*it;
}

double KpiSnapshot::cell_throughput_bps() const {
  return std::accumulate(per_slice.begin(), per_slice.end(), 0.0,
                         [](double acc, const SliceKpi& s) { return acc + s.aggregate_throughput_bps; });
}

void to_json(json& j, const RateEntry& v) {
  j = json{{"snr_threshold_db", v.snr_threshold_db}, {"bits_per_prb", v.bits_per_prb}};
}
void from_json(const json& j, RateEntry& v) {
  v.snr_threshold_db = j.at("snr_threshold_db").get<double>();
  v.bits_per_prb = j.at("bits_per_prb").get<int>();
}

void to_json(json& j, const CellConfig& v) {
  j = json{{"num_prbs", v.num_prbs},
           {"slot_duration_s", v.slot_duration_s},
           {"prb_rate_table", v.prb_rate_table},
           {"ewma_alpha", v.ewma_alpha}};
}
void from_json(const json& j, CellConfig& v) {
  CellConfig d;
  v.num_prbs = j.value("num_prbs", d.num_prbs);
  v.slot_duration_s = j.value("slot_duration_s", d.slot_duration_s);
  v.ewma_alpha = j.value("ewma_alpha", d.ewma_alpha);
  v.prb_rate_table = j.contains("prb_rate_table")
                         ? j.at("prb_rate_table").get<std::vector<RateEntry>>()
                         : d.prb_rate_table;
}

void to_json(json& j, const ChannelConfig& v) {
  j = json{{"walk_step_db", v.walk_step_db}, {"walk_bound_db", v.walk_bound_db}};
}
void from_json(const json& j, ChannelConfig& v) {
  ChannelConfig d;
  v.walk_step_db = j.value("walk_step_db", d.walk_step_db);
  v.walk_bound_db = j.value("walk_bound_db", d.walk_bound_db);
}

void to_json(json& j, const SliceConfig& v) {
  j = json{{"slice_id", v.slice_id},
           {"name", v.name},
           {"throttle_limit_bps", v.throttle_limit_bps},
           {"priority_weight", v.priority_weight}};
}
void from_json(const json& j, SliceConfig& v) {
  v.slice_id = j.at("slice_id").get<int>();
  v.name = j.at("name").get<std::string>();
  v.throttle_limit_bps = j.value("throttle_limit_bps", kMaxThrottleBps);
  v.priority_weight = j.value("priority_weight", 1.0);
}

void to_json(json& j, const UeState& v) {
  j = json{{"ue_id", v.ue_id},
           {"slice_id", v.slice_id},
           {"tx_power_dbm", v.tx_power_dbm},
           {"snr_db", v.snr_db},
           {"snr_target_db", v.snr_target_db},
           {"backlog_bits", v.backlog_bits},
           {"avg_throughput_bps", v.avg_throughput_bps},
           {"path_gain_db", v.path_gain_db}};
}

void to_json(json& j, const UeKpi& v) {
  j = json{{"ue_id", v.ue_id},
           {"slice_id", v.slice_id},
           {"throughput_bps", v.throughput_bps},
           {"snr_db", v.snr_db},
           {"snr_target_db", v.snr_target_db},
           {"tx_power_dbm", v.tx_power_dbm},
           {"mcs_index", v.mcs_index},
           {"power_draw_mw", v.power_draw_mw},
           {"prbs_per_slot", v.prbs_per_slot}};
}
void from_json(const json& j, UeKpi& v) {
  v.ue_id = j.at("ue_id").get<int>();
  v.slice_id = j.at("slice_id").get<int>();
  v.throughput_bps = j.at("throughput_bps").get<double>();
  v.snr_db = j.at("snr_db").get<double>();
  v.snr_target_db = j.value("snr_target_db", 0.0);
  v.tx_power_dbm = j.at("tx_power_dbm").get<double>();
  v.mcs_index = j.at("mcs_index").get<int>();
  v.power_draw_mw = j.at("power_draw_mw").get<double>();
  v.prbs_per_slot = j.value("prbs_per_slot", 0.0);
}

void to_json(json& j, const SliceKpi& v) {
  j = json{{"slice_id", v.slice_id},
           {"name", v.name},
           {"ue_count", v.ue_count},
           {"aggregate_throughput_bps", v.aggregate_throughput_bps},
           {"prb_utilization", v.prb_utilization},
           {"throttle_limit_bps", v.throttle_limit_bps}};
}
void from_json(const json& j, SliceKpi& v) {
  v.slice_id = j.at("slice_id").get<int>();
  v.name = j.value("name", std::string{});
  v.ue_count = j.value("ue_count", 0);
  v.aggregate_throughput_bps = j.at("aggregate_throughput_bps").get<double>();
  v.prb_utilization = j.at("prb_utilization").get<double>();
  v.throttle_limit_bps = j.value("throttle_limit_bps", kMaxThrottleBps);
}

void to_json(json& j, const KpiSnapshot& v) {
  j = json{{"timestamp_s", v.timestamp_s},
           {"window_s", v.window_s},
           {"per_ue", v.per_ue},
           {"per_slice", v.per_slice}};
}
void from_json(const json& j, KpiSnapshot& v) {
  v.timestamp_s = j.at("timestamp_s").get<double>();
  v.window_s = j.value("window_s", 0.0);
  v.per_ue = j.at("per_ue").get<std::vector<UeKpi>>();
  v.per_slice = j.at("per_slice").get<std::vector<SliceKpi>>();
}

}  // namespace agentran::sim
