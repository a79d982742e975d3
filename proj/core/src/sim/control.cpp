#include "agentran/sim/control.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace agentran::sim {

TpcCommand tpc_from_db(int step) {
  switch (step) {
    case -1: return TpcCommand::kDown1;
    case 0: return TpcCommand::kHold;
    case 1: return TpcCommand::kUp1;
    case 3: return TpcCommand::kUp3;
    default: throw std::invalid_argument("TPC step outside {-1, 0, +1, +3}: " + std::to_string(step));
  }
}

std::string to_string(TpcCommand c) {
  switch (c) {
    case TpcCommand::kDown1: return "-1";
    case TpcCommand::kHold: return "0";
    case TpcCommand::kUp1: return "+1";
    case TpcCommand::kUp3: return "+3";
  }
  return "?";
}

TpcCommand compute_tpc(double snr_db, double snr_target_db) {
  if (!std::isfinite(snr_db) || !std::isfinite(snr_target_db))
    throw InvalidMeasurement("non-finite SNR measurement or target");
  const double err = snr_target_db - snr_db;
  if (std::abs(err) <= kTpcDeadbandDb) return TpcCommand::kHold;
  if (err >= kTpcBigStepThresholdDb) return TpcCommand::kUp3;
  if (err > 0.0) return TpcCommand::kUp1;
  return TpcCommand::kDown1;
}

UeState apply_tpc(UeState ue, TpcCommand cmd) {
  ue.tx_power_dbm = std::clamp(ue.tx_power_dbm + step_db(cmd), kMinTxPowerDbm, kMaxTxPowerDbm);
  return ue;
}

McsChoice mcs_from_snr(double snr_db, const CellConfig& cell) {
  const auto& table = cell.prb_rate_table;
  if (table.empty()) throw std::invalid_argument("empty PRB rate table");
  auto it = std::upper_bound(table.begin(), table.end(), snr_db,
                             [](double v, const RateEntry& e) { return v < e.snr_threshold_db; });
  if (it == table.begin()) return {0, table.front().bits_per_prb};
  const auto idx = static_cast<int>(std::distance(table.begin(), it) - 1);
  return {idx, table[static_cast<std::size_t>(idx)].bits_per_prb};
}

std::vector<Allocation> schedule_uplink(std::span<const UeState> ues,
                                        std::span<const SliceConfig> slices,
                                        const CellConfig& cell) {
  std::map<int, const SliceConfig*> by_id;
  for (const auto& s : slices) by_id[s.slice_id] = &s;

  struct Candidate {
    double metric;
    int ue_id;
    std::int64_t need_prbs;
  };
  std::vector<Candidate> cands;
  cands.reserve(ues.size());
  for (const auto& ue : ues) {
    auto it = by_id.find(ue.slice_id);
    if (it == by_id.end())
      throw std::invalid_argument("UE " + std::to_string(ue.ue_id) + " references unknown slice " +
                                  std::to_string(ue.slice_id));
    const SliceConfig& slice = *it->second;
    if (ue.backlog_bits <= 0) continue;
    if (!(ue.avg_throughput_bps < slice.throttle_limit_bps)) continue;
    const int bits = mcs_from_snr(ue.snr_db, cell).bits_per_prb;
    if (bits <= 0) continue;
    const double rate = static_cast<double>(bits) / cell.slot_duration_s;
    const double metric = slice.priority_weight * rate / std::max(ue.avg_throughput_bps, 1.0);
    const std::int64_t need = (ue.backlog_bits + bits - 1) / bits;
    cands.push_back({metric, ue.ue_id, need});
  }
  std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    if (a.metric != b.metric) return a.metric > b.metric;
    return a.ue_id < b.ue_id;
  });

  std::vector<Allocation> out;
  std::int64_t remaining = cell.num_prbs;
  for (const auto& c : cands) {
    if (remaining <= 0) break;
    const auto grant = std::min(c.need_prbs, remaining);
    out.push_back({c.ue_id, static_cast<int>(grant)});
    remaining -= grant;
  }
  return out;
}

double PowerModel::draw_mw(double tx_power_dbm) const {
  return base_mw + k * std::pow(10.0, tx_power_dbm / 10.0);
}

double ue_power_draw(double tx_power_dbm, const PowerModel& model) {
  return model.draw_mw(tx_power_dbm);
}

void to_json(nlohmann::json& j, const PowerModel& v) {
  j = nlohmann::json{{"base_mw", v.base_mw}, {"k", v.k}};
}
void from_json(const nlohmann::json& j, PowerModel& v) {
  PowerModel d;
  v.base_mw = j.value("base_mw", d.base_mw);
  v.k = j.value("k", d.k);
}

}  // namespace agentran::sim
