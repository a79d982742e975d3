#include "agentran/sim/csv.hpp"

#include <cstdio>
#include <ostream>

namespace agentran::sim {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_csv_header(std::ostream& out) { out << kSlotCsvHeader << '\n'; }

void write_slot_csv(std::ostream& out, const SlotRecord& rec) {
  for (const auto& u : rec.ues) {
    out << num(rec.timestamp_s) << ',' << u.ue_id << ',' << u.slice_id << ',' << u.prbs << ','
        << num(u.throughput_bps) << ',' << num(u.snr_db) << ',' << num(u.tx_power_dbm) << ','
        << num(u.power_draw_mw) << '\n';
  }
}

void write_kpi_csv(std::ostream& out, const KpiSnapshot& snap) {
  for (const auto& u : snap.per_ue) {
    out << num(snap.timestamp_s) << ',' << u.ue_id << ',' << u.slice_id << ',' << num(u.prbs_per_slot)
        << ',' << num(u.throughput_bps) << ',' << num(u.snr_db) << ',' << num(u.tx_power_dbm) << ','
        << num(u.power_draw_mw) << '\n';
  }
}

}  // namespace agentran::sim
