#pragma once

#include <iosfwd>
#include <string_view>

#include "agentran/sim/simulator.hpp"
#include "agentran/sim/types.hpp"

namespace agentran::sim {

// timestamp_s,ue_id,slice_id,prbs,throughput_bps,snr_db,tx_power_dbm,power_draw_mw
inline constexpr std::string_view kSlotCsvHeader =
    "timestamp_s,ue_id,slice_id,prbs,throughput_bps,snr_db,tx_power_dbm,power_draw_mw";

void write_csv_header(std::ostream& out);
void write_slot_csv(std::ostream& out, const SlotRecord& rec);
// Same columns for a windowed snapshot; prbs is the mean grant per slot.
void write_kpi_csv(std::ostream& out, const KpiSnapshot& snap);

}  // namespace agentran::sim
