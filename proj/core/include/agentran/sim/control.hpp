#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "agentran/sim/types.hpp"

namespace agentran::sim {

class InvalidMeasurement : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Transmit power control step. Only these four steps exist on the air interface.
enum class TpcCommand : int { kDown1 = -1, kHold = 0, kUp1 = 1, kUp3 = 3 };

constexpr int step_db(TpcCommand c) noexcept { return static_cast<int>(c); }
TpcCommand tpc_from_db(int step);  // throws std::invalid_argument outside {-1,0,1,3}
std::string to_string(TpcCommand c);

inline constexpr double kTpcDeadbandDb = 0.5;
inline constexpr double kTpcBigStepThresholdDb = 4.0;

// err = target - snr. |err| <= 0.5 holds, err >= 4 jumps +3, small deficits
// step +1, any surplus beyond the deadband steps -1.
TpcCommand compute_tpc(double snr_db, double snr_target_db);

// Additive step, clamped to the device range [-40, 23] dBm.
UeState apply_tpc(UeState ue, TpcCommand cmd);

// Highest entry whose threshold is <= snr (inclusive); index 0 below the table.
McsChoice mcs_from_snr(double snr_db, const CellConfig& cell);

// Uplink proportional fair with per-slice throttling. A UE is eligible when it
// has backlog, a non-zero rate and avg_throughput_bps < its slice's throttle.
// Eligible UEs are ranked by weight * rate / max(avg, 1) (ties: lowest ue_id)
// and granted PRBs greedily, each capped at what drains its backlog.
// Returns only UEs with a non-zero grant, in grant order.
std::vector<Allocation> schedule_uplink(std::span<const UeState> ues,
                                        std::span<const SliceConfig> slices,
                                        const CellConfig& cell);

struct PowerModel {
  double base_mw = 2000.0;
  double k = 2.22;

  double draw_mw(double tx_power_dbm) const;
  friend bool operator==(const PowerModel&, const PowerModel&) = default;
};

// Convenience wrapper over the default calibration.
double ue_power_draw(double tx_power_dbm, const PowerModel& model = {});

void to_json(nlohmann::json& j, const PowerModel& v);
void from_json(const nlohmann::json& j, PowerModel& v);

}  // namespace agentran::sim
