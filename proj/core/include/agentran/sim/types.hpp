#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace agentran::sim {

inline constexpr double kMinTxPowerDbm = -40.0;
inline constexpr double kMaxTxPowerDbm = 23.0;
inline constexpr double kMinThrottleBps = 3e6;
inline constexpr double kMaxThrottleBps = 1e8;

class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(field) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

struct RateEntry {
  double snr_threshold_db = 0.0;
  int bits_per_prb = 0;

  friend bool operator==(const RateEntry&, const RateEntry&) = default;
};

// CQI-like 15-entry table: spectral efficiency x 360 bits per PRB per slot.
std::vector<RateEntry> default_rate_table();

struct CellConfig {
  int num_prbs = 50;
  double slot_duration_s = 0.001;
  std::vector<RateEntry> prb_rate_table = default_rate_table();
  double ewma_alpha = 0.01;

  void validate() const;
  friend bool operator==(const CellConfig&, const CellConfig&) = default;
};

struct ChannelConfig {
  double walk_step_db = 0.1;
  double walk_bound_db = 6.0;

  void validate() const;
  friend bool operator==(const ChannelConfig&, const ChannelConfig&) = default;
};

struct SliceConfig {
  int slice_id = 0;
  std::string name;
  double throttle_limit_bps = kMaxThrottleBps;
  double priority_weight = 1.0;

  void validate() const;
  friend bool operator==(const SliceConfig&, const SliceConfig&) = default;
};

struct UeState {
  int ue_id = 0;
  int slice_id = 0;
  double tx_power_dbm = 0.0;
  double snr_db = 0.0;
  double snr_target_db = 0.0;
  std::int64_t backlog_bits = 0;
  double avg_throughput_bps = 0.0;
  double path_gain_db = 0.0;

  friend bool operator==(const UeState&, const UeState&) = default;
};

struct Allocation {
  int ue_id = 0;
  int prbs = 0;

  friend bool operator==(const Allocation&, const Allocation&) = default;
};

struct McsChoice {
  int mcs_index = 0;
  int bits_per_prb = 0;

  friend bool operator==(const McsChoice&, const McsChoice&) = default;
};

struct UeKpi {
  int ue_id = 0;
  int slice_id = 0;
  double throughput_bps = 0.0;
  double snr_db = 0.0;
  double snr_target_db = 0.0;
  double tx_power_dbm = 0.0;
  int mcs_index = 0;
  double power_draw_mw = 0.0;
  double prbs_per_slot = 0.0;

  friend bool operator==(const UeKpi&, const UeKpi&) = default;
};

struct SliceKpi {
  int slice_id = 0;
  std::string name;
  int ue_count = 0;
  double aggregate_throughput_bps = 0.0;
  double prb_utilization = 0.0;
  double throttle_limit_bps = kMaxThrottleBps;

  double per_ue_throughput_bps() const {
    return ue_count > 0 ? aggregate_throughput_bps / ue_count : 0.0;
  }
  friend bool operator==(const SliceKpi&, const SliceKpi&) = default;
};

struct KpiSnapshot {
  double timestamp_s = 0.0;
  double window_s = 0.0;
  std::vector<UeKpi> per_ue;
  std::vector<SliceKpi> per_slice;

  const SliceKpi* slice(int slice_id) const;
  const UeKpi* ue(int ue_id) const;
  double cell_throughput_bps() const;

  friend bool operator==(const KpiSnapshot&, const KpiSnapshot&) = default;
};

void to_json(nlohmann::json& j, const RateEntry& v);
void from_json(const nlohmann::json& j, RateEntry& v);
void to_json(nlohmann::json& j, const CellConfig& v);
void from_json(const nlohmann::json& j, CellConfig& v);
void to_json(nlohmann::json& j, const ChannelConfig& v);
void from_json(const nlohmann::json& j, ChannelConfig& v);
void to_json(nlohmann::json& j, const SliceConfig& v);
void from_json(const nlohmann::json& j, SliceConfig& v);
void to_json(nlohmann::json& j, const UeState& v);
void to_json(nlohmann::json& j, const UeKpi& v);
void from_json(const nlohmann::json& j, UeKpi& v);
void to_json(nlohmann::json& j, const SliceKpi& v);
void from_json(const nlohmann::json& j, SliceKpi& v);
void to_json(nlohmann::json& j, const KpiSnapshot& v);
void from_json(const nlohmann::json& j, KpiSnapshot& v);

}  // namespace agentran::sim
