#pragma once

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "agentran/sim/control.hpp"
#include "agentran/sim/types.hpp"

namespace agentran::sim {

struct UeSpec {
  UeState initial;
  double offered_load_bps = 0.0;

  friend bool operator==(const UeSpec&, const UeSpec&) = default;
};

// Everything step_slot needs besides the evolving state.
struct SimParams {
  CellConfig cell;
  ChannelConfig channel;
  PowerModel power;

  void validate() const;
};

struct CellState {
  std::uint64_t slot_index = 0;
  std::vector<UeState> ues;
  std::vector<SliceConfig> slices;
  std::vector<double> initial_path_gain_db;  // parallel to ues
  std::vector<double> offered_load_bps;      // parallel to ues
  std::vector<double> arrival_carry_bits;    // fractional arrivals, parallel to ues

  double time_s(const CellConfig& cell) const {
    return static_cast<double>(slot_index) * cell.slot_duration_s;
  }
  const SliceConfig* slice(int slice_id) const;
  SliceConfig* slice(int slice_id);
  UeState* ue(int ue_id);
  const UeState* ue(int ue_id) const;

  static CellState make(std::vector<UeSpec> ues, std::vector<SliceConfig> slices);
  friend bool operator==(const CellState&, const CellState&) = default;
};

struct UeSlot {
  int ue_id = 0;
  int slice_id = 0;
  int prbs = 0;
  std::int64_t served_bits = 0;
  double throughput_bps = 0.0;
  double snr_db = 0.0;
  double tx_power_dbm = 0.0;
  double power_draw_mw = 0.0;
  int mcs_index = 0;
  TpcCommand tpc = TpcCommand::kHold;

  friend bool operator==(const UeSlot&, const UeSlot&) = default;
};

struct SlotRecord {
  std::uint64_t slot_index = 0;
  double timestamp_s = 0.0;  // end of the slot
  std::vector<UeSlot> ues;

  int granted_prbs() const;
  friend bool operator==(const SlotRecord&, const SlotRecord&) = default;
};

// One slot: channel walk, SNR update, TPC, scheduling, service + EWMA, arrivals.
// Pure: identical (state, params, seed) give identical results.
std::pair<CellState, SlotRecord> step_slot(const CellState& state, const SimParams& params,
                                           std::uint64_t rng_seed);

// Owns a CellState plus the slot history used for windowed KPIs.
class Simulator {
 public:
  Simulator(SimParams params, CellState initial, std::uint64_t seed,
            std::size_t history_slots = 10000);

  const SlotRecord& step();
  void run_slots(std::uint64_t n);

  const CellState& state() const { return state_; }
  const SimParams& params() const { return params_; }
  double now_s() const { return state_.time_s(params_.cell); }
  std::uint64_t elapsed_slots() const { return state_.slot_index; }
  const std::deque<SlotRecord>& history() const { return history_; }

  // Throughput/PRB figures over the last window_s; truncated to what has
  // elapsed (and to the retained history). Throws std::logic_error before
  // the first slot.
  KpiSnapshot collect_kpis(double window_s) const;

  void set_snr_target(int ue_id, double target_db);
  void set_throttle_limit(int slice_id, double limit_bps);

  void set_slot_sink(std::ostream* csv) { slot_sink_ = csv; }

 private:
  SimParams params_;
  CellState state_;
  std::uint64_t seed_;
  std::size_t history_cap_;
  std::deque<SlotRecord> history_;
  std::ostream* slot_sink_ = nullptr;
};

void to_json(nlohmann::json& j, const UeSpec& v);
void from_json(const nlohmann::json& j, UeSpec& v);

}  // namespace agentran::sim
