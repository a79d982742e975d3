#include "agentran/sim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "agentran/sim/csv.hpp"

namespace agentran::sim {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Uniform in [-1, 1), derived only from (seed, slot, ue index).
double unit_symmetric(std::uint64_t seed, std::uint64_t slot, std::size_t idx) {
  const std::uint64_t h = splitmix64(splitmix64(seed ^ splitmix64(slot)) + idx);
  const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
  return 2.0 * u - 1.0;
}

}  // namespace

void SimParams::validate() const {
  cell.validate();
  channel.validate();
  if (!(power.base_mw >= 0.0) || !(power.k > 0.0))
    throw ConfigError("power_model", "base_mw must be >= 0 and k > 0");
}

const SliceConfig* CellState::slice(int slice_id) const {
  auto it = std::find_if(slices.begin(), slices.end(),
                         [&](const SliceConfig& s) { return s.slice_id == slice_id; });
  return it == slices.end() ? nullptr : &*it;
}
SliceConfig* CellState::slice(int slice_id) {
  return const_cast<SliceConfig*>(std::as_const(*this).slice(slice_id));
}
const UeState* CellState::ue(int ue_id) const {
  auto it = std::find_if(ues.begin(), ues.end(), [&](const UeState& u) { return u.ue_id == ue_id; });
  return it == ues.end() ? nullptr : &*it;
}
UeState* CellState::ue(int ue_id) { return const_cast<UeState*>(std::as_const(*this).ue(ue_id)); }

CellState CellState::make(std::vector<UeSpec> ues, std::vector<SliceConfig> slices) {
  CellState s;
  s.slices = std::move(slices);
  for (const auto& sl : s.slices) sl.validate();
  for (std::size_t i = 0; i < s.slices.size(); ++i)
    for (std::size_t k = i + 1; k < s.slices.size(); ++k)
      if (s.slices[i].slice_id == s.slices[k].slice_id)
        throw ConfigError("slices", "duplicate slice_id " + std::to_string(s.slices[i].slice_id));
  for (std::size_t i = 0; i < ues.size(); ++i) {
    const auto& spec = ues[i];
    UeState u = spec.initial;
    const std::string field = "ues[" + std::to_string(i) + "]";
    if (s.ue(u.ue_id)) throw ConfigError(field, "duplicate ue_id");
    if (!s.slice(u.slice_id)) throw ConfigError(field + ".slice_id", "unknown slice");
    if (!(u.tx_power_dbm >= kMinTxPowerDbm && u.tx_power_dbm <= kMaxTxPowerDbm))
      throw ConfigError(field + ".tx_power_dbm", "must lie in [-40, 23]");
    if (u.backlog_bits < 0) throw ConfigError(field + ".backlog_bits", "must be >= 0");
    if (u.avg_throughput_bps < 0) throw ConfigError(field + ".avg_throughput_bps", "must be >= 0");
    if (!(spec.offered_load_bps >= 0) || !std::isfinite(spec.offered_load_bps))
      throw ConfigError(field + ".offered_load_bps", "must be >= 0");
    u.snr_db = u.tx_power_dbm + u.path_gain_db;
    s.ues.push_back(u);
    s.initial_path_gain_db.push_back(u.path_gain_db);
    s.offered_load_bps.push_back(spec.offered_load_bps);
    s.arrival_carry_bits.push_back(0.0);
  }
  return s;
}

int SlotRecord::granted_prbs() const {
  int n = 0;
  for (const auto& u : ues) n += u.prbs;
  return n;
}

std::pair<CellState, SlotRecord> step_slot(const CellState& state, const SimParams& params,
                                           std::uint64_t rng_seed) {
  const CellConfig& cell = params.cell;
  CellState next = state;
  const std::size_t n = next.ues.size();

  // (1) channel walk, (2) SNR
  const bool fading = params.channel.walk_step_db > 0.0 && params.channel.walk_bound_db > 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    UeState& ue = next.ues[i];
    if (fading) {
      const double step = params.channel.walk_step_db * unit_symmetric(rng_seed, state.slot_index, i);
      const double base = next.initial_path_gain_db[i];
      ue.path_gain_db = std::clamp(ue.path_gain_db + step, base - params.channel.walk_bound_db,
                                   base + params.channel.walk_bound_db);
    }
    ue.snr_db = ue.tx_power_dbm + ue.path_gain_db;
  }

  // (3) closed-loop power control, one command per UE per slot
  std::vector<TpcCommand> tpc(n, TpcCommand::kHold);
  for (std::size_t i = 0; i < n; ++i) {
    UeState& ue = next.ues[i];
    tpc[i] = compute_tpc(ue.snr_db, ue.snr_target_db);
    ue = apply_tpc(ue, tpc[i]);
    ue.snr_db = ue.tx_power_dbm + ue.path_gain_db;
  }

  // (4) scheduling
  const auto alloc = schedule_uplink(next.ues, next.slices, cell);
  std::map<int, int> prbs_of;
  for (const auto& a : alloc) prbs_of[a.ue_id] = a.prbs;

  // (5) service + EWMA, (6) arrivals
  SlotRecord rec;
  rec.slot_index = state.slot_index;
  rec.timestamp_s = static_cast<double>(state.slot_index + 1) * cell.slot_duration_s;
  rec.ues.reserve(n);
  const double alpha = cell.ewma_alpha;
  for (std::size_t i = 0; i < n; ++i) {
    UeState& ue = next.ues[i];
    const McsChoice mcs = mcs_from_snr(ue.snr_db, cell);
    const int prbs = prbs_of.count(ue.ue_id) ? prbs_of[ue.ue_id] : 0;
    const std::int64_t capacity = static_cast<std::int64_t>(prbs) * mcs.bits_per_prb;
    const std::int64_t served = std::min(capacity, ue.backlog_bits);
    ue.backlog_bits -= served;
    const double rate = static_cast<double>(served) / cell.slot_duration_s;
    ue.avg_throughput_bps = (1.0 - alpha) * ue.avg_throughput_bps + alpha * rate;

    const double arrivals = next.offered_load_bps[i] * cell.slot_duration_s + next.arrival_carry_bits[i];
    const double whole = std::floor(arrivals);
    next.arrival_carry_bits[i] = arrivals - whole;
    ue.backlog_bits += static_cast<std::int64_t>(whole);

    rec.ues.push_back(UeSlot{ue.ue_id, ue.slice_id, prbs, served, rate, ue.snr_db, ue.tx_power_dbm,
                             params.power.draw_mw(ue.tx_power_dbm), mcs.mcs_index, tpc[i]});
  }
  next.slot_index = state.slot_index + 1;
  return {std::move(next), std::move(rec)};
}

Simulator::Simulator(SimParams params, CellState initial, std::uint64_t seed, std::size_t history_slots)
    : params_(std::move(params)), state_(std::move(initial)), seed_(seed),
      history_cap_(std::max<std::size_t>(history_slots, 1)) {
  params_.validate();
}

const SlotRecord& Simulator::step() {
  auto [next, rec] = step_slot(state_, params_, seed_);
  state_ = std::move(next);
  if (slot_sink_) write_slot_csv(*slot_sink_, rec);
  history_.push_back(std::move(rec));
  if (history_.size() > history_cap_) history_.pop_front();
  return history_.back();
}

void Simulator::run_slots(std::uint64_t n) {
  for (std::uint64_t i = 0; i < n; ++i) step();
}

KpiSnapshot Simulator::collect_kpis(double window_s) const {
  if (history_.empty()) throw std::logic_error("collect_kpis before the first slot");
  const double slot = params_.cell.slot_duration_s;
  auto want = static_cast<std::size_t>(std::llround(std::max(window_s, 0.0) / slot));
  want = std::clamp<std::size_t>(want, 1, history_.size());

  const std::size_t n_ue = state_.ues.size();
  std::vector<double> bits(n_ue, 0.0), prbs(n_ue, 0.0), draw(n_ue, 0.0);
  for (auto it = history_.end() - static_cast<std::ptrdiff_t>(want); it != history_.end(); ++it) {
    for (std::size_t i = 0; i < n_ue && i < it->ues.size(); ++i) {
      bits[i] += static_cast<double>(it->ues[i].served_bits);
      prbs[i] += it->ues[i].prbs;
      draw[i] += it->ues[i].power_draw_mw;
    }
  }
  const double span_s = static_cast<double>(want) * slot;
  const auto& last = history_.back();

  KpiSnapshot snap;
  snap.timestamp_s = last.timestamp_s;
  snap.window_s = span_s;
  for (std::size_t i = 0; i < n_ue; ++i) {
    const UeState& ue = state_.ues[i];
    const UeSlot& ls = last.ues[i];
    snap.per_ue.push_back(UeKpi{ue.ue_id, ue.slice_id, bits[i] / span_s, ls.snr_db, ue.snr_target_db,
                                ls.tx_power_dbm, ls.mcs_index, draw[i] / static_cast<double>(want),
                                prbs[i] / static_cast<double>(want)});
  }
  const double prb_budget = static_cast<double>(want) * params_.cell.num_prbs;
  for (const auto& sl : state_.slices) {
    SliceKpi sk;
    sk.slice_id = sl.slice_id;
    sk.name = sl.name;
    sk.throttle_limit_bps = sl.throttle_limit_bps;
    double granted = 0.0;
    for (std::size_t i = 0; i < n_ue; ++i) {
      if (state_.ues[i].slice_id != sl.slice_id) continue;
      ++sk.ue_count;
      sk.aggregate_throughput_bps += bits[i] / span_s;
      granted += prbs[i];
    }
    sk.prb_utilization = std::clamp(granted / prb_budget, 0.0, 1.0);
    snap.per_slice.push_back(std::move(sk));
  }
  return snap;
}

void Simulator::set_snr_target(int ue_id, double target_db) {
  UeState* ue = state_.ue(ue_id);
  if (!ue) throw std::out_of_range("unknown ue_id " + std::to_string(ue_id));
  if (!std::isfinite(target_db)) throw std::invalid_argument("non-finite SNR target");
  ue->snr_target_db = target_db;
}

void Simulator::set_throttle_limit(int slice_id, double limit_bps) {
  SliceConfig* s = state_.slice(slice_id);
  if (!s) throw std::out_of_range("unknown slice_id " + std::to_string(slice_id));
  if (!(limit_bps >= kMinThrottleBps && limit_bps <= kMaxThrottleBps))
    throw std::invalid_argument("throttle limit outside [3e6, 1e8] bit/s");
  s->throttle_limit_bps = limit_bps;
}

void to_json(nlohmann::json& j, const UeSpec& v) {
  j = nlohmann::json{{"ue_id", v.initial.ue_id},
                     {"slice_id", v.initial.slice_id},
                     {"tx_power_dbm", v.initial.tx_power_dbm},
                     {"snr_target_db", v.initial.snr_target_db},
                     {"backlog_bits", v.initial.backlog_bits},
                     {"path_gain_db", v.initial.path_gain_db},
                     {"offered_load_bps", v.offered_load_bps}};
}

void from_json(const nlohmann::json& j, UeSpec& v) {
  v.initial.ue_id = j.at("ue_id").get<int>();
  v.initial.slice_id = j.at("slice_id").get<int>();
  v.initial.tx_power_dbm = j.at("tx_power_dbm").get<double>();
  v.initial.snr_target_db = j.at("snr_target_db").get<double>();
  v.initial.backlog_bits = j.value("backlog_bits", std::int64_t{0});
  v.initial.path_gain_db = j.at("path_gain_db").get<double>();
  v.initial.avg_throughput_bps = j.value("avg_throughput_bps", 0.0);
  v.offered_load_bps = j.value("offered_load_bps", 0.0);
}

}  // namespace agentran::sim
