#include "agentran/gateway/scenario.hpp"

#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <set>

namespace agentran::gateway {

namespace {

constexpr double kEps = 1e-9;

const std::set<std::string> kTopLevel = {"name",           "description", "cell",     "channel", "power_model",
                                         "slices",         "ues",         "phases",   "seed",    "duration_s",
                                         "time_compression", "kpi_period_s", "deployment"};

template <class T>
T field(const Json& j, const std::string& key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const std::exception& e) {
    throw ScenarioError(where + "." + key, e.what());
  }
}

}  // namespace

model::Intent Phase::intent() const {
  model::Intent i;
  i.intent_id = intent_id;
  i.issuer = "operator";
  i.body_text = body_text;
  i.requirements = requirements;
  i.timestamp_s = start_s;
  i.domain = domain;
  return i;
}

void to_json(Json& j, const Phase& p) {
  j = Json{{"start_s", p.start_s},
           {"intent_id", p.intent_id},
           {"body_text", p.body_text},
           {"requirements", p.requirements}};
  if (!p.domain.empty()) j["domain"] = p.domain;
}

void from_json(const Json& j, Phase& p) {
  p = Phase{};
  p.start_s = j.at("start_s").get<double>();
  p.intent_id = j.value("intent_id", std::string{});
  p.body_text = j.at("body_text").get<std::string>();
  p.requirements = j.value("requirements", std::vector<model::SliceRequirement>{});
  p.domain = j.value("domain", std::string{});
}

void to_json(Json& j, const ScenarioConfig& c) {
  Json slices = Json::array();
  for (const auto& s : c.slices) {
    Json sj = s.config;
    sj["description"] = s.description;
    slices.push_back(std::move(sj));
  }
  Json ues = Json::array();
  for (const auto& u : c.ues) ues.push_back(u);
  j = Json{{"name", c.name},
           {"description", c.description},
           {"cell", c.cell},
           {"channel", c.channel},
           {"power_model", c.power},
           {"slices", slices},
           {"ues", ues},
           {"phases", c.phases},
           {"seed", c.seed},
           {"duration_s", c.duration_s},
           {"time_compression", c.time_compression},
           {"kpi_period_s", c.kpi_period_s},
           {"deployment", c.deployment}};
}

void from_json(const Json& j, ScenarioConfig& c) {
  if (!j.is_object()) throw ScenarioError("scenario", "must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (!kTopLevel.count(key)) throw ScenarioError(key, "unknown member");
  c = ScenarioConfig{};
  c.slices.clear();
  c.name = j.value("name", c.name);
  c.description = j.value("description", std::string{});
  if (j.contains("cell")) c.cell = field<sim::CellConfig>(j, "cell", "scenario");
  if (j.contains("channel")) c.channel = field<sim::ChannelConfig>(j, "channel", "scenario");
  if (j.contains("power_model")) c.power = field<sim::PowerModel>(j, "power_model", "scenario");
  if (!j.contains("slices") || !j["slices"].is_array()) throw ScenarioError("slices", "must be an array");
  for (std::size_t i = 0; i < j["slices"].size(); ++i) {
    const Json& s = j["slices"][i];
    const std::string where = fmt::format("slices[{}]", i);
    SliceSpec spec;
    try {
      spec.config = s.get<sim::SliceConfig>();
    } catch (const std::exception& e) {
      throw ScenarioError(where, e.what());
    }
    spec.description = s.value("description", std::string{});
    c.slices.push_back(std::move(spec));
  }
  if (!j.contains("ues") || !j["ues"].is_array()) throw ScenarioError("ues", "must be an array");
  for (std::size_t i = 0; i < j["ues"].size(); ++i) {
    try {
      c.ues.push_back(j["ues"][i].get<sim::UeSpec>());
    } catch (const std::exception& e) {
      throw ScenarioError(fmt::format("ues[{}]", i), e.what());
    }
  }
  if (j.contains("phases")) {
    if (!j["phases"].is_array()) throw ScenarioError("phases", "must be an array");
    for (std::size_t i = 0; i < j["phases"].size(); ++i) {
      try {
        c.phases.push_back(j["phases"][i].get<Phase>());
      } catch (const model::IntentError& e) {
        throw ScenarioError(fmt::format("phases[{}].requirements.{}", i, e.field()), e.what());
      } catch (const std::exception& e) {
        throw ScenarioError(fmt::format("phases[{}]", i), e.what());
      }
    }
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !(j["seed"].is_number_integer() && j["seed"].get<std::int64_t>() >= 0))
      throw ScenarioError("seed", "must be a non-negative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  c.duration_s = j.contains("duration_s") ? field<double>(j, "duration_s", "scenario") : c.duration_s;
  c.time_compression = j.value("time_compression", c.time_compression);
  c.kpi_period_s = j.value("kpi_period_s", c.kpi_period_s);
  if (j.contains("deployment")) {
    try {
      c.deployment = j["deployment"].get<agents::DeploymentDescriptor>();
    } catch (const agents::DeploymentError& e) {
      throw ScenarioError("deployment." + e.field(), e.what());
    } catch (const std::exception& e) {
      throw ScenarioError("deployment", e.what());
    }
  }
  for (std::size_t i = 0; i < c.phases.size(); ++i)
    if (c.phases[i].intent_id.empty()) c.phases[i].intent_id = fmt::format("phase-{}", i + 1);
}

void ScenarioConfig::validate() const {
  try {
    sim_params().validate();
    (void)initial_state();
  } catch (const sim::ConfigError& e) {
    throw ScenarioError(e.field(), e.what());
  }
  if (slices.empty()) throw ScenarioError("slices", "at least one slice is required");
  if (ues.empty()) throw ScenarioError("ues", "at least one UE is required");
  if (!(duration_s > 0.0) || !std::isfinite(duration_s)) throw ScenarioError("duration_s", "must be positive");
  if (!(time_compression >= 1.0) || !std::isfinite(time_compression))
    throw ScenarioError("time_compression", "must be >= 1");
  if (!(kpi_period_s > 0.0) || !std::isfinite(kpi_period_s))
    throw ScenarioError("kpi_period_s", "must be positive");
  const double slots_per_period = kpi_period_s / cell.slot_duration_s;
  if (std::abs(slots_per_period - std::round(slots_per_period)) > 1e-6 || std::round(slots_per_period) < 1)
    throw ScenarioError("kpi_period_s", "must be a whole number of slots");
  const double periods = duration_s / kpi_period_s;
  if (std::abs(periods - std::round(periods)) > 1e-6)
    throw ScenarioError("duration_s", "must be a whole number of KPI periods");
  std::set<int> slice_ids;
  for (const auto& s : slices) slice_ids.insert(s.config.slice_id);
  std::set<std::string> ids;
  for (std::size_t i = 0; i < phases.size(); ++i) {
    const auto& p = phases[i];
    const std::string where = fmt::format("phases[{}]", i);
    if (!(p.start_s >= 0.0) || !std::isfinite(p.start_s)) throw ScenarioError(where + ".start_s", "must be >= 0");
    if (i > 0 && !(p.start_s > phases[i - 1].start_s))
      throw ScenarioError(where + ".start_s", "phase starts must be strictly increasing");
    if (!(p.start_s < duration_s)) throw ScenarioError(where + ".start_s", "must be before duration_s");
    if (p.body_text.empty()) throw ScenarioError(where + ".body_text", "must not be empty");
    if (!ids.insert(p.intent_id).second) throw ScenarioError(where + ".intent_id", "duplicate intent id");
    for (const auto& r : p.requirements) {
      if (!slice_ids.count(r.slice_id))
        throw ScenarioError(where + ".requirements.slice_id", fmt::format("unknown slice {}", r.slice_id));
      try {
        r.validate(where + ".requirements");
      } catch (const model::IntentError& e) {
        throw ScenarioError(e.field(), e.what());
      }
    }
  }
  try {
    deployment.validate();
  } catch (const agents::DeploymentError& e) {
    throw ScenarioError("deployment." + e.field(), e.what());
  }
}

std::vector<reasoner::SliceInfo> ScenarioConfig::slice_infos() const {
  std::vector<reasoner::SliceInfo> out;
  for (const auto& s : slices) {
    reasoner::SliceInfo info;
    info.slice_id = s.config.slice_id;
    info.name = s.config.name;
    info.description = s.description;
    for (const auto& u : ues)
      if (u.initial.slice_id == s.config.slice_id) info.ue_ids.push_back(u.initial.ue_id);
    out.push_back(std::move(info));
  }
  return out;
}

sim::SimParams ScenarioConfig::sim_params() const { return sim::SimParams{cell, channel, power}; }

sim::CellState ScenarioConfig::initial_state() const {
  std::vector<sim::SliceConfig> sc;
  for (const auto& s : slices) sc.push_back(s.config);
  return sim::CellState::make(ues, sc);
}

std::size_t ScenarioConfig::sample_count() const {
  return static_cast<std::size_t>(std::llround(duration_s / kpi_period_s));
}

int ScenarioConfig::phase_at(double t_s) const {
  int idx = -1;
  for (std::size_t i = 0; i < phases.size(); ++i)
    if (t_s > phases[i].start_s + kEps || (i == 0 && t_s >= phases[i].start_s - kEps)) idx = static_cast<int>(i);
  return idx;
}

ScenarioConfig default_scenario() {
  using model::BatterySaving;
  using model::Priority;
  using model::SliceRequirement;
  ScenarioConfig c;
  c.name = "fwa-mtc-three-phase";
  c.description =
      "A single uplink cell serving two slices: FWA (fixed wireless access, grid powered, throughput hungry) and "
      "MTC (battery-powered CCTV cameras). Power control steers per-UE SNR targets; the uplink scheduler enforces "
      "per-slice throughput limits on top of proportional fair scheduling.";
  c.channel.walk_step_db = 0.0;
  c.channel.walk_bound_db = 0.0;
  c.slices = {SliceSpec{sim::SliceConfig{1, "FWA", sim::kMaxThrottleBps, 1.0},
                        "Fixed wireless access subscribers; grid powered."},
              SliceSpec{sim::SliceConfig{2, "MTC", sim::kMaxThrottleBps, 1.0},
                        "Machine-type CCTV cameras; battery powered."}};
  auto ue = [](int id, int slice, double pg) {
    sim::UeSpec u;
    u.initial.ue_id = id;
    u.initial.slice_id = slice;
    u.initial.snr_target_db = 15.0;
    u.initial.path_gain_db = pg;
    u.initial.tx_power_dbm = 15.0 - pg;
    u.offered_load_bps = 1e8;
    return u;
  };
  c.ues = {ue(1, 1, -3.0), ue(2, 1, -5.0), ue(3, 2, -2.0)};

  auto req = [](int slice) {
    SliceRequirement r;
    r.slice_id = slice;
    return r;
  };
  SliceRequirement o1 = req(1), o2 = req(2);
  for (auto* r : {&o1, &o2}) {
    r->priority = Priority::kNormal;
    r->battery_saving = BatterySaving::kNone;
    r->spectral_efficiency_focus = true;
  }
  SliceRequirement e2 = req(2);
  e2.priority = Priority::kHigh;
  e2.min_throughput_bps = 30e6;
  SliceRequirement p1 = req(1), p2 = req(2);
  p1.priority = Priority::kHigh;
  p1.spectral_efficiency_focus = true;
  p2.min_throughput_bps = 5e6;
  p2.battery_saving = BatterySaving::kAggressive;

  c.phases = {
      Phase{0.0, "original",
            "Maximize the overall throughput of the system and do not throttle any user or try to save battery.",
            {o1, o2}, ""},
      Phase{90.0, "emergency",
            "There was a life-emergency: all MTC sensors are high priority and need 30 Mbit/s minimum.", {e2}, ""},
      Phase{180.0, "post-emergency",
            "Incident finished. FWA should be prioritized with high spectral efficiency. MTC has 5 Mbit/s and needs "
            "to save lots of battery.",
            {p1, p2}, ""}};
  c.seed = 7;
  c.duration_s = 270.0;
  c.time_compression = 1.0;
  c.kpi_period_s = 1.0;
  return c;
}

ScenarioConfig parse_scenario(const Json& j) {
  auto c = j.get<ScenarioConfig>();
  c.validate();
  return c;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("config", "cannot open " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    throw ScenarioError("config", std::string("invalid JSON: ") + e.what());
  }
  return parse_scenario(j);
}

}  // namespace agentran::gateway
