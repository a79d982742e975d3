#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "agentran/agents/deployment.hpp"
#include "agentran/model/intent.hpp"
#include "agentran/sim/simulator.hpp"

namespace agentran::gateway {

using Json = nlohmann::json;

class ScenarioError : public std::invalid_argument {
 public:
  ScenarioError(const std::string& field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(field) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

struct Phase {
  double start_s = 0.0;
  std::string intent_id;
  std::string body_text;
  std::vector<model::SliceRequirement> requirements;
  std::string domain;

  model::Intent intent() const;
  friend bool operator==(const Phase&, const Phase&) = default;
};

struct SliceSpec {
  sim::SliceConfig config;
  std::string description;

  friend bool operator==(const SliceSpec&, const SliceSpec&) = default;
};

struct ScenarioConfig {
  std::string name = "default";
  std::string description;
  sim::CellConfig cell;
  sim::ChannelConfig channel;
  sim::PowerModel power;
  std::vector<SliceSpec> slices;
  std::vector<sim::UeSpec> ues;
  std::vector<Phase> phases;
  std::uint64_t seed = 1;
  double duration_s = 270.0;
  double time_compression = 1.0;  // virtual seconds per wall second when paced
  double kpi_period_s = 1.0;
  agents::DeploymentDescriptor deployment = agents::default_deployment();

  // Throws ScenarioError naming the first offending field.
  void validate() const;
  std::vector<reasoner::SliceInfo> slice_infos() const;
  sim::SimParams sim_params() const;
  sim::CellState initial_state() const;
  std::size_t sample_count() const;  // KPI samples over the whole run
  // Phase whose interval (start, next start] contains t; -1 before the first.
  int phase_at(double t_s) const;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

void to_json(Json& j, const Phase& p);
void from_json(const Json& j, Phase& p);
void to_json(Json& j, const ScenarioConfig& c);
// Unknown top-level members are rejected.
void from_json(const Json& j, ScenarioConfig& c);

// Three FWA/MTC phases of 90 s each with the structured requirements of the
// original, emergency and post-emergency intents.
ScenarioConfig default_scenario();
ScenarioConfig load_scenario(const std::filesystem::path& path);
ScenarioConfig parse_scenario(const Json& j);

}  // namespace agentran::gateway
