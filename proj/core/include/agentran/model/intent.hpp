#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace agentran::model {

using Json = nlohmann::json;

enum class Priority { kHigh, kNormal, kLow };
enum class BatterySaving { kNone, kModerate, kAggressive };

std::string to_string(Priority p);
std::string to_string(BatterySaving b);
Priority priority_from_string(const std::string& s);
BatterySaving battery_from_string(const std::string& s);

class IntentError : public std::invalid_argument {
 public:
  IntentError(const std::string& field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(field) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// Unset fields mean "no requirement on this dimension".
struct SliceRequirement {
  int slice_id = 0;
  std::optional<Priority> priority;
  std::optional<double> min_throughput_bps;  // per UE
  std::optional<double> max_delay_s;
  std::optional<BatterySaving> battery_saving;
  std::optional<bool> spectral_efficiency_focus;

  bool has_any() const;
  bool is_quantitative() const { return min_throughput_bps.has_value(); }
  void validate(const std::string& where) const;
  friend bool operator==(const SliceRequirement&, const SliceRequirement&) = default;
};

struct Intent {
  std::string intent_id;
  std::string issuer = "operator";
  std::string body_text;
  std::vector<SliceRequirement> requirements;
  double timestamp_s = 0.0;
  std::string domain;  // empty: route by requirements

  const SliceRequirement* requirement(int slice_id) const;
  void validate() const;
  friend bool operator==(const Intent&, const Intent&) = default;
};

struct SubIntent {
  std::string sub_intent_id;
  std::string parent_intent_id;
  std::string issuer;
  std::string target_agent;
  std::string body_text;
  std::vector<SliceRequirement> requirements;
  int revision = 0;  // bumped on every renegotiation
  double timestamp_s = 0.0;

  const SliceRequirement* requirement(int slice_id) const;
  friend bool operator==(const SubIntent&, const SubIntent&) = default;
};

// Every field set on a parent requirement appears, with the same value, on the
// same slice in at least one of the children.
bool covers(const std::vector<SliceRequirement>& parent, const std::vector<const SubIntent*>& children);

void to_json(Json& j, const SliceRequirement& r);
void from_json(const Json& j, SliceRequirement& r);
void to_json(Json& j, const Intent& i);
void from_json(const Json& j, Intent& i);
void to_json(Json& j, const SubIntent& s);
void from_json(const Json& j, SubIntent& s);

}  // namespace agentran::model
