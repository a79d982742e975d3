#include "agentran/reasoner/intent_parser.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <regex>

namespace agentran::reasoner {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string> split_clauses(const std::string& text) {
  static const std::regex sep(R"([.;:!?](\s+|$))");
  std::vector<std::string> out;
  std::sregex_token_iterator it(text.begin(), text.end(), sep, -1), end;
  for (; it != end; ++it)
    if (!it->str().empty()) out.push_back(lower(it->str()));
  return out;
}

bool mentions(const std::string& clause, const std::string& name) {
  const std::regex word("\\b" + lower(name) + "\\b");
  return std::regex_search(clause, word);
}

// Position of the first negation marker, or npos.
std::size_t negation_pos(const std::string& clause) {
  static const std::regex neg(R"(\b(do not|don't|does not|doesn't|never|without|no need to|not)\b)");
  std::smatch m;
  if (std::regex_search(clause, m, neg)) return static_cast<std::size_t>(m.position(0));
  return std::string::npos;
}

struct Found {
  bool hit = false;
  std::size_t pos = 0;
};

Found find(const std::string& clause, const std::regex& re) {
  std::smatch m;
  if (std::regex_search(clause, m, re)) return {true, static_cast<std::size_t>(m.position(0))};
  return {};
}

void apply_clause(const std::string& c, model::SliceRequirement& r) {
  const std::size_t neg = negation_pos(c);
  auto negated = [&](const Found& f) { return neg != std::string::npos && neg < f.pos; };

  static const std::regex se(
      R"(spectr(al|um) efficien|maximi[sz]e (the )?(overall |total )?throughput|high (target )?snr|increase (the )?(target snr|transmission power|transmit power)|high power)");
  static const std::regex prio_high(R"(high[- ]priority|prioriti[sz](e|ed|es)\b(?! (spectr|spectral)))");
  static const std::regex prio_low(R"(low[- ]priority|deprioriti[sz])");
  static const std::regex throttle(R"(\bthrottl)");
  static const std::regex battery(R"(battery)");
  static const std::regex battery_lots(R"(lots of battery|a lot of battery|aggressive|maximi[sz]e battery|as much battery)");
  static const std::regex battery_secondary(R"(secondary|over battery)");
  static const std::regex rate(R"((\d+(?:\.\d+)?)\s*(gbit/s|gbps|mbit/s|mbps|mb/s|kbit/s|kbps))");
  static const std::regex rate_cap(R"(at most|no more than|up to|maximum of)");
  static const std::regex delay(R"((\d+(?:\.\d+)?)\s*ms\b)");
  static const std::regex delay_word(R"(delay|latency|rtt)");

  if (const Found f = find(c, se); f.hit) r.spectral_efficiency_focus = !negated(f);

  if (const Found f = find(c, prio_low); f.hit && !negated(f)) {
    r.priority = model::Priority::kLow;
  } else if (const Found f2 = find(c, prio_high); f2.hit) {
    r.priority = negated(f2) ? model::Priority::kNormal : model::Priority::kHigh;
  } else if (const Found f3 = find(c, throttle); f3.hit) {
    r.priority = negated(f3) ? model::Priority::kNormal : model::Priority::kLow;
  }

  if (const Found f = find(c, battery); f.hit) {
    if (negated(f) || find(c, battery_secondary).hit) r.battery_saving = model::BatterySaving::kNone;
    else if (find(c, battery_lots).hit) r.battery_saving = model::BatterySaving::kAggressive;
    else r.battery_saving = model::BatterySaving::kModerate;
  }

  std::smatch m;
  if (std::regex_search(c, m, rate) && !find(c, rate_cap).hit) {
    double v = std::stod(m[1].str());
    const std::string unit = m[2].str();
    if (unit[0] == 'g') v *= 1e9;
    else if (unit[0] == 'k') v *= 1e3;
    else v *= 1e6;
    r.min_throughput_bps = v;
  }
  if (std::regex_search(c, m, delay) && find(c, delay_word).hit) r.max_delay_s = std::stod(m[1].str()) / 1e3;
}

}  // namespace

std::vector<model::SliceRequirement> parse_intent_text(const std::string& text, std::span<const SliceInfo> slices) {
  static const std::regex global(
      R"(\b(any user|all users|every user|each user|the system|all ues|all slices|both|everyone|all classes)\b)");
  std::map<int, model::SliceRequirement> acc;
  for (const auto& clause : split_clauses(text)) {
    std::vector<int> targets;
    for (const auto& s : slices)
      if (mentions(clause, s.name)) targets.push_back(s.slice_id);
    if (targets.empty() && std::regex_search(clause, global))
      for (const auto& s : slices) targets.push_back(s.slice_id);
    for (int id : targets) {
      auto& r = acc[id];
      r.slice_id = id;
      apply_clause(clause, r);
    }
  }
  std::vector<model::SliceRequirement> out;
  for (auto& [_, r] : acc)
    if (r.has_any()) out.push_back(r);
  return out;
}

}  // namespace agentran::reasoner
