#include "agentran/reasoner/rule_engine.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

namespace agentran::reasoner {

using model::ActionType;
using model::BatterySaving;
using model::ControlAction;
using model::Priority;
using model::SliceRequirement;

void to_json(Json& j, const RuleEngineConfig& c) {
  j = Json{{"throttle_step", c.throttle_step},
           {"backoff", c.backoff},
           {"spectral_setpoint_db", c.spectral_setpoint_db},
           {"moderate_setpoint_db", c.moderate_setpoint_db},
           {"battery_headroom", c.battery_headroom},
           {"snr_step_db", c.snr_step_db},
           {"delay_split_contended_dl", c.delay_split_contended_dl},
           {"guardrails", c.guardrails}};
}

void from_json(const Json& j, RuleEngineConfig& c) {
  c = RuleEngineConfig{};
  c.throttle_step = j.value("throttle_step", c.throttle_step);
  c.backoff = j.value("backoff", c.backoff);
  c.spectral_setpoint_db = j.value("spectral_setpoint_db", c.spectral_setpoint_db);
  c.moderate_setpoint_db = j.value("moderate_setpoint_db", c.moderate_setpoint_db);
  c.battery_headroom = j.value("battery_headroom", c.battery_headroom);
  c.snr_step_db = j.value("snr_step_db", c.snr_step_db);
  c.delay_split_contended_dl = j.value("delay_split_contended_dl", c.delay_split_contended_dl);
  if (j.contains("guardrails")) c.guardrails = j["guardrails"].get<model::GuardrailConfig>();
}

namespace {

constexpr double kEps = 1e-9;

std::string slice_name(const std::vector<SliceInfo>& slices, int id) {
  auto it = std::find_if(slices.begin(), slices.end(), [&](const SliceInfo& s) { return s.slice_id == id; });
  return it != slices.end() ? it->name : fmt::format("slice {}", id);
}

std::string join_names(const std::vector<std::string>& names) {
  if (names.empty()) return {};
  if (names.size() == 1) return names[0];
  std::string out;
  for (std::size_t i = 0; i + 1 < names.size(); ++i) out += (i ? ", " : "") + names[i];
  return out + " and " + names.back();
}

std::string mbps(double bps) { return fmt::format("{:g} Mbit/s", std::round(bps / 1e4) / 1e2); }

std::string ms(double s) { return fmt::format("{:g} ms", std::round(s * 1e6) / 1e3); }

}  // namespace

ReasonerOutput RuleEngine::decide(const PromptContext&, const ReasonerRequest& request) {
  ReasonerOutput out;
  switch (request.expected) {
    case OutputKind::kActions: out = decide_actions(request); break;
    case OutputKind::kSubIntents: out = decompose(request); break;
    case OutputKind::kReport: {
      if (!request.window) throw ReasonerError("a report needs a KPI window");
      const auto rep = model::build_context_report(to_string(request.role), *request.window, request.requirements);
      out.kind = OutputKind::kReport;
      out.payload = Json{{"summary_text", rep.summary_text}, {"constraints", rep.constraints}};
      out.rationale_text = "Aggregated the KPI window into slice means.";
      break;
    }
  }
  out.backend = name();
  return validate_output(out, request.expected);
}

ReasonerOutput RuleEngine::decide_actions(const ReasonerRequest& req) const {
  if (req.requirements.empty())
    throw ReasonerError("the rule engine needs structured requirements; use the llm backend for free-form intents");
  if (!req.window || req.window->empty()) throw ReasonerError("the rule engine needs at least one KPI sample");
  const auto& snap = req.window->latest();
  const auto& g = cfg_.guardrails;
  std::vector<ControlAction> actions;
  std::vector<std::string> why;

  std::vector<SliceRequirement> reqs = req.requirements;
  std::sort(reqs.begin(), reqs.end(), [](const auto& a, const auto& b) { return a.slice_id < b.slice_id; });
  auto req_of = [&](int slice) -> const SliceRequirement* {
    for (const auto& r : reqs)
      if (r.slice_id == slice) return &r;
    return nullptr;
  };

  if (req.role == AgentRole::kPowerControl) {
    std::vector<sim::UeKpi> ues = snap.per_ue;
    std::sort(ues.begin(), ues.end(), [](const auto& a, const auto& b) { return a.ue_id < b.ue_id; });
    for (const auto& u : ues) {
      const SliceRequirement* r = req_of(u.slice_id);
      if (!r) continue;
      const auto it = req.applied_snr_targets.find(u.ue_id);
      const double cur = it != req.applied_snr_targets.end() ? it->second : u.snr_target_db;
      const double obs = u.throughput_bps;
      const std::string who = fmt::format("UE {} ({})", u.ue_id, slice_name(req.slices, u.slice_id));
      const bool has_headroom = !r->min_throughput_bps || obs >= *r->min_throughput_bps * cfg_.battery_headroom;
      if (r->min_throughput_bps && obs < *r->min_throughput_bps) {
        if (cur < g.snr_target_max_db - kEps) {
          actions.push_back({ActionType::kSetSnrTarget, u.ue_id, cur + cfg_.snr_step_db});
          why.push_back(fmt::format("{} carries {} against a {} minimum, so its target SNR goes up by {:g} dB", who,
                                    mbps(obs), mbps(*r->min_throughput_bps), cfg_.snr_step_db));
        }
      } else if (r->battery_saving == BatterySaving::kAggressive) {
        if (has_headroom && cur > g.snr_target_min_db + kEps) {
          actions.push_back(
              {ActionType::kSetSnrTarget, u.ue_id, std::max(cur - cfg_.snr_step_db, g.snr_target_min_db)});
          why.push_back(fmt::format("{} must save battery and has throughput headroom ({}), so its target SNR "
                                    "steps down toward {:g} dB",
                                    who, mbps(obs), g.snr_target_min_db));
        }
      } else if (r->battery_saving == BatterySaving::kModerate) {
        const double sp = cfg_.moderate_setpoint_db;
        if (std::abs(cur - sp) > kEps && (has_headroom || cur < sp)) {
          actions.push_back({ActionType::kSetSnrTarget, u.ue_id, sp});
          why.push_back(fmt::format("{} saves battery moderately, so its target SNR moves toward {:g} dB", who, sp));
        }
      } else if (r->spectral_efficiency_focus.value_or(false)) {
        if (cur < cfg_.spectral_setpoint_db - kEps) {
          actions.push_back({ActionType::kSetSnrTarget, u.ue_id, cfg_.spectral_setpoint_db});
          why.push_back(fmt::format("{} needs high spectral efficiency, so its target SNR rises toward {:g} dB", who,
                                    cfg_.spectral_setpoint_db));
        }
      }
    }
  } else if (req.role == AgentRole::kUlResourceAllocation) {
    struct SliceView {
      int id;
      std::string name;
      int n;
      double obs;
      double throttle;
      const SliceRequirement* r;
    };
    std::vector<SliceView> view;
    int total_ues = 0;
    for (const auto& sk : snap.per_slice) {
      const auto it = req.applied_throttles.find(sk.slice_id);
      view.push_back({sk.slice_id, sk.name, sk.ue_count, sk.per_ue_throughput_bps(),
                      it != req.applied_throttles.end() ? it->second : sk.throttle_limit_bps, req_of(sk.slice_id)});
      total_ues += sk.ue_count;
    }
    std::sort(view.begin(), view.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    auto is_prio = [](const SliceView& v) { return v.r && v.r->priority == Priority::kHigh; };
    auto is_unmet = [](const SliceView& v) {
      return v.r && v.r->min_throughput_bps && v.obs < *v.r->min_throughput_bps;
    };
    std::map<int, double> set;
    auto propose = [&](const SliceView& v, double limit) {
      if (set.count(v.id)) return false;
      if (std::abs(limit - v.throttle) <= kEps) return false;
      set[v.id] = limit;
      return true;
    };

    for (const auto& v : view)
      if (is_prio(v) && v.throttle < g.throttle_max_bps - kEps && propose(v, g.throttle_max_bps))
        why.push_back(fmt::format("{} is high priority, so its throttling limit is lifted", v.name));

    bool any_unmet = false;
    for (const auto& u : view) {
      if (!is_unmet(u)) continue;
      any_unmet = true;
      for (const auto& c : view) {
        if (c.id == u.id || is_unmet(c)) continue;
        if (is_prio(c)) continue;  // high-priority slices are never throttled for others
        const double limit = std::max(g.throttle_min_bps, cfg_.backoff * std::min(c.throttle, c.obs));
        if (limit < c.throttle - kEps && propose(c, limit))
          why.push_back(fmt::format("{} carries {} per UE against a {} minimum, so {} backs off from {} to {}",
                                    u.name, mbps(u.obs), mbps(*u.r->min_throughput_bps), c.name, mbps(c.throttle),
                                    mbps(limit)));
      }
    }

    const bool no_prio = std::none_of(view.begin(), view.end(), is_prio);
    const bool no_min = std::none_of(reqs.begin(), reqs.end(), [](const auto& r) { return r.min_throughput_bps; });
    if (no_prio && no_min) {
      for (const auto& v : view)
        if (v.throttle < g.throttle_max_bps - kEps && propose(v, g.throttle_max_bps))
          why.push_back(fmt::format("No slice needs protection, so the throttling limit of {} is removed", v.name));
    }
    if (!any_unmet) {
      const double fair = total_ues > 0 ? snap.cell_throughput_bps() / total_ues : 0.0;
      for (const auto& s : view) {
        if (is_prio(s) || s.throttle >= g.throttle_max_bps - kEps || s.obs >= fair) continue;
        const double need = cfg_.throttle_step * s.throttle * s.n;
        bool slack = true;
        for (const auto& q : view)
          if (q.r && q.r->min_throughput_bps && (q.obs - *q.r->min_throughput_bps) * q.n < need) slack = false;
        if (!slack) continue;
        const double limit = std::min(g.throttle_max_bps, s.throttle * (1.0 + cfg_.throttle_step));
        if (propose(s, limit))
          why.push_back(fmt::format("{} is below its fair share ({} per UE) and the minimums keep enough slack, so "
                                    "its throttling limit rises from {} to {}",
                                    s.name, mbps(s.obs), mbps(s.throttle), mbps(limit)));
      }
    }

    for (const auto& [id, limit] : set) actions.push_back({ActionType::kSetThrottleLimit, id, limit});
  } else {
    throw ReasonerError("the rule engine has no control rules for role " + to_string(req.role));
  }

  ReasonerOutput out;
  out.kind = OutputKind::kActions;
  out.payload = actions_payload(actions);
  if (why.empty()) {
    out.rationale_text = "All requirements are met and every target is reached; nothing changes this cycle.";
  } else {
    std::string text;
    for (const auto& w : why) text += (text.empty() ? "" : " ") + w + ".";
    out.rationale_text = std::move(text);
  }
  return out;
}

std::string render_sub_intent_text(AgentRole role, const std::vector<SliceRequirement>& reqs,
                                   const std::vector<SliceInfo>& slices) {
  std::vector<std::string> sentences;
  auto name = [&](int id) { return slice_name(slices, id); };
  if (role == AgentRole::kPowerControl) {
    std::vector<std::string> high, high_free;
    for (const auto& r : reqs) {
      if (r.min_throughput_bps && r.battery_saving != BatterySaving::kAggressive)
        sentences.push_back(fmt::format("Increase target SNR for {} to ensure reliable communication and meet the {} "
                                        "minimum requirement per device.",
                                        name(r.slice_id), mbps(*r.min_throughput_bps)));
      if (r.battery_saving == BatterySaving::kAggressive)
        sentences.push_back(
            r.min_throughput_bps
                ? fmt::format("{} should have low power to save battery while keeping {} per device.",
                              name(r.slice_id), mbps(*r.min_throughput_bps))
                : fmt::format("{} should have low power to save battery.", name(r.slice_id)));
      else if (r.battery_saving == BatterySaving::kModerate)
        sentences.push_back(fmt::format("{} should save some battery with a moderate target SNR.", name(r.slice_id)));
      else if (r.spectral_efficiency_focus.value_or(false) && !r.min_throughput_bps)
        (r.battery_saving == BatterySaving::kNone ? high_free : high).push_back(name(r.slice_id));
    }
    if (!high_free.empty())
      sentences.insert(sentences.begin(),
                       fmt::format("Set high target SNR for {} to maximize throughput without considering battery "
                                   "consumption.",
                                   join_names(high_free)));
    if (!high.empty())
      sentences.insert(sentences.begin(),
                       fmt::format("{} should have high power for high spectral efficiency.", join_names(high)));
  } else {
    std::vector<std::string> unlimited;
    for (const auto& r : reqs) {
      const std::string n = name(r.slice_id);
      if (r.priority == Priority::kHigh && r.min_throughput_bps)
        sentences.push_back(fmt::format("Set {} as high priority and allocate sufficient resources to guarantee "
                                        "minimum {} throughput per device.",
                                        n, mbps(*r.min_throughput_bps)));
      else if (r.priority == Priority::kHigh)
        sentences.push_back(fmt::format("{} should be prioritized for scheduling.", n));
      else if (r.min_throughput_bps)
        sentences.push_back(fmt::format("{} requires {} throughput per device.", n, mbps(*r.min_throughput_bps)));
      else if (r.priority == Priority::kLow)
        sentences.push_back(fmt::format("Deprioritize {} to free resources for the other slices.", n));
      else if (r.priority == Priority::kNormal)
        unlimited.push_back(n);
      if (r.max_delay_s)
        sentences.push_back(fmt::format("Serve {} UEs with at most {} of delay.", n, ms(*r.max_delay_s)));
    }
    if (!unlimited.empty())
      sentences.insert(sentences.begin(),
                       fmt::format("Remove throughput limits for {} to allow maximum possible throughput while "
                                   "maintaining QoS requirements.",
                                   join_names(unlimited)));
  }
  if (sentences.empty()) return "Keep the current policy and report on performance.";
  std::string text;
  for (const auto& s : sentences) text += (text.empty() ? "" : " ") + s;
  return text;
}

ReasonerOutput RuleEngine::decompose(const ReasonerRequest& req) const {
  if (!req.intent) throw ReasonerError("decomposition needs an intent");
  if (req.intent->requirements.empty())
    throw ReasonerError("the rule engine needs structured requirements; use the llm backend for free-form intents");

  const ChildInfo* pc = nullptr;
  const ChildInfo* ul = nullptr;
  const ChildInfo* dl = nullptr;
  for (const auto& c : req.children) {
    if (c.role == AgentRole::kPowerControl && !pc) pc = &c;
    if (c.role == AgentRole::kUlResourceAllocation && !ul) ul = &c;
    if (c.role == AgentRole::kDlResourceAllocation && !dl) dl = &c;
  }
  if (!pc && !ul && !dl) throw ReasonerError("no child agents to decompose into");

  // Latest report per child decides which constraints are active.
  std::map<std::string, const model::ContextReport*> latest;
  for (const auto& r : req.context) latest[r.reporter] = &r;
  std::vector<model::ConstraintNote> notes;
  std::vector<std::string> reasons;
  for (const auto& [who, r] : latest)
    for (const auto& n : r->notes) {
      notes.push_back(n);
      reasons.push_back(fmt::format("{} reported: {}", who, n.text));
    }
  auto has_note = [&](const std::string& kind, std::optional<int> slice = std::nullopt) {
    return std::any_of(notes.begin(), notes.end(),
                       [&](const auto& n) { return n.kind == kind && (!slice || n.slice_id == *slice); });
  };
  const bool contention = has_note("contention");

  std::vector<SliceRequirement> parent = req.intent->requirements;
  std::sort(parent.begin(), parent.end(), [](const auto& a, const auto& b) { return a.slice_id < b.slice_id; });
  std::map<int, SliceRequirement> pc_reqs, ul_reqs, dl_reqs;
  for (const auto& p : parent) {
    SliceRequirement a, b, c;
    a.slice_id = b.slice_id = c.slice_id = p.slice_id;
    a.priority = p.priority;
    a.min_throughput_bps = p.min_throughput_bps;
    a.battery_saving = p.battery_saving;
    a.spectral_efficiency_focus = p.spectral_efficiency_focus;
    b.priority = p.priority;
    b.min_throughput_bps = p.min_throughput_bps;
    c.priority = p.priority;
    if (p.max_delay_s) {
      if (dl) {
        const double dl_share = contention ? cfg_.delay_split_contended_dl : 0.5;
        c.max_delay_s = *p.max_delay_s * dl_share;
        b.max_delay_s = *p.max_delay_s * (1.0 - dl_share);
      } else {
        b.max_delay_s = p.max_delay_s;
      }
    }
    pc_reqs[p.slice_id] = a;
    ul_reqs[p.slice_id] = b;
    if (c.max_delay_s) dl_reqs[p.slice_id] = c;
  }

  std::set<int> known;
  for (const auto& s : req.slices) known.insert(s.slice_id);
  for (const auto& p : parent) known.insert(p.slice_id);
  for (const auto& n : notes) {
    if (n.kind == "poor_mcs") {
      auto& r = pc_reqs[n.slice_id];
      r.slice_id = n.slice_id;
      r.spectral_efficiency_focus = true;
      r.battery_saving = BatterySaving::kNone;
    } else if (n.kind == "below_min") {
      auto& r = pc_reqs[n.slice_id];
      r.slice_id = n.slice_id;
      r.spectral_efficiency_focus = true;
      for (int other : known) {
        if (other == n.slice_id) continue;
        auto& o = ul_reqs[other];
        o.slice_id = other;
        if (o.priority != Priority::kHigh && !has_note("below_min", other)) o.priority = Priority::kLow;
      }
    }
  }

  auto collect = [](const std::map<int, SliceRequirement>& m) {
    std::vector<SliceRequirement> v;
    for (const auto& [_, r] : m)
      if (r.has_any()) v.push_back(r);
    return v;
  };
  Json subs = Json::array();
  auto emit = [&](const ChildInfo* child, const std::map<int, SliceRequirement>& m) {
    if (!child) return;
    const auto reqs = collect(m);
    if (reqs.empty()) return;
    subs.push_back({{"target_agent", child->agent_id},
                    {"body_text", render_sub_intent_text(child->role, reqs, req.slices)},
                    {"requirements", reqs}});
  };
  emit(pc, pc_reqs);
  emit(ul, ul_reqs);
  emit(dl, dl_reqs);

  ReasonerOutput out;
  out.kind = OutputKind::kSubIntents;
  out.payload = Json{{"sub_intents", subs}};
  std::string text = "Power control receives priorities, minimums, battery and spectral-efficiency goals; "
                     "resource allocation receives priorities, minimums and delay budgets.";
  if (contention && dl) text += " Uplink contention moves most of the delay budget to the uplink.";
  for (const auto& r : reasons) text += " " + r + ".";
  out.rationale_text = std::move(text);
  return out;
}

}  // namespace agentran::reasoner
