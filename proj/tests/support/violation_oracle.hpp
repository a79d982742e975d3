#pragma once

// Reference violation episodes for one slice with a one-sample averaging
// window: an episode starts at the first of two consecutive failing samples
// and is resolved at the second of two consecutive passing samples.

#include <cstddef>
#include <vector>

#include "agentran/datalake/store.hpp"
#include "agentran/sim/types.hpp"

namespace agentran::oracle {

struct Episode {
  double start_s = 0.0;
  double end_s = 0.0;
  double observed = 0.0;
  bool resolved = false;
};

inline std::vector<Episode> expected_episodes(const std::vector<double>& t, const std::vector<double>& v,
                                              double required) {
  std::vector<Episode> out;
  const std::size_t n = v.size();
  auto fail = [&](std::size_t i) { return v[i] < required; };
  std::size_t i = 0;
  while (i + 1 < n) {
    if (!(fail(i) && fail(i + 1))) {
      ++i;
      continue;
    }
    Episode e{t[i], t[i], 0.0, false};
    double sum = 0.0;
    int count = 0;
    std::size_t k = i;
    for (; k < n; ++k) {
      if (fail(k)) {
        e.end_s = t[k];
        sum += v[k];
        ++count;
      } else if (k + 1 < n && !fail(k + 1)) {
        e.resolved = true;
        break;
      }
    }
    e.observed = sum / count;
    out.push_back(e);
    i = e.resolved ? k + 2 : n;
  }
  return out;
}

// One KPI sample carrying a single-UE slice at the given throughput.
inline sim::KpiSnapshot slice_sample(double t, int slice_id, double per_ue_bps) {
  sim::KpiSnapshot s;
  s.timestamp_s = t;
  s.window_s = 1.0;
  s.per_slice = {sim::SliceKpi{slice_id, "MTC", 1, per_ue_bps, 0.5, 1e8}};
  s.per_ue = {sim::UeKpi{1, slice_id, per_ue_bps, 15, 15, 10, 11, 2020, 25}};
  return s;
}

}  // namespace agentran::oracle
