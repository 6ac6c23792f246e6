#pragma once

#include <algorithm>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "rrcpsp/adversary.hpp"
#include "rrcpsp/graph.hpp"
#include "rrcpsp/instance.hpp"
#include "rrcpsp/json_io.hpp"
#include "rrcpsp/network.hpp"

namespace rrcpsp {

struct Schedule {
  std::vector<Time> start;
  std::vector<Time> durations_used;

  Time makespan() const { return start.empty() ? 0 : start.back() + durations_used.back(); }
};

/// Latest finish times from a backward pass over E with the given durations.
inline std::vector<Time> latest_finish_times(const ProjectInstance& inst, std::span<const Time> dur, Time horizon) {
  const auto order = topological_order(inst.size(), inst.arcs);
  const auto succ = successor_lists(inst.size(), inst.arcs);
  std::vector<Time> lf(inst.size(), horizon);
  for (auto it = order.rbegin(); it != order.rend(); ++it)
    for (auto j : succ[*it]) lf[*it] = std::min(lf[*it], lf[j] - dur[j]);
  return lf;
}

inline std::vector<Time> earliest_start_times(const ProjectInstance& inst, std::span<const Time> dur) {
  const auto order = topological_order(inst.size(), inst.arcs);
  const auto succ = successor_lists(inst.size(), inst.arcs);
  std::vector<Time> es(inst.size(), 0);
  for (auto u : order)
    for (auto j : succ[u]) es[j] = std::max(es[j], es[u] + dur[u]);
  return es;
}

namespace heuristics_detail {

// Resource usage per unit time slot. A zero-duration activity occupies the
// slot at its start instant.
class Profile {
 public:
  explicit Profile(const ProjectInstance& inst) : inst_(inst) {}

  bool fits(ActivityId a, Time t, Time dur) const {
    const Time end = t + std::max<Time>(dur, 1);
    for (Time tau = t; tau < end; ++tau)
      for (std::size_t k = 0; k < inst_.num_resources(); ++k)
        if (used(tau, k) + inst_.requirement[a][k] > inst_.capacity[k]) return false;
    return true;
  }

  void place(ActivityId a, Time t, Time dur) {
    const Time end = t + std::max<Time>(dur, 1);
    if (static_cast<std::size_t>(end) > usage_.size())
      usage_.resize(static_cast<std::size_t>(end), std::vector<Time>(inst_.num_resources(), 0));
    for (Time tau = t; tau < end; ++tau)
      for (std::size_t k = 0; k < inst_.num_resources(); ++k) usage_[static_cast<std::size_t>(tau)][k] += inst_.requirement[a][k];
  }

 private:
  Time used(Time tau, std::size_t k) const {
    return static_cast<std::size_t>(tau) < usage_.size() ? usage_[static_cast<std::size_t>(tau)][k] : 0;
  }

  const ProjectInstance& inst_;
  std::vector<std::vector<Time>> usage_;
};

}  // namespace heuristics_detail

/// Serial schedule-generation scheme with the latest-finish-time priority
/// rule on nominal durations. Priorities come from a backward pass with
/// horizon sum(nominal); ties go to the smaller id.
inline Schedule lft_schedule(const ProjectInstance& inst) {
  const std::size_t n = inst.size();
  const std::span<const Time> dur(inst.nominal);
  const Time horizon = std::accumulate(inst.nominal.begin(), inst.nominal.end(), Time{0});
  const auto lf = latest_finish_times(inst, dur, horizon);
  const auto pred = predecessor_lists(n, inst.arcs);

  Schedule s;
  s.start.assign(n, 0);
  s.durations_used = inst.nominal;
  std::vector<bool> done(n, false);
  heuristics_detail::Profile profile(inst);
  for (std::size_t step = 0; step < n; ++step) {
    ActivityId pick = n;
    for (ActivityId j = 0; j < n; ++j) {
      if (done[j]) continue;
      if (!std::all_of(pred[j].begin(), pred[j].end(), [&](ActivityId i) { return done[i]; })) continue;
      if (pick == n || lf[j] < lf[pick]) pick = j;
    }
    Time t = 0;
    for (auto i : pred[pick]) t = std::max(t, s.start[i] + dur[i]);
    while (!profile.fits(pick, t, dur[pick])) ++t;
    profile.place(pick, t, dur[pick]);
    s.start[pick] = t;
    done[pick] = true;
  }
  return s;
}

/// Empty when the schedule respects precedence and, at every integer time,
/// every capacity. Otherwise a description of the first violation.
inline std::string audit_schedule(const ProjectInstance& inst, const Schedule& s) {
  if (s.start.size() != inst.size() || s.durations_used.size() != inst.size()) return "wrong vector lengths";
  if (s.start[0] != 0) return "source does not start at 0";
  for (const auto& a : inst.arcs)
    if (s.start[a.to] < s.start[a.from] + s.durations_used[a.from])
      return "precedence " + std::to_string(a.from) + "->" + std::to_string(a.to) + " violated";
  const Time end = s.makespan() + 1;
  for (Time t = 0; t <= end; ++t)
    for (std::size_t k = 0; k < inst.num_resources(); ++k) {
      Time load = 0;
      for (ActivityId i = 0; i < inst.size(); ++i) {
        const Time d = s.durations_used[i];
        const bool active = d > 0 ? (s.start[i] <= t && t < s.start[i] + d) : s.start[i] == t;
        if (active) load += inst.requirement[i][k];
      }
      if (load > inst.capacity[k])
        return "resource " + std::to_string(k) + " overloaded at t=" + std::to_string(t);
    }
  return {};
}

struct WarmStart {
  Schedule schedule;
  Selection selection;
  std::vector<std::vector<Time>> leveled_starts;  // [activity][level]
  Time ub = 0;
};

/// Least nonnegative leveled start times for a fixed extended network:
///   S(j,g) = max(0, S(i,g) + nominal_i, S(i,g-1) + nominal_i + deviation_i over (i,j))
/// with the sink also carried upward across levels. S(n+1,Γ) equals the
/// worst-case makespan of the selection.
inline std::vector<std::vector<Time>> leveled_start_times(const ProjectInstance& inst, const Selection& sel, int gamma) {
  const auto arcs = extended_arcs(inst, sel);
  const auto order = topological_order(inst.size(), arcs);
  const auto pred = predecessor_lists(inst.size(), arcs);
  const std::size_t levels = static_cast<std::size_t>(gamma) + 1;
  std::vector<std::vector<Time>> s(inst.size(), std::vector<Time>(levels, 0));
  for (std::size_t g = 0; g < levels; ++g)
    for (auto j : order) {
      Time v = 0;
      for (auto i : pred[j]) {
        v = std::max(v, s[i][g] + inst.nominal[i]);
        if (g > 0) v = std::max(v, s[i][g - 1] + inst.nominal[i] + inst.deviation[i]);
      }
      if (j == inst.sink() && g > 0) v = std::max(v, s[j][g - 1]);
      s[j][g] = v;
    }
  return s;
}

/// LFT schedule -> induced selection -> leveled start times. The upper bound
/// is the worst-case makespan of the selection.
inline WarmStart warm_start(const ProjectInstance& inst, int gamma) {
  if (gamma < 0) throw DomainError("budget must be nonnegative");
  WarmStart ws;
  ws.schedule = lft_schedule(inst);
  ws.selection = selection_from_schedule(inst, ws.schedule.start, ws.schedule.durations_used);
  ws.leveled_starts = leveled_start_times(inst, ws.selection, gamma);
  ws.ub = ws.leveled_starts[inst.sink()][static_cast<std::size_t>(gamma)];
  return ws;
}

struct TimeWindows {
  std::vector<Time> es;
  std::vector<Time> lf;
  Time horizon = 0;
};

/// Earliest starts from a forward pass and latest finishes from a backward pass
/// from `horizon`, both over E with nominal durations.
inline TimeWindows time_windows(const ProjectInstance& inst, const Selection& /*sel*/, int gamma, Time horizon) {
  if (gamma < 0) throw DomainError("budget must be nonnegative");
  TimeWindows tw;
  tw.es = earliest_start_times(inst, inst.nominal);
  const Time critical = tw.es[inst.sink()];
  if (horizon < critical)
    throw InvalidHorizonError("horizon " + std::to_string(horizon) + " is below the nominal critical path " +
                              std::to_string(critical));
  tw.lf = latest_finish_times(inst, inst.nominal, horizon);
  tw.horizon = horizon;
  return tw;
}

inline json to_json(const Schedule& s) { return {{"start", s.start}, {"makespan", s.makespan()}}; }

inline std::string to_csv(const TimeWindows& tw) {
  std::ostringstream out;
  out << "activity,ES,LF\n";
  for (std::size_t i = 0; i < tw.es.size(); ++i) out << i << ',' << tw.es[i] << ',' << tw.lf[i] << '\n';
  return out.str();
}

}  // namespace rrcpsp
