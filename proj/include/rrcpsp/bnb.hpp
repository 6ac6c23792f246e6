#pragma once

// Exact solver: best-first branch-and-bound over resolutions of minimal
// forbidden sets, bounded by the worst-case DP of the partial extension.

#include <chrono>
#include <functional>
#include <optional>
#include <queue>
#include <unordered_set>
#include <vector>

#include "rrcpsp/adversary.hpp"
#include "rrcpsp/heuristics.hpp"
#include "rrcpsp/network.hpp"

namespace rrcpsp {

struct SearchLimits {
  double time_s = 60.0;
  std::size_t node_cap = 10'000'000;
};

struct OptResult {
  enum class Status { kOptimal, kIncumbentOnly };
  Selection best;
  Time value = 0;
  Time bound = 0;  // proven lower bound on the optimum
  Status status = Status::kOptimal;
  std::size_t nodes = 0;
  double wall_s = 0.0;
  std::vector<Time> incumbent_trace;  // every incumbent value, in discovery order

  bool optimal() const noexcept { return status == Status::kOptimal; }
};

/// Picks the catalog set to branch on, or nullopt when every set is resolved.
using BranchingStrategy = std::function<std::optional<std::size_t>(const BitMatrix&, const ForbiddenSetCatalog&)>;

struct SearchOptions {
  SearchLimits limits;
  std::optional<Time> ub_hint;
  BranchingStrategy choose = first_unresolved;
  std::optional<ForbiddenSetCatalog> catalog;  // computed when absent
};

inline OptResult solve_exact(const ProjectInstance& inst, int gamma, const SearchOptions& opts) {
  if (gamma < 0) throw DomainError("budget must be nonnegative");
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
  const ForbiddenSetCatalog catalog = opts.catalog ? *opts.catalog : minimal_forbidden_sets(inst);

  struct Node {
    Time lb;
    std::size_t seq;
    std::vector<Arc> added;
    BitMatrix reach;
  };
  auto worse = [](const Node& a, const Node& b) { return a.lb != b.lb ? a.lb > b.lb : a.seq > b.seq; };
  std::priority_queue<Node, std::vector<Node>, decltype(worse)> open(worse);
  std::unordered_set<BitMatrix, BitMatrixHash> seen;
  std::size_t seq = 0;

  auto evaluate = [&](const std::vector<Arc>& added) {
    std::vector<Arc> arcs = inst.arcs;
    arcs.insert(arcs.end(), added.begin(), added.end());
    return worst_case_over_arcs(inst, arcs, gamma).value;
  };

  OptResult res;
  {
    const auto ws = warm_start(inst, gamma);
    res.best = ws.selection;
    res.value = ws.ub;
    res.incumbent_trace.push_back(res.value);
  }
  // A hint without a selection only tightens pruning.
  auto cutoff = [&](Time lb) { return lb >= res.value || (opts.ub_hint && lb > *opts.ub_hint); };

  BitMatrix root = transitive_closure(inst.size(), inst.arcs);
  seen.insert(root);
  open.push(Node{evaluate({}), seq++, {}, std::move(root)});
  bool interrupted = false;
  while (!open.empty()) {
    if (res.nodes >= opts.limits.node_cap || elapsed() > opts.limits.time_s) {
      interrupted = true;
      break;
    }
    Node node = open.top();
    open.pop();
    ++res.nodes;
    if (cutoff(node.lb)) continue;
    const auto f = opts.choose(node.reach, catalog);
    if (!f) {
      // node.lb is the DP value of this sufficient selection
      res.best = make_selection(inst, node.added);
      res.value = node.lb;
      res.incumbent_trace.push_back(res.value);
      continue;
    }
    const auto& set = catalog.sets[*f];
    for (auto i : set)
      for (auto j : set) {
        if (i == j || node.reach.test(j, i)) continue;
        BitMatrix child = node.reach;
        close_over_arc(child, i, j);
        if (!seen.insert(child).second) continue;
        std::vector<Arc> added = node.added;
        added.push_back({i, j});
        const Time lb = evaluate(added);
        if (cutoff(lb)) continue;
        open.push(Node{lb, seq++, std::move(added), std::move(child)});
      }
  }
  res.bound = res.value;
  if (interrupted) {
    res.status = OptResult::Status::kIncumbentOnly;
    if (!open.empty()) res.bound = std::min(res.value, open.top().lb);
  }
  res.wall_s = elapsed();
  return res;
}

inline OptResult solve_exact(const ProjectInstance& inst, int gamma, SearchLimits limits = {},
                             std::optional<Time> ub_hint = std::nullopt) {
  SearchOptions opts;
  opts.limits = limits;
  opts.ub_hint = ub_hint;
  return solve_exact(inst, gamma, opts);
}

/// 100 (incumbent - bound) / incumbent; nullopt when the gap is undefined.
inline std::optional<double> optimality_gap(const OptResult& r, Time best_bound) {
  if (r.optimal()) return 0.0;
  if (r.value <= 0) return std::nullopt;
  return std::max(0.0, 100.0 * static_cast<double>(r.value - best_bound) / static_cast<double>(r.value));
}

inline std::optional<double> optimality_gap(std::optional<double> incumbent, double bound) {
  if (!incumbent || *incumbent <= 0) return std::nullopt;
  return std::max(0.0, 100.0 * (*incumbent - bound) / *incumbent);
}

/// Minimum worst-case makespan over all minimal sufficient selections.
inline Time exhaustive_optimum(const ProjectInstance& inst, int gamma, EnumerationOptions opts = {}) {
  const auto catalog = minimal_forbidden_sets(inst);
  std::optional<Time> best;
  for (const auto& sel : enumerate_sufficient_selections(inst, catalog, opts)) {
    const Time v = worst_case_makespan_dp(inst, sel, gamma).value;
    if (!best || v < *best) best = v;
  }
  if (!best) throw DomainError("no sufficient selection exists");
  return *best;
}

}  // namespace rrcpsp
