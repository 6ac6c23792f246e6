#pragma once

#include <algorithm>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rrcpsp/bit_matrix.hpp"
#include "rrcpsp/core.hpp"

namespace rrcpsp {

// Successor lists; arcs with out-of-range endpoints are a caller bug.
inline std::vector<std::vector<ActivityId>> successor_lists(std::size_t num_nodes,
                                                           std::span<const Arc> arcs) {
  std::vector<std::vector<ActivityId>> succ(num_nodes);
  for (const auto& a : arcs) succ[a.from].push_back(a.to);
  for (auto& s : succ) std::sort(s.begin(), s.end());
  return succ;
}

inline std::vector<std::vector<ActivityId>> predecessor_lists(std::size_t num_nodes,
                                                             std::span<const Arc> arcs) {
  std::vector<std::vector<ActivityId>> pred(num_nodes);
  for (const auto& a : arcs) pred[a.to].push_back(a.from);
  for (auto& p : pred) std::sort(p.begin(), p.end());
  return pred;
}

/// Returns one directed cycle (as a node sequence, first node not repeated),
/// or nullopt when the graph is acyclic.
inline std::optional<std::vector<ActivityId>> find_cycle(std::size_t num_nodes,
                                                         std::span<const Arc> arcs) {
  const auto succ = successor_lists(num_nodes, arcs);
  enum : char { kWhite, kGrey, kBlack };
  std::vector<char> colour(num_nodes, kWhite);
  std::vector<ActivityId> parent(num_nodes, num_nodes);
  for (ActivityId root = 0; root < num_nodes; ++root) {
    if (colour[root] != kWhite) continue;
    std::vector<std::pair<ActivityId, std::size_t>> stack{{root, 0}};
    colour[root] = kGrey;
    while (!stack.empty()) {
      auto& [u, next] = stack.back();
      if (next < succ[u].size()) {
        const ActivityId v = succ[u][next++];
        if (colour[v] == kGrey) {
          std::vector<ActivityId> cycle{v};
          for (ActivityId w = u; w != v; w = parent[w]) cycle.push_back(w);
          std::reverse(cycle.begin() + 1, cycle.end());
          return cycle;
        }
        if (colour[v] == kWhite) {
          colour[v] = kGrey;
          parent[v] = u;
          stack.emplace_back(v, 0);
        }
      } else {
        colour[u] = kBlack;
        stack.pop_back();
      }
    }
  }
  return std::nullopt;
}

inline std::string describe_cycle(const std::vector<ActivityId>& cycle) {
  std::string s;
  for (auto v : cycle) s += std::to_string(v) + " -> ";
  return s + std::to_string(cycle.front());
}

/// Kahn's algorithm, smallest available id first. Throws CycleError.
inline std::vector<ActivityId> topological_order(std::size_t num_nodes, std::span<const Arc> arcs) {
  const auto succ = successor_lists(num_nodes, arcs);
  std::vector<std::size_t> indeg(num_nodes, 0);
  for (const auto& a : arcs) ++indeg[a.to];
  std::vector<ActivityId> heap;
  for (ActivityId v = 0; v < num_nodes; ++v)
    if (indeg[v] == 0) heap.push_back(v);
  std::make_heap(heap.begin(), heap.end(), std::greater<>{});
  std::vector<ActivityId> order;
  order.reserve(num_nodes);
  while (!heap.empty()) {
    std::pop_heap(heap.begin(), heap.end(), std::greater<>{});
    const ActivityId u = heap.back();
    heap.pop_back();
    order.push_back(u);
    for (auto v : succ[u]) {
      if (--indeg[v] == 0) {
        heap.push_back(v);
        std::push_heap(heap.begin(), heap.end(), std::greater<>{});
      }
    }
  }
  if (order.size() != num_nodes) {
    auto cycle = find_cycle(num_nodes, arcs);
    throw CycleError("graph contains a cycle: " + (cycle ? describe_cycle(*cycle) : std::string("?")));
  }
  return order;
}

/// Reachability by nonempty paths: M(i,j) iff j is reachable from i.
inline BitMatrix transitive_closure(std::size_t num_nodes, std::span<const Arc> arcs) {
  const auto order = topological_order(num_nodes, arcs);
  const auto succ = successor_lists(num_nodes, arcs);
  BitMatrix reach(num_nodes);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    for (auto v : succ[*it]) {
      reach.set(*it, v);
      reach.or_row(*it, v);
    }
  }
  return reach;
}

/// Adds arc (from,to) to an existing closure in place. The caller guarantees
/// that `from` is not reachable from `to` (no cycle is created).
inline void close_over_arc(BitMatrix& reach, ActivityId from, ActivityId to) {
  const std::size_t n = reach.size();
  for (ActivityId u = 0; u < n; ++u) {
    if (u == from || reach.test(u, from)) {
      reach.set(u, to);
      reach.or_row(u, to);
    }
  }
}

inline bool related(const BitMatrix& reach, ActivityId a, ActivityId b) {
  return reach.test(a, b) || reach.test(b, a);
}

}  // namespace rrcpsp
