#pragma once

// Independent reference implementations. They share no algorithmic code with
// the library: plain bitmask enumeration, Floyd-Warshall closures and
// Bellman-Ford style relaxation.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <set>
#include <vector>

#include "rrcpsp/instance.hpp"

namespace oracle {

using rrcpsp::Arc;
using rrcpsp::ProjectInstance;
using rrcpsp::Time;

using Matrix = std::vector<std::vector<bool>>;

inline Matrix closure(std::size_t n, const std::vector<Arc>& arcs) {
  Matrix r(n, std::vector<bool>(n, false));
  for (const auto& a : arcs) r[a.from][a.to] = true;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (r[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (r[k][j]) r[i][j] = true;
  return r;
}

inline bool acyclic(std::size_t n, const std::vector<Arc>& arcs) {
  const auto r = oracle::closure(n, arcs);
  for (std::size_t i = 0; i < n; ++i)
    if (r[i][i]) return false;
  return true;
}

/// Longest path from node 0 to node n-1 where leaving node i costs dur[i].
inline Time longest_path(std::size_t n, const std::vector<Arc>& arcs, const std::vector<Time>& dur) {
  constexpr Time kNone = std::numeric_limits<Time>::min() / 4;
  std::vector<Time> est(n, kNone);
  est[0] = 0;
  for (std::size_t round = 0; round < n; ++round)
    for (const auto& a : arcs)
      if (est[a.from] != kNone) est[a.to] = std::max(est[a.to], est[a.from] + dur[a.from]);
  return est[n - 1];
}

/// Worst-case makespan by enumerating every set of at most Γ delayed real
/// activities.
inline Time worst_case(const ProjectInstance& inst, const std::vector<Arc>& arcs, int gamma) {
  const std::size_t n = inst.nominal.size();
  const std::size_t real = n - 2;
  Time best = std::numeric_limits<Time>::min();
  for (std::uint32_t mask = 0; mask < (1U << real); ++mask) {
    if (std::popcount(mask) > gamma) continue;
    std::vector<Time> dur = inst.nominal;
    for (std::size_t b = 0; b < real; ++b)
      if (mask >> b & 1U) dur[b + 1] += inst.deviation[b + 1];
    best = std::max(best, oracle::longest_path(n, arcs, dur));
  }
  return best;
}

inline bool forbidden(const ProjectInstance& inst, const std::vector<std::size_t>& members) {
  for (std::size_t k = 0; k < inst.capacity.size(); ++k) {
    Time sum = 0;
    for (auto i : members) sum += inst.requirement[i][k];
    if (sum > inst.capacity[k]) return true;
  }
  return false;
}

/// Minimal forbidden sets by checking every subset of real activities.
inline std::vector<std::vector<std::size_t>> minimal_forbidden_sets(const ProjectInstance& inst) {
  const std::size_t n = inst.nominal.size();
  const std::size_t real = n - 2;
  const auto r = oracle::closure(n, inst.arcs);
  std::vector<std::vector<std::size_t>> out;
  for (std::uint32_t mask = 1; mask < (1U << real); ++mask) {
    std::vector<std::size_t> members;
    for (std::size_t b = 0; b < real; ++b)
      if (mask >> b & 1U) members.push_back(b + 1);
    bool antichain = true;
    for (auto a : members)
      for (auto b : members)
        if (r[a][b]) antichain = false;
    if (!antichain || !forbidden(inst, members)) continue;
    bool minimal = true;
    for (std::size_t drop = 0; drop < members.size() && minimal; ++drop) {
      auto smaller = members;
      smaller.erase(smaller.begin() + static_cast<std::ptrdiff_t>(drop));
      if (forbidden(inst, smaller)) minimal = false;
    }
    if (minimal) out.push_back(members);
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// True when every minimal forbidden set contains a related pair.
inline bool sufficient(const ProjectInstance& inst, const std::vector<Arc>& arcs) {
  const std::size_t n = inst.nominal.size();
  if (!oracle::acyclic(n, arcs)) return false;
  const auto r = oracle::closure(n, arcs);
  for (const auto& set : oracle::minimal_forbidden_sets(inst)) {
    bool resolved = false;
    for (auto a : set)
      for (auto b : set)
        if (r[a][b]) resolved = true;
    if (!resolved) return false;
  }
  return true;
}

/// Serial schedule generation for one activity list, unit time slots, nominal
/// durations. Zero-duration activities use no capacity.
inline Time serial_sgs(const ProjectInstance& inst, const std::vector<std::size_t>& list) {
  const std::size_t n = inst.nominal.size();
  const std::size_t nk = inst.capacity.size();
  Time horizon = 1;
  for (auto d : inst.nominal) horizon += d;
  std::vector<std::vector<Time>> used(static_cast<std::size_t>(horizon) + 1, std::vector<Time>(nk, 0));
  std::vector<Time> start(n, 0);
  for (auto j : list) {
    Time t = 0;
    for (const auto& a : inst.arcs)
      if (a.to == j) t = std::max(t, start[a.from] + inst.nominal[a.from]);
    const Time d = inst.nominal[j];
    auto fits = [&](Time s) {
      for (Time tau = s; tau < s + d; ++tau)
        for (std::size_t k = 0; k < nk; ++k)
          if (used[static_cast<std::size_t>(tau)][k] + inst.requirement[j][k] > inst.capacity[k]) return false;
      return true;
    };
    while (!fits(t)) ++t;
    for (Time tau = t; tau < t + d; ++tau)
      for (std::size_t k = 0; k < nk; ++k) used[static_cast<std::size_t>(tau)][k] += inst.requirement[j][k];
    start[j] = t;
  }
  return start[n - 1];
}

/// Deterministic RCPSP optimum: minimum serial-SGS makespan over all
/// precedence-feasible activity lists.
inline Time deterministic_optimum(const ProjectInstance& inst) {
  const std::size_t n = inst.nominal.size();
  const auto r = oracle::closure(n, inst.arcs);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Time best = std::numeric_limits<Time>::max();
  // The source stays first and the sink last; permute the real activities.
  do {
    bool feasible = true;
    for (std::size_t p = 0; p < n && feasible; ++p)
      for (std::size_t q = p + 1; q < n && feasible; ++q)
        if (r[perm[q]][perm[p]]) feasible = false;
    if (feasible) best = std::min(best, serial_sgs(inst, perm));
  } while (std::next_permutation(perm.begin() + 1, perm.end() - 1));
  return best;
}

/// All inclusion-minimal sufficient strict orders extending E, as closure
/// matrices, found by trying every subset of candidate pairs.
inline std::set<Matrix> minimal_sufficient_orders(const ProjectInstance& inst) {
  const std::size_t n = inst.nominal.size();
  const auto base = oracle::closure(n, inst.arcs);
  std::vector<Arc> cand;
  for (std::size_t i = 1; i + 1 < n; ++i)
    for (std::size_t j = 1; j + 1 < n; ++j)
      if (i != j && !base[i][j] && !base[j][i]) cand.push_back({i, j});
  std::set<Matrix> orders;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << cand.size()); ++mask) {
    auto arcs = inst.arcs;
    for (std::size_t b = 0; b < cand.size(); ++b)
      if (mask >> b & 1U) arcs.push_back(cand[b]);
    if (oracle::sufficient(inst, arcs)) orders.insert(oracle::closure(n, arcs));
  }
  auto subset = [&](const Matrix& a, const Matrix& b) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (a[i][j] && !b[i][j]) return false;
    return true;
  };
  std::set<Matrix> minimal;
  for (const auto& o : orders) {
    bool is_min = true;
    for (const auto& p : orders)
      if (p != o && subset(p, o)) is_min = false;
    if (is_min) minimal.insert(o);
  }
  return minimal;
}

}  // namespace oracle
