#pragma once

// Precedence-graph algebra: closures, minimal forbidden sets and sufficient
// selections.

#include <algorithm>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <unordered_set>
#include <vector>

#include "rrcpsp/bit_matrix.hpp"
#include "rrcpsp/graph.hpp"
#include "rrcpsp/instance.hpp"
#include "rrcpsp/json_io.hpp"

namespace rrcpsp {

/// Added precedence arcs X. Kept sorted and unique; never contains arcs of E.
struct Selection {
  std::vector<Arc> added;
  friend bool operator==(const Selection&, const Selection&) = default;
};

/// Sorts, deduplicates and strips arcs that already belong to E.
inline Selection make_selection(const ProjectInstance& inst, std::vector<Arc> arcs) {
  for (const auto& a : arcs)
    if (a.from >= inst.size() || a.to >= inst.size())
      throw DomainError("selection arc references unknown activity");
  normalize_arcs(arcs);
  std::erase_if(arcs, [&](const Arc& a) { return inst.has_arc(a.from, a.to); });
  return Selection{std::move(arcs)};
}

/// E ∪ X, sorted.
inline std::vector<Arc> extended_arcs(const ProjectInstance& inst, const Selection& sel) {
  std::vector<Arc> all = inst.arcs;
  all.insert(all.end(), sel.added.begin(), sel.added.end());
  normalize_arcs(all);
  return all;
}

using ActivitySet = std::vector<ActivityId>;  // sorted ids

struct ForbiddenSetCatalog {
  std::vector<ActivitySet> sets;
  friend bool operator==(const ForbiddenSetCatalog&, const ForbiddenSetCatalog&) = default;
};

struct ForbiddenSetOptions {
  std::size_t max_sets = 1'000'000;
};

/// True when the summed requirement of `members` exceeds some capacity.
inline bool exceeds_capacity(const ProjectInstance& inst, std::span<const ActivityId> members) {
  for (std::size_t k = 0; k < inst.num_resources(); ++k) {
    Time sum = 0;
    for (auto i : members) sum += inst.requirement[i][k];
    if (sum > inst.capacity[k]) return true;
  }
  return false;
}

/// All inclusion-minimal forbidden sets, in lexicographic order of their sorted
/// members. Depth-first growth over increasing ids; a branch stops as soon as
/// the set becomes forbidden, and is pruned when even adding every remaining
/// compatible activity cannot exceed any capacity.
inline ForbiddenSetCatalog minimal_forbidden_sets(const ProjectInstance& inst, ForbiddenSetOptions opts = {}) {
  const auto reach = transitive_closure(inst.size(), inst.arcs);
  std::vector<ActivityId> cand;
  for (ActivityId i = 1; i < inst.sink(); ++i) {
    bool any = false;
    for (auto r : inst.requirement[i]) any = any || r > 0;
    if (any) cand.push_back(i);
  }
  const std::size_t nk = inst.num_resources();
  ForbiddenSetCatalog out;
  std::vector<ActivityId> current;
  std::vector<Time> load(nk, 0);

  std::function<void(std::size_t)> grow = [&](std::size_t from) {
    for (std::size_t c = from; c < cand.size(); ++c) {
      const ActivityId a = cand[c];
      bool compatible = true;
      for (auto m : current)
        if (related(reach, m, a)) {
          compatible = false;
          break;
        }
      if (!compatible) continue;

      bool violates = false;
      for (std::size_t k = 0; k < nk; ++k) violates = violates || load[k] + inst.requirement[a][k] > inst.capacity[k];
      current.push_back(a);
      if (violates) {
        // current minus `a` is feasible by construction; check the other drops.
        bool minimal = true;
        std::vector<ActivityId> without;
        for (std::size_t drop = 0; drop + 1 < current.size() && minimal; ++drop) {
          without.clear();
          for (std::size_t t = 0; t < current.size(); ++t)
            if (t != drop) without.push_back(current[t]);
          if (exceeds_capacity(inst, without)) minimal = false;
        }
        if (minimal) {
          if (out.sets.size() >= opts.max_sets)
            throw RefusalError("more than " + std::to_string(opts.max_sets) + " minimal forbidden sets");
          out.sets.push_back(current);
        }
      } else {
        // Capacity pruning: can the remaining compatible candidates still overflow?
        std::vector<Time> room = load;
        for (std::size_t k = 0; k < nk; ++k) room[k] += inst.requirement[a][k];
        std::vector<Time> reachable = room;
        for (std::size_t d = c + 1; d < cand.size(); ++d) {
          bool ok = true;
          for (auto m : current)
            if (related(reach, m, cand[d])) {
              ok = false;
              break;
            }
          if (!ok) continue;
          for (std::size_t k = 0; k < nk; ++k) reachable[k] += inst.requirement[cand[d]][k];
        }
        bool can_overflow = false;
        for (std::size_t k = 0; k < nk; ++k) can_overflow = can_overflow || reachable[k] > inst.capacity[k];
        if (can_overflow) {
          load.swap(room);
          grow(c + 1);
          load.swap(room);
        }
      }
      current.pop_back();
    }
  };
  grow(0);
  std::sort(out.sets.begin(), out.sets.end());
  return out;
}

struct SelectionVerdict {
  enum class Status { kSufficient, kCyclic, kUnresolved };
  Status status = Status::kSufficient;
  std::vector<ActivityId> cycle;        // when cyclic
  std::optional<ActivitySet> witness;   // first unresolved forbidden set

  bool sufficient() const noexcept { return status == Status::kSufficient; }
};

/// Index of the first catalog set none of whose members are related in `reach`.
inline std::optional<std::size_t> first_unresolved(const BitMatrix& reach, const ForbiddenSetCatalog& catalog) {
  for (std::size_t f = 0; f < catalog.sets.size(); ++f) {
    const auto& set = catalog.sets[f];
    bool resolved = false;
    for (std::size_t a = 0; a < set.size() && !resolved; ++a)
      for (std::size_t b = a + 1; b < set.size() && !resolved; ++b) resolved = related(reach, set[a], set[b]);
    if (!resolved) return f;
  }
  return std::nullopt;
}

inline SelectionVerdict verify_selection(const ProjectInstance& inst, const Selection& sel,
                                         const ForbiddenSetCatalog& catalog) {
  const auto arcs = extended_arcs(inst, sel);
  SelectionVerdict verdict;
  if (auto cycle = find_cycle(inst.size(), arcs)) {
    verdict.status = SelectionVerdict::Status::kCyclic;
    verdict.cycle = *cycle;
    return verdict;
  }
  const auto reach = transitive_closure(inst.size(), arcs);
  if (auto f = first_unresolved(reach, catalog)) {
    verdict.status = SelectionVerdict::Status::kUnresolved;
    verdict.witness = catalog.sets[*f];
  }
  return verdict;
}

/// Selection induced by a schedule: (i,j) ∉ E is added whenever j starts no
/// earlier than i finishes. Zero-duration activities starting together are
/// ordered by their position in a topological order of E so that the result
/// stays acyclic.
inline Selection selection_from_schedule(const ProjectInstance& inst, std::span<const Time> start,
                                         std::span<const Time> dur) {
  const std::size_t n = inst.size();
  if (start.size() != n || dur.size() != n) throw DomainError("schedule vectors have wrong length");
  const auto topo = topological_order(n, inst.arcs);
  std::vector<std::size_t> topo_pos(n);
  for (std::size_t p = 0; p < n; ++p) topo_pos[topo[p]] = p;
  auto key = [&](ActivityId i) { return std::tuple(start[i], dur[i] > 0 ? 1 : 0, topo_pos[i]); };
  std::vector<Arc> x;
  for (ActivityId i = 0; i < n; ++i)
    for (ActivityId j = 0; j < n; ++j) {
      if (i == j || start[j] < start[i] + dur[i] || key(j) < key(i)) continue;
      if (!inst.has_arc(i, j)) x.push_back({i, j});
    }
  return Selection{std::move(x)};
}

/// Strict order pairs of `reach` that are covers and not implied by E.
inline std::vector<Arc> generating_arcs(const ProjectInstance& inst, const BitMatrix& reach) {
  const std::size_t n = reach.size();
  std::vector<Arc> x;
  for (ActivityId i = 0; i < n; ++i)
    for (ActivityId j = 0; j < n; ++j) {
      if (!reach.test(i, j) || inst.has_arc(i, j)) continue;
      bool cover = true;
      for (ActivityId l = 0; l < n && cover; ++l) cover = !(reach.test(i, l) && reach.test(l, j));
      if (cover) x.push_back({i, j});
    }
  return x;
}

struct EnumerationOptions {
  std::size_t max_real_activities = 8;
};

/// Visits every inclusion-minimal sufficient extension of E exactly once, each
/// represented by the cover arcs it adds to E. Orders are compared by their
/// transitive closure, so two arc sets generating the same order count once.
/// Output order is lexicographic in the arc lists.
inline std::vector<Selection> enumerate_sufficient_selections(const ProjectInstance& inst,
                                                              const ForbiddenSetCatalog& catalog,
                                                              EnumerationOptions opts = {}) {
  if (inst.num_real() > opts.max_real_activities)
    throw RefusalError("enumeration refused: " + std::to_string(inst.num_real()) + " activities exceed the cap of " +
                       std::to_string(opts.max_real_activities));
  const BitMatrix base = transitive_closure(inst.size(), inst.arcs);
  std::unordered_set<BitMatrix, BitMatrixHash> seen;
  std::unordered_set<BitMatrix, BitMatrixHash> leaves;
  std::vector<BitMatrix> stack{base};
  seen.insert(base);
  while (!stack.empty()) {
    BitMatrix reach = std::move(stack.back());
    stack.pop_back();
    auto f = first_unresolved(reach, catalog);
    if (!f) {
      leaves.insert(std::move(reach));
      continue;
    }
    for (auto i : catalog.sets[*f])
      for (auto j : catalog.sets[*f]) {
        if (i == j) continue;
        BitMatrix child = reach;
        close_over_arc(child, i, j);
        if (seen.insert(child).second) stack.push_back(std::move(child));
      }
  }

  auto sufficient = [&](const BitMatrix& r) { return !first_unresolved(r, catalog).has_value(); };
  std::vector<Selection> out;
  for (const auto& leaf : leaves) {
    // Minimal iff dropping any cover pair outside closure(E) breaks sufficiency.
    bool minimal = true;
    for (const auto& a : generating_arcs(inst, leaf)) {
      if (base.test(a.from, a.to)) continue;
      BitMatrix smaller = leaf;
      smaller.reset(a.from, a.to);
      if (sufficient(smaller)) {
        minimal = false;
        break;
      }
    }
    if (minimal) out.push_back(Selection{generating_arcs(inst, leaf)});
  }
  std::sort(out.begin(), out.end(), [](const Selection& a, const Selection& b) { return a.added < b.added; });
  return out;
}

inline json to_json(const ForbiddenSetCatalog& catalog) {
  json sets = json::array();
  for (const auto& s : catalog.sets) sets.push_back(s);
  return sets;
}

inline json to_json(const Selection& sel) { return arcs_to_json(sel.added); }

inline Selection selection_from_json(const ProjectInstance& inst, const json& j) {
  const json& arcs = j.is_object() ? j.at("added") : j;
  return make_selection(inst, arcs_from_json(arcs));
}

}  // namespace rrcpsp
