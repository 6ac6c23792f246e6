#pragma once

// Second-stage (adversarial) evaluation of a fixed selection: the level
// dynamic program, its augmented-network reading, a subset-enumeration oracle,
// an exact checker for fractional certificates of the linearized adversary
// model, and the Ghouila-Houri sign search used to refute total unimodularity.

#include <algorithm>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "rrcpsp/graph.hpp"
#include "rrcpsp/instance.hpp"
#include "rrcpsp/json_io.hpp"
#include "rrcpsp/network.hpp"

namespace rrcpsp {

// ---------------------------------------------------------------------------
// Dynamic program

/// value[j][g]: longest path from (0,0) to (j,g) in the augmented network,
/// kUnreachable when no such path exists.
struct DpTable {
  std::vector<std::vector<Time>> value;

  std::size_t levels() const { return value.empty() ? 0 : value.front().size(); }
  Time at(ActivityId j, int gamma) const { return value[j][static_cast<std::size_t>(gamma)]; }
};

struct WorstCase {
  Time value = 0;
  std::vector<ActivityId> delayed;  // activities pushed to nominal + deviation
  std::vector<ActivityId> path;     // critical path 0 .. n+1 in the extended network
  DpTable table;
};

namespace adversary_detail {

enum class Move : unsigned char { kNone, kStay, kDelay, kSinkCarry };

struct Back {
  ActivityId pred = 0;
  Move move = Move::kNone;
};

}  // namespace adversary_detail

/// Worst-case makespan of E ∪ `arcs` under budget `gamma`. `arcs` must hold
/// the full extended arc set (E included).
///
///   V(0,0) = 0
///   V(j,g) = max over (i,j) of max(V(i,g) + nominal_i, V(i,g-1) + nominal_i + deviation_i)
///   V(n+1,g) additionally >= V(n+1,g-1)            (zero-weight sink carry)
///
/// The result is V(n+1,Γ), which by the sink carry equals max over g <= Γ.
inline WorstCase worst_case_over_arcs(const ProjectInstance& inst, std::span<const Arc> arcs, int gamma) {
  using namespace adversary_detail;
  if (gamma < 0) throw DomainError("budget must be nonnegative");
  const std::size_t n = inst.size();
  const std::size_t levels = static_cast<std::size_t>(gamma) + 1;
  const auto order = topological_order(n, arcs);
  const auto pred = predecessor_lists(n, arcs);

  WorstCase out;
  auto& val = out.table.value;
  val.assign(n, std::vector<Time>(levels, kUnreachable));
  std::vector<std::vector<Back>> back(n, std::vector<Back>(levels));
  val[0][0] = 0;

  for (std::size_t g = 0; g < levels; ++g) {
    for (ActivityId j : order) {
      if (j == 0) continue;
      Time best = kUnreachable;
      Back choice;
      if (j == inst.sink() && g > 0 && val[j][g - 1] != kUnreachable) {
        best = val[j][g - 1];
        choice = {j, Move::kSinkCarry};
      }
      for (ActivityId i : pred[j]) {
        if (val[i][g] != kUnreachable && val[i][g] + inst.nominal[i] > best) {
          best = val[i][g] + inst.nominal[i];
          choice = {i, Move::kStay};
        }
      }
      if (g > 0) {
        for (ActivityId i : pred[j]) {
          const Time cand = val[i][g - 1] == kUnreachable ? kUnreachable
                                                          : val[i][g - 1] + inst.nominal[i] + inst.deviation[i];
          if (cand != kUnreachable && cand > best) {
            best = cand;
            choice = {i, Move::kDelay};
          }
        }
      }
      val[j][g] = best;
      back[j][g] = choice;
    }
  }

  ActivityId j = inst.sink();
  std::size_t g = levels - 1;
  out.value = val[j][g];
  if (out.value == kUnreachable) throw DomainError("sink is unreachable from the source");
  out.path.push_back(j);
  while (!(j == 0 && g == 0)) {
    const Back b = back[j][g];
    switch (b.move) {
      case Move::kSinkCarry:
        --g;
        continue;
      case Move::kStay:
        break;
      case Move::kDelay:
        --g;
        if (inst.deviation[b.pred] > 0) out.delayed.push_back(b.pred);
        break;
      case Move::kNone:
        throw DomainError("internal error: broken back-pointer chain");
    }
    j = b.pred;
    out.path.push_back(j);
  }
  std::reverse(out.path.begin(), out.path.end());
  std::sort(out.delayed.begin(), out.delayed.end());
  return out;
}

inline WorstCase worst_case_makespan_dp(const ProjectInstance& inst, const Selection& sel, int gamma) {
  const auto arcs = extended_arcs(inst, sel);
  return worst_case_over_arcs(inst, arcs, gamma);
}

// ---------------------------------------------------------------------------
// Augmented network

struct AugmentedArc {
  enum class Kind { kIntra, kInter, kSinkCarry };
  std::size_t from = 0;  // node index activity * (Γ+1) + level
  std::size_t to = 0;
  Time weight = 0;
  Kind kind = Kind::kIntra;
};

/// Γ+1 stacked copies of the extended network. Intra-level arcs carry the
/// nominal duration of their tail, inter-level arcs the worst-case duration,
/// and the sink copies are chained by zero-weight arcs.
struct AugmentedNetwork {
  std::size_t num_activities = 0;
  int gamma = 0;
  std::vector<AugmentedArc> arcs;

  std::size_t levels() const { return static_cast<std::size_t>(gamma) + 1; }
  std::size_t node(ActivityId j, int level) const { return j * levels() + static_cast<std::size_t>(level); }
  std::size_t num_nodes() const { return num_activities * levels(); }
};

inline AugmentedNetwork build_augmented_network(const ProjectInstance& inst, const Selection& sel, int gamma) {
  if (gamma < 0) throw DomainError("budget must be nonnegative");
  AugmentedNetwork net;
  net.num_activities = inst.size();
  net.gamma = gamma;
  const auto arcs = extended_arcs(inst, sel);
  for (int g = 0; g <= gamma; ++g)
    for (const auto& a : arcs)
      net.arcs.push_back({net.node(a.from, g), net.node(a.to, g), inst.nominal[a.from], AugmentedArc::Kind::kIntra});
  for (int g = 0; g < gamma; ++g)
    for (const auto& a : arcs)
      net.arcs.push_back({net.node(a.from, g), net.node(a.to, g + 1), inst.nominal[a.from] + inst.deviation[a.from],
                          AugmentedArc::Kind::kInter});
  for (int g = 0; g < gamma; ++g)
    net.arcs.push_back({net.node(inst.sink(), g), net.node(inst.sink(), g + 1), 0, AugmentedArc::Kind::kSinkCarry});
  return net;
}

/// Longest path lengths from `origin` over an arbitrary DAG given as weighted arcs.
inline std::vector<Time> dag_longest_paths(const AugmentedNetwork& net, std::size_t origin) {
  std::vector<Arc> plain;
  plain.reserve(net.arcs.size());
  for (const auto& a : net.arcs) plain.push_back({a.from, a.to});
  const auto order = topological_order(net.num_nodes(), plain);
  std::vector<std::vector<const AugmentedArc*>> out(net.num_nodes());
  for (const auto& a : net.arcs) out[a.from].push_back(&a);
  std::vector<Time> dist(net.num_nodes(), kUnreachable);
  dist[origin] = 0;
  for (auto u : order) {
    if (dist[u] == kUnreachable) continue;
    for (const auto* a : out[u]) dist[a->to] = std::max(dist[a->to], dist[u] + a->weight);
  }
  return dist;
}

// ---------------------------------------------------------------------------
// Brute-force oracle

/// Longest 0 -> n+1 path with the given per-activity durations.
inline Time critical_path_length(std::size_t num_nodes, std::span<const Arc> arcs, std::span<const Time> dur) {
  const auto order = topological_order(num_nodes, arcs);
  const auto succ = successor_lists(num_nodes, arcs);
  std::vector<Time> est(num_nodes, kUnreachable);
  est[0] = 0;
  for (auto u : order) {
    if (est[u] == kUnreachable) continue;
    for (auto v : succ[u]) est[v] = std::max(est[v], est[u] + dur[u]);
  }
  return est[num_nodes - 1];
}

struct BruteForceLimits {
  // Default corresponds to 20 activities with a budget of 3.
  std::size_t max_subsets = 1 + 20 + 190 + 1140;
};

/// Maximum critical-path length over every set D of at most Γ real activities
/// taking their worst-case durations.
inline Time worst_case_makespan_bruteforce(const ProjectInstance& inst, const Selection& sel, int gamma,
                                           BruteForceLimits limits = {}) {
  if (gamma < 0) throw DomainError("budget must be nonnegative");
  const auto arcs = extended_arcs(inst, sel);
  const std::size_t n = inst.num_real();
  const std::size_t k_max = std::min<std::size_t>(static_cast<std::size_t>(gamma), n);

  // Number of subsets, saturating above the cap.
  std::size_t total = 0;
  {
    std::size_t binom = 1;  // C(n, k)
    for (std::size_t k = 0; k <= k_max; ++k) {
      if (k > 0) binom = binom * (n - k + 1) / k;
      total += binom;
      if (total > limits.max_subsets && k_max < n) break;
    }
  }
  if (k_max < n && total > limits.max_subsets)
    throw RefusalError("brute force refused: " + std::to_string(n) + " activities with budget " +
                       std::to_string(gamma) + " exceed the subset cap");

  std::vector<Time> dur = inst.nominal;
  if (k_max == n) {
    for (ActivityId i = 0; i < inst.size(); ++i) dur[i] += inst.deviation[i];
    return critical_path_length(inst.size(), arcs, dur);
  }
  Time best = kUnreachable;
  std::vector<ActivityId> chosen;
  auto rec = [&](auto&& self, ActivityId next) -> void {
    best = std::max(best, critical_path_length(inst.size(), arcs, dur));
    if (chosen.size() == k_max) return;
    for (ActivityId i = next; i <= n; ++i) {
      chosen.push_back(i);
      dur[i] += inst.deviation[i];
      self(self, i + 1);
      dur[i] -= inst.deviation[i];
      chosen.pop_back();
    }
  };
  rec(rec, 1);
  return best;
}

// ---------------------------------------------------------------------------
// Fractional certificates of the linearized adversary model

/// Flow alpha and linearization w are indexed by arcs of E ∪ X; arcs with
/// y = 0 carry no flow and are simply absent.
struct FractionalCertificate {
  std::map<Arc, Rational> alpha;
  std::map<Arc, Rational> w;
  std::vector<Rational> delta;  // per activity
};

struct CertificateCheck {
  bool feasible = false;
  Rational objective;
  std::vector<std::string> violations;
};

/// Checks flow conservation at every interior activity, unit outflow at the
/// source, unit inflow at the sink, w <= delta_tail, w <= alpha, the budget
/// and all variable bounds, in exact arithmetic. The objective is
/// sum(nominal_i * alpha_ij + deviation_i * w_ij).
inline CertificateCheck check_fractional_certificate(const ProjectInstance& inst, const Selection& sel, int gamma,
                                                     const FractionalCertificate& cert) {
  const auto arcs = extended_arcs(inst, sel);
  auto in_network = [&](const Arc& a) { return std::binary_search(arcs.begin(), arcs.end(), a); };
  auto name = [](const Arc& a) { return "(" + std::to_string(a.from) + "," + std::to_string(a.to) + ")"; };
  for (const auto& [a, _] : cert.alpha)
    if (!in_network(a)) throw DomainError("certificate flow on arc " + name(a) + " outside E ∪ X");
  for (const auto& [a, _] : cert.w)
    if (!in_network(a)) throw DomainError("certificate term w on arc " + name(a) + " outside E ∪ X");
  if (cert.delta.size() != inst.size()) throw DomainError("certificate delta vector has wrong length");

  auto get = [](const std::map<Arc, Rational>& m, const Arc& a) {
    auto it = m.find(a);
    return it == m.end() ? Rational(0) : it->second;
  };
  CertificateCheck out;
  auto fail = [&](std::string msg) { out.violations.push_back(std::move(msg)); };

  std::vector<Rational> inflow(inst.size()), outflow(inst.size());
  for (const auto& a : arcs) {
    const Rational al = get(cert.alpha, a);
    const Rational wv = get(cert.w, a);
    if (al < Rational(0) || al > Rational(1)) fail("alpha" + name(a) + " outside [0,1]");
    if (wv < Rational(0)) fail("w" + name(a) + " negative");
    if (wv > cert.delta[a.from]) fail("w" + name(a) + " exceeds delta_" + std::to_string(a.from));
    if (wv > al) fail("w" + name(a) + " exceeds alpha" + name(a));
    outflow[a.from] += al;
    inflow[a.to] += al;
    out.objective += Rational(inst.nominal[a.from]) * al + Rational(inst.deviation[a.from]) * wv;
  }
  for (ActivityId j = 1; j < inst.sink(); ++j)
    if (inflow[j] != outflow[j]) fail("flow not conserved at " + std::to_string(j));
  if (outflow[0] != Rational(1)) fail("source outflow is " + to_string(outflow[0]) + ", expected 1");
  if (inflow[inst.sink()] != Rational(1)) fail("sink inflow is " + to_string(inflow[inst.sink()]) + ", expected 1");
  Rational budget;
  for (ActivityId i = 0; i < inst.size(); ++i) {
    if (cert.delta[i] < Rational(0) || cert.delta[i] > Rational(1)) fail("delta_" + std::to_string(i) + " outside [0,1]");
    budget += cert.delta[i];
  }
  if (budget > Rational(gamma)) fail("delta sums to " + to_string(budget) + " > budget " + std::to_string(gamma));
  out.feasible = out.violations.empty();
  return out;
}

// ---------------------------------------------------------------------------
// Constraint matrix of the linearized adversary and Ghouila-Houri search

struct ConstraintMatrix {
  std::vector<std::vector<int>> entries;  // dense, row-major
  std::vector<std::string> row_labels;
  std::vector<int> row_group;             // 1..5
  std::vector<std::string> column_labels;

  std::size_t rows() const { return entries.size(); }
  std::size_t cols() const { return column_labels.size(); }

  /// Index of the k-th row (0-based) of a group.
  std::size_t group_row(int group, std::size_t k) const {
    for (std::size_t r = 0; r < rows(); ++r)
      if (row_group[r] == group && k-- == 0) return r;
    throw DomainError("group " + std::to_string(group) + " has too few rows");
  }
  std::size_t group_size(int group) const {
    return static_cast<std::size_t>(std::count(row_group.begin(), row_group.end(), group));
  }
};

struct AdversaryMatrixOptions {
  // Drops every column and row that only concerns the dummy source (its flow
  // arcs, their w terms and delta_0). All of them carry zero objective weight.
  bool drop_source_dummy = false;
};

/// Rows: group 1 flow conservation at interior activities (inflow - outflow),
/// then unit source outflow and unit sink inflow; group 2 w_ij - delta_i;
/// group 3 -alpha_ij + w_ij; group 4 the budget row; group 5 delta bounds.
/// Columns: alpha block, w block, delta block, each in lexicographic order.
inline ConstraintMatrix build_adversary_constraint_matrix(const ProjectInstance& inst, const Selection& sel,
                                                          int /*gamma*/, AdversaryMatrixOptions opts = {}) {
  std::vector<Arc> arcs = extended_arcs(inst, sel);
  topological_order(inst.size(), arcs);  // throws on cycles
  if (opts.drop_source_dummy) std::erase_if(arcs, [](const Arc& a) { return a.from == 0; });
  std::vector<ActivityId> acts;
  for (ActivityId i = opts.drop_source_dummy ? 1 : 0; i < inst.size(); ++i) acts.push_back(i);

  const std::size_t na = arcs.size();
  ConstraintMatrix m;
  auto arc_label = [](const std::string& p, const Arc& a) {
    return p + "_" + std::to_string(a.from) + "_" + std::to_string(a.to);
  };
  for (const auto& a : arcs) m.column_labels.push_back(arc_label("alpha", a));
  for (const auto& a : arcs) m.column_labels.push_back(arc_label("w", a));
  for (auto i : acts) m.column_labels.push_back("delta_" + std::to_string(i));
  const std::size_t cols = m.column_labels.size();
  auto alpha_col = [&](std::size_t e) { return e; };
  auto w_col = [&](std::size_t e) { return na + e; };
  auto delta_col = [&](ActivityId i) {
    return 2 * na + static_cast<std::size_t>(std::find(acts.begin(), acts.end(), i) - acts.begin());
  };
  auto add_row = [&](int group, std::string label) -> std::vector<int>& {
    m.entries.emplace_back(cols, 0);
    m.row_labels.push_back(std::move(label));
    m.row_group.push_back(group);
    return m.entries.back();
  };

  for (ActivityId j = 1; j < inst.sink(); ++j) {
    auto& row = add_row(1, "conserve_" + std::to_string(j));
    for (std::size_t e = 0; e < na; ++e) {
      if (arcs[e].to == j) row[alpha_col(e)] += 1;
      if (arcs[e].from == j) row[alpha_col(e)] -= 1;
    }
  }
  if (!opts.drop_source_dummy) {
    auto& row = add_row(1, "source");
    for (std::size_t e = 0; e < na; ++e)
      if (arcs[e].from == 0) row[alpha_col(e)] = 1;
  }
  {
    auto& row = add_row(1, "sink");
    for (std::size_t e = 0; e < na; ++e)
      if (arcs[e].to == inst.sink()) row[alpha_col(e)] = 1;
  }
  for (std::size_t e = 0; e < na; ++e) {
    auto& row = add_row(2, arc_label("w_le_delta", arcs[e]));
    row[w_col(e)] = 1;
    row[delta_col(arcs[e].from)] = -1;
  }
  for (std::size_t e = 0; e < na; ++e) {
    auto& row = add_row(3, arc_label("w_le_alpha", arcs[e]));
    row[alpha_col(e)] = -1;
    row[w_col(e)] = 1;
  }
  {
    auto& row = add_row(4, "budget");
    for (auto i : acts) row[delta_col(i)] = 1;
  }
  for (auto i : acts) {
    auto& row = add_row(5, "delta_le_1_" + std::to_string(i));
    row[delta_col(i)] = 1;
  }
  return m;
}

/// The five rows used to refute total unimodularity: the first row of group 1
/// and the first two rows of groups 2 and 3.
inline std::vector<std::size_t> refutation_rows(const ConstraintMatrix& m) {
  return {m.group_row(1, 0), m.group_row(2, 0), m.group_row(2, 1), m.group_row(3, 0), m.group_row(3, 1)};
}

struct GhouilaHouriVerdict {
  bool not_tu = false;                // no valid sign assignment exists
  std::optional<std::vector<int>> signs;  // one valid assignment otherwise
  std::uint64_t assignments_checked = 0;
};

/// Exhaustive search over all 2^|rows| sign assignments for one whose signed
/// row sum has every entry in {-1, 0, 1}.
inline GhouilaHouriVerdict ghouila_houri_refute(const ConstraintMatrix& m, std::span<const std::size_t> rows) {
  if (rows.size() > 25) throw RefusalError("sign search limited to 25 rows");
  for (auto r : rows)
    if (r >= m.rows()) throw DomainError("row index out of range");
  GhouilaHouriVerdict v;
  const std::uint64_t total = std::uint64_t{1} << rows.size();
  std::vector<int> sums(m.cols());
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    ++v.assignments_checked;
    std::fill(sums.begin(), sums.end(), 0);
    for (std::size_t t = 0; t < rows.size(); ++t) {
      const int s = (mask >> t) & 1U ? -1 : 1;
      const auto& row = m.entries[rows[t]];
      for (std::size_t c = 0; c < row.size(); ++c) sums[c] += s * row[c];
    }
    if (std::all_of(sums.begin(), sums.end(), [](int x) { return x >= -1 && x <= 1; })) {
      std::vector<int> signs(rows.size());
      for (std::size_t t = 0; t < rows.size(); ++t) signs[t] = (mask >> t) & 1U ? -1 : 1;
      v.signs = std::move(signs);
      return v;
    }
  }
  v.not_tu = true;
  return v;
}

inline std::string to_csv(const ConstraintMatrix& m) {
  std::ostringstream out;
  out << "row,group";
  for (const auto& c : m.column_labels) out << ',' << c;
  out << '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    out << m.row_labels[r] << ',' << m.row_group[r];
    for (int x : m.entries[r]) out << ',' << x;
    out << '\n';
  }
  return out.str();
}

inline json to_json(const WorstCase& wc) {
  json table = json::array();
  for (const auto& row : wc.table.value) {
    json r = json::array();
    for (auto x : row) r.push_back(x == kUnreachable ? json(nullptr) : json(x));
    table.push_back(r);
  }
  return {{"value", wc.value}, {"delayed", wc.delayed}, {"path", wc.path}, {"table", table}};
}

inline json to_json(const FractionalCertificate& c) {
  json alpha = json::array(), w = json::array(), delta = json::array();
  for (const auto& [a, v] : c.alpha) alpha.push_back({{"arc", {a.from, a.to}}, {"value", to_string(v)}});
  for (const auto& [a, v] : c.w) w.push_back({{"arc", {a.from, a.to}}, {"value", to_string(v)}});
  for (const auto& d : c.delta) delta.push_back(to_string(d));
  return {{"alpha", alpha}, {"w", w}, {"delta", delta}};
}

}  // namespace rrcpsp
