#pragma once

// Solver-neutral model of the compact robust counterpart and its variants.

#include <algorithm>
#include <map>
#include <numeric>
#include <tuple>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "rrcpsp/heuristics.hpp"
#include "rrcpsp/instance.hpp"
#include "rrcpsp/network.hpp"

namespace rrcpsp {

enum class VarKind { kContinuous, kInteger, kBinary };
enum class VarRole { kStart, kArc, kFlow, kOther };
enum class Sense { kLessEqual, kGreaterEqual, kEqual };

// Constraint families, numbered as in the formulation.
enum class Family : int {
  kBigMSameLevel = 30,
  kBigMNextLevel = 31,
  kFlowCapacity = 33,
  kFlowIn = 34,
  kFlowOut = 35,
  kAntisymmetry = 38,
  kTransitivity = 39,
  kOther = 0,
};

struct Variable {
  std::string name;
  VarKind kind = VarKind::kContinuous;
  Time lower = 0;
  std::optional<Time> upper;  // nullopt = +infinity
  VarRole role = VarRole::kOther;

  bool fixed() const { return upper && *upper == lower; }
  friend bool operator==(const Variable&, const Variable&) = default;
};

struct Term {
  std::size_t var = 0;
  Time coef = 0;
  friend bool operator==(const Term&, const Term&) = default;
};

struct LinearConstraint {
  std::string name;
  std::vector<Term> terms;  // sorted by variable index, no zero coefficients
  Sense sense = Sense::kLessEqual;
  Time rhs = 0;
  Family family = Family::kOther;
  friend bool operator==(const LinearConstraint&, const LinearConstraint&) = default;
};

class MilpModel {
 public:
  std::size_t add_variable(Variable v) {
    if (index_.contains(v.name)) throw DomainError("duplicate variable '" + v.name + "'");
    index_.emplace(v.name, variables_.size());
    variables_.push_back(std::move(v));
    return variables_.size() - 1;
  }

  void add_constraint(std::string name, std::vector<Term> terms, Sense sense, Time rhs, Family family = Family::kOther) {
    for (const auto& t : terms)
      if (t.var >= variables_.size()) throw DomainError("constraint '" + name + "' references an undeclared variable");
    constraints_.push_back({std::move(name), canonical(std::move(terms)), sense, rhs, family});
  }

  void set_objective(std::vector<Term> terms) { objective_ = canonical(std::move(terms)); }

  std::size_t var(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw DomainError("unknown variable '" + name + "'");
    return it->second;
  }
  std::optional<std::size_t> find(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  const std::vector<Variable>& variables() const { return variables_; }
  std::vector<Variable>& variables() { return variables_; }
  const std::vector<LinearConstraint>& constraints() const { return constraints_; }
  const std::vector<Term>& objective() const { return objective_; }

  std::size_t count(Family f) const {
    return static_cast<std::size_t>(
        std::count_if(constraints_.begin(), constraints_.end(), [f](const auto& c) { return c.family == f; }));
  }
  std::size_t count(VarRole r) const {
    return static_cast<std::size_t>(
        std::count_if(variables_.begin(), variables_.end(), [r](const auto& v) { return v.role == r; }));
  }

  // Merges repeated variables and drops zero coefficients.
  static std::vector<Term> canonical(std::vector<Term> terms) {
    std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.var < b.var; });
    std::vector<Term> out;
    for (const auto& t : terms) {
      if (!out.empty() && out.back().var == t.var)
        out.back().coef += t.coef;
      else
        out.push_back(t);
    }
    std::erase_if(out, [](const Term& t) { return t.coef == 0; });
    return out;
  }

 private:
  std::vector<Variable> variables_;
  std::vector<LinearConstraint> constraints_;
  std::vector<Term> objective_;
  std::unordered_map<std::string, std::size_t> index_;
};

inline std::string start_var(ActivityId i, int g) { return "S_" + std::to_string(i) + "_" + std::to_string(g); }
inline std::string arc_var(ActivityId i, ActivityId j) { return "y_" + std::to_string(i) + "_" + std::to_string(j); }
inline std::string flow_var(ActivityId i, ActivityId j, std::size_t k) {
  return "f_" + std::to_string(i) + "_" + std::to_string(j) + "_" + std::to_string(k);
}

struct CompactOptions {
  bool transitivity = false;
  std::optional<TimeWindows> tighten;  // per-arc big-M from time windows
  bool integral_starts = false;
  std::optional<Time> big_m;           // default sum(nominal + deviation)
  // Source supplies and sink absorbs R_k units of every resource. With the
  // verbatim reading the dummies' zero requirements are used instead.
  bool classical_source_flow = true;
};

/// Flow right-hand sides (inflow, outflow) of activity i for resource k.
inline std::pair<Time, Time> flow_demand(const ProjectInstance& inst, ActivityId i, std::size_t k, bool classical) {
  if (classical && i == inst.source()) return {0, inst.capacity[k]};
  if (classical && i == inst.sink()) return {inst.capacity[k], 0};
  return {inst.requirement[i][k], inst.requirement[i][k]};
}

inline Time default_big_m(const ProjectInstance& inst) {
  Time m = 0;
  for (ActivityId i = 0; i < inst.size(); ++i) m += inst.nominal[i] + inst.deviation[i];
  return m;
}

/// Builds the compact reformulation:
///   min S_{n+1,Γ}
///   S_{0,0} = 0, S >= 0                                     (bounds)
///   S_{jg}   - S_{ig} >= nominal_i             - M_ij (1 - y_ij)  all (i,j), g = 0..Γ
///   S_{j,g+1} - S_{ig} >= nominal_i + deviation_i - M_ij (1 - y_ij)  all (i,j), g < Γ
///   y_ij = 1 on E ∪ {(n+1,n+1)}, y_ii = 0 otherwise           (bounds)
///   f_ijk <= R_k y_ij;  sum_i f_ijk = in_jk;  sum_j f_ijk = out_ik
/// plus, optionally, y_ij + y_ji <= 1 and y_ij >= y_il + y_lj - 1.
inline MilpModel build_compact(const ProjectInstance& inst, int gamma, const CompactOptions& opts = {}) {
  if (gamma < 0) throw DomainError("budget must be nonnegative");
  const std::size_t n = inst.size();
  const std::size_t nk = inst.num_resources();
  const ActivityId sink = inst.sink();
  const Time global_m = opts.big_m.value_or(default_big_m(inst));
  if (opts.tighten) {
    const Time critical = earliest_start_times(inst, inst.nominal)[sink];
    if (opts.tighten->horizon < critical)
      throw InvalidHorizonError("tightening horizon " + std::to_string(opts.tighten->horizon) +
                                " is below the nominal critical path " + std::to_string(critical));
    if (opts.tighten->es.size() != n || opts.tighten->lf.size() != n)
      throw DomainError("time windows do not match the instance");
  }
  auto big_m = [&](ActivityId i, ActivityId j) -> Time {
    if (!opts.tighten) return global_m;
    return std::max<Time>(0, opts.tighten->lf[i] - opts.tighten->es[j]);
  };

  MilpModel model;
  std::vector<std::vector<std::size_t>> s(n, std::vector<std::size_t>(static_cast<std::size_t>(gamma) + 1));
  for (ActivityId i = 0; i < n; ++i)
    for (int g = 0; g <= gamma; ++g) {
      Variable v{start_var(i, g), opts.integral_starts ? VarKind::kInteger : VarKind::kContinuous, 0, std::nullopt,
                 VarRole::kStart};
      if (i == 0 && g == 0) v.upper = 0;
      s[i][static_cast<std::size_t>(g)] = model.add_variable(std::move(v));
    }
  std::vector<std::vector<std::size_t>> y(n, std::vector<std::size_t>(n));
  for (ActivityId i = 0; i < n; ++i)
    for (ActivityId j = 0; j < n; ++j) {
      Variable v{arc_var(i, j), VarKind::kBinary, 0, 1, VarRole::kArc};
      if (inst.has_arc(i, j) || (i == sink && j == sink))
        v.lower = 1;
      else if (i == j)
        v.upper = 0;
      y[i][j] = model.add_variable(std::move(v));
    }
  std::vector<std::size_t> f(n * n * nk);
  auto fidx = [&](ActivityId i, ActivityId j, std::size_t k) -> std::size_t& { return f[(i * n + j) * nk + k]; };
  for (ActivityId i = 0; i < n; ++i)
    for (ActivityId j = 0; j < n; ++j)
      for (std::size_t k = 0; k < nk; ++k)
        fidx(i, j, k) = model.add_variable({flow_var(i, j, k), VarKind::kContinuous, 0, std::nullopt, VarRole::kFlow});

  model.set_objective({{s[sink][static_cast<std::size_t>(gamma)], 1}});

  auto tag = [](std::string prefix, std::initializer_list<std::size_t> idx) {
    for (auto x : idx) prefix += "_" + std::to_string(x);
    return prefix;
  };
  for (ActivityId i = 0; i < n; ++i)
    for (ActivityId j = 0; j < n; ++j) {
      const Time m = big_m(i, j);
      for (int g = 0; g <= gamma; ++g) {
        const auto gu = static_cast<std::size_t>(g);
        model.add_constraint(tag("c30", {i, j, gu}), {{s[j][gu], 1}, {s[i][gu], -1}, {y[i][j], -m}},
                             Sense::kGreaterEqual, inst.nominal[i] - m, Family::kBigMSameLevel);
      }
    }
  for (ActivityId i = 0; i < n; ++i)
    for (ActivityId j = 0; j < n; ++j) {
      const Time m = big_m(i, j);
      for (int g = 0; g < gamma; ++g) {
        const auto gu = static_cast<std::size_t>(g);
        model.add_constraint(tag("c31", {i, j, gu}), {{s[j][gu + 1], 1}, {s[i][gu], -1}, {y[i][j], -m}},
                             Sense::kGreaterEqual, inst.nominal[i] + inst.deviation[i] - m, Family::kBigMNextLevel);
      }
    }
  for (ActivityId i = 0; i < n; ++i)
    for (ActivityId j = 0; j < n; ++j)
      for (std::size_t k = 0; k < nk; ++k)
        model.add_constraint(tag("c33", {i, j, k}), {{fidx(i, j, k), 1}, {y[i][j], -inst.capacity[k]}},
                             Sense::kLessEqual, 0, Family::kFlowCapacity);
  for (ActivityId j = 0; j < n; ++j)
    for (std::size_t k = 0; k < nk; ++k) {
      std::vector<Term> terms;
      for (ActivityId i = 0; i < n; ++i) terms.push_back({fidx(i, j, k), 1});
      model.add_constraint(tag("c34", {j, k}), std::move(terms), Sense::kEqual,
                           flow_demand(inst, j, k, opts.classical_source_flow).first, Family::kFlowIn);
    }
  for (ActivityId i = 0; i < n; ++i)
    for (std::size_t k = 0; k < nk; ++k) {
      std::vector<Term> terms;
      for (ActivityId j = 0; j < n; ++j) terms.push_back({fidx(i, j, k), 1});
      model.add_constraint(tag("c35", {i, k}), std::move(terms), Sense::kEqual,
                           flow_demand(inst, i, k, opts.classical_source_flow).second, Family::kFlowOut);
    }
  if (opts.transitivity) {
    for (ActivityId i = 0; i < n; ++i)
      for (ActivityId j = 0; j < n; ++j) {
        if (i == sink && j == sink) continue;
        model.add_constraint(tag("c38", {i, j}), {{y[i][j], 1}, {y[j][i], 1}}, Sense::kLessEqual, 1,
                             Family::kAntisymmetry);
      }
    for (ActivityId i = 0; i < n; ++i)
      for (ActivityId l = 0; l < n; ++l)
        for (ActivityId j = 0; j < n; ++j)
          model.add_constraint(tag("c39", {i, l, j}), {{y[i][j], 1}, {y[i][l], -1}, {y[l][j], -1}},
                               Sense::kGreaterEqual, -1, Family::kTransitivity);
  }
  return model;
}

// ---------------------------------------------------------------------------
// Warm starts

/// Values in model variable order.
struct WarmStartAssignment {
  std::vector<std::pair<std::string, Rational>> values;

  std::optional<Rational> get(const std::string& name) const {
    for (const auto& [k, v] : values)
      if (k == name) return v;
    return std::nullopt;
  }
};

/// Resource flows carried by a schedule: activities are visited by start time
/// and every demand is served by earlier activities that have finished.
inline std::vector<std::vector<std::vector<Time>>> schedule_flows(const ProjectInstance& inst, const Schedule& sched,
                                                                 bool classical_source_flow) {
  const std::size_t n = inst.size();
  const std::size_t nk = inst.num_resources();
  const auto topo = topological_order(n, inst.arcs);
  std::vector<std::size_t> topo_pos(n);
  for (std::size_t p = 0; p < n; ++p) topo_pos[topo[p]] = p;
  std::vector<ActivityId> order(n);
  std::iota(order.begin(), order.end(), ActivityId{0});
  auto key = [&](ActivityId i) {
    return std::tuple(sched.start[i], sched.durations_used[i] > 0 ? 1 : 0, topo_pos[i]);
  };
  std::sort(order.begin(), order.end(), [&](ActivityId a, ActivityId b) { return key(a) < key(b); });

  std::vector<std::vector<std::vector<Time>>> flow(n, std::vector<std::vector<Time>>(n, std::vector<Time>(nk, 0)));
  for (std::size_t k = 0; k < nk; ++k) {
    std::vector<Time> spare(n, 0);
    for (std::size_t p = 0; p < n; ++p) {
      const ActivityId j = order[p];
      auto [need, give] = flow_demand(inst, j, k, classical_source_flow);
      for (std::size_t q = 0; q < p && need > 0; ++q) {
        const ActivityId i = order[q];
        if (sched.start[i] + sched.durations_used[i] > sched.start[j] || spare[i] == 0) continue;
        const Time take = std::min(spare[i], need);
        flow[i][j][k] += take;
        spare[i] -= take;
        need -= take;
      }
      if (need > 0)
        throw DomainError("schedule cannot route resource " + std::to_string(k) + " to activity " + std::to_string(j));
      spare[j] = give;
    }
  }
  return flow;
}

/// Complete assignment (S, y, f) for the compact model built from the warm
/// start's selection and leveled start times.
inline WarmStartAssignment make_warm_start_assignment(const ProjectInstance& inst, int gamma, const WarmStart& ws,
                                                      bool classical_source_flow = true) {
  const std::size_t n = inst.size();
  WarmStartAssignment a;
  for (ActivityId i = 0; i < n; ++i)
    for (int g = 0; g <= gamma; ++g)
      a.values.emplace_back(start_var(i, g), Rational(ws.leveled_starts[i][static_cast<std::size_t>(g)]));
  const auto arcs = extended_arcs(inst, ws.selection);
  for (ActivityId i = 0; i < n; ++i)
    for (ActivityId j = 0; j < n; ++j) {
      const bool on = std::binary_search(arcs.begin(), arcs.end(), Arc{i, j}) || (i == inst.sink() && j == i);
      a.values.emplace_back(arc_var(i, j), Rational(on ? 1 : 0));
    }
  const auto flow = schedule_flows(inst, ws.schedule, classical_source_flow);
  for (ActivityId i = 0; i < n; ++i)
    for (ActivityId j = 0; j < n; ++j)
      for (std::size_t k = 0; k < inst.num_resources(); ++k)
        a.values.emplace_back(flow_var(i, j, k), Rational(flow[i][j][k]));
  return a;
}

/// Exact feasibility check of an assignment against every bound, integrality
/// mark and row of a model. Variables missing from the assignment count as 0.
inline std::vector<std::string> check_assignment(const MilpModel& model, const WarmStartAssignment& a) {
  std::vector<Rational> x(model.variables().size(), Rational(0));
  std::vector<std::string> out;
  for (const auto& [name, v] : a.values) {
    auto idx = model.find(name);
    if (!idx) {
      out.push_back("assignment names unknown variable " + name);
      continue;
    }
    x[*idx] = v;
  }
  for (std::size_t v = 0; v < x.size(); ++v) {
    const auto& var = model.variables()[v];
    if (x[v] < Rational(var.lower) || (var.upper && x[v] > Rational(*var.upper))) out.push_back(var.name + " violates its bounds");
    if (var.kind != VarKind::kContinuous && x[v].denominator() != 1) out.push_back(var.name + " is not integral");
  }
  for (const auto& c : model.constraints()) {
    Rational lhs;
    for (const auto& t : c.terms) lhs += Rational(t.coef) * x[t.var];
    const bool ok = c.sense == Sense::kLessEqual      ? lhs <= Rational(c.rhs)
                    : c.sense == Sense::kGreaterEqual ? lhs >= Rational(c.rhs)
                                                      : lhs == Rational(c.rhs);
    if (!ok) out.push_back("row " + c.name + " violated (lhs " + to_string(lhs) + ", rhs " + std::to_string(c.rhs) + ")");
  }
  return out;
}

}  // namespace rrcpsp
