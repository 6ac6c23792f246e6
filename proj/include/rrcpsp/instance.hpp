#pragma once

#include <algorithm>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rrcpsp/core.hpp"
#include "rrcpsp/graph.hpp"

namespace rrcpsp {

struct InstanceMeta {
  std::string name;
  std::optional<double> network_complexity;
  std::optional<double> resource_factor;
  std::optional<double> resource_strength;
  std::string source_path;

  friend bool operator==(const InstanceMeta&, const InstanceMeta&) = default;
};

/// A single-mode project with renewable resources and budgeted duration
/// uncertainty. Activities are 0..n+1; 0 and n+1 are the dummy source and sink.
struct ProjectInstance {
  std::vector<Time> nominal;                  // nominal duration per activity
  std::vector<Time> deviation;                // maximum deviation per activity
  std::vector<std::vector<Time>> requirement;  // [activity][resource]
  std::vector<Time> capacity;                 // per resource
  std::vector<Arc> arcs;                      // precedence set E, sorted, unique
  InstanceMeta meta;
  bool robustified = false;

  std::size_t size() const noexcept { return nominal.size(); }  // |V| = n + 2
  std::size_t num_real() const noexcept { return size() - 2; }   // n
  ActivityId source() const noexcept { return 0; }
  ActivityId sink() const noexcept { return size() - 1; }
  std::size_t num_resources() const noexcept { return capacity.size(); }
  bool is_dummy(ActivityId i) const noexcept { return i == source() || i == sink(); }

  bool has_arc(ActivityId i, ActivityId j) const {
    return std::binary_search(arcs.begin(), arcs.end(), Arc{i, j});
  }

  friend bool operator==(const ProjectInstance&, const ProjectInstance&) = default;
};

/// Budget Γ of the uncertainty set.
struct Budget {
  int gamma = 0;
};

inline void normalize_arcs(std::vector<Arc>& arcs) {
  std::sort(arcs.begin(), arcs.end());
  arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());
}

/// Checks every structural invariant; throws DomainError (or CycleError for a
/// cyclic precedence graph).
inline void validate(const ProjectInstance& inst) {
  const std::size_t v = inst.size();
  if (v < 2) throw DomainError("instance needs at least the two dummy activities");
  if (inst.deviation.size() != v || inst.requirement.size() != v)
    throw DomainError("per-activity vectors have inconsistent lengths");
  for (ActivityId i = 0; i < v; ++i) {
    if (inst.nominal[i] < 0 || inst.deviation[i] < 0)
      throw DomainError("negative duration for activity " + std::to_string(i));
    if (inst.requirement[i].size() != inst.num_resources())
      throw DomainError("requirement row of activity " + std::to_string(i) + " has wrong length");
  }
  for (std::size_t k = 0; k < inst.num_resources(); ++k)
    if (inst.capacity[k] <= 0) throw DomainError("capacity of resource " + std::to_string(k) + " must be positive");
  for (ActivityId d : {inst.source(), inst.sink()}) {
    if (inst.nominal[d] != 0 || inst.deviation[d] != 0)
      throw DomainError("dummy activity " + std::to_string(d) + " must have zero duration");
    for (auto r : inst.requirement[d])
      if (r != 0) throw DomainError("dummy activity " + std::to_string(d) + " must have zero requirements");
  }
  for (ActivityId i = 0; i < v; ++i)
    for (std::size_t k = 0; k < inst.num_resources(); ++k) {
      if (inst.requirement[i][k] < 0)
        throw DomainError("negative requirement for activity " + std::to_string(i));
      if (inst.requirement[i][k] > inst.capacity[k])
        throw DomainError("activity " + std::to_string(i) + " requires more of resource " + std::to_string(k) +
                          " than available");
    }
  for (const auto& a : inst.arcs)
    if (a.from >= v || a.to >= v) throw DomainError("precedence arc references unknown activity");
  if (!std::is_sorted(inst.arcs.begin(), inst.arcs.end()) ||
      std::adjacent_find(inst.arcs.begin(), inst.arcs.end()) != inst.arcs.end())
    throw DomainError("precedence arcs must be sorted and unique");
  const auto reach = transitive_closure(v, inst.arcs);
  for (ActivityId i = 1; i < v; ++i)
    if (!reach.test(0, i)) throw DomainError("activity " + std::to_string(i) + " is not reachable from the source");
  for (ActivityId i = 0; i + 1 < v; ++i)
    if (!reach.test(i, inst.sink()))
      throw DomainError("activity " + std::to_string(i) + " does not reach the sink");
}

/// Sets the maximum deviation to ceil(nominal / 2) for every real activity.
/// The rule is applied once per instance; calling it on an already robustified
/// instance returns it unchanged.
inline ProjectInstance robustify(ProjectInstance inst) {
  if (inst.robustified) return inst;
  for (ActivityId i = 0; i < inst.size(); ++i)
    inst.deviation[i] = inst.is_dummy(i) ? 0 : (inst.nominal[i] + 1) / 2;
  inst.robustified = true;
  return inst;
}

/// theta_i = nominal_i + delta_i * deviation_i. The budget sum(delta) <= Gamma
/// is not enforced here.
inline std::vector<Rational> scenario_durations(const ProjectInstance& inst, std::span<const Rational> delta) {
  if (delta.size() != inst.size()) throw DomainError("scenario vector has wrong length");
  std::vector<Rational> theta(inst.size());
  for (ActivityId i = 0; i < inst.size(); ++i) {
    if (delta[i] < Rational(0) || delta[i] > Rational(1))
      throw DomainError("delta of activity " + std::to_string(i) + " outside [0,1]");
    theta[i] = Rational(inst.nominal[i]) + delta[i] * Rational(inst.deviation[i]);
  }
  return theta;
}

/// Builds an instance from its parts, normalizing the arc list and validating.
inline ProjectInstance make_instance(std::vector<Time> nominal, std::vector<Time> deviation,
                                     std::vector<std::vector<Time>> requirement, std::vector<Time> capacity,
                                     std::vector<Arc> arcs, std::string name = {}) {
  ProjectInstance inst;
  inst.nominal = std::move(nominal);
  inst.deviation = std::move(deviation);
  inst.requirement = std::move(requirement);
  inst.capacity = std::move(capacity);
  inst.arcs = std::move(arcs);
  inst.meta.name = std::move(name);
  normalize_arcs(inst.arcs);
  validate(inst);
  return inst;
}

}  // namespace rrcpsp
