#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "rrcpsp/instance.hpp"

namespace rrcpsp {

using json = nlohmann::ordered_json;

inline json arcs_to_json(const std::vector<Arc>& arcs) {
  json a = json::array();
  for (const auto& arc : arcs) a.push_back({arc.from, arc.to});
  return a;
}

inline std::vector<Arc> arcs_from_json(const json& a) {
  std::vector<Arc> arcs;
  for (const auto& p : a) {
    if (!p.is_array() || p.size() != 2) throw DomainError("arc must be a pair [from, to]");
    arcs.push_back({p[0].get<ActivityId>(), p[1].get<ActivityId>()});
  }
  return arcs;
}

namespace json_detail {
inline json opt_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }
inline std::optional<double> opt_number(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<double>();
}
}  // namespace json_detail

/// Canonical JSON form of an instance. Integers everywhere except the metadata
/// decimals.
inline json to_json(const ProjectInstance& inst) {
  json j;
  json ids = json::array();
  for (ActivityId i = 0; i < inst.size(); ++i) ids.push_back(i);
  j["activities"] = ids;
  j["nominal"] = inst.nominal;
  j["deviation"] = inst.deviation;
  j["requirements"] = inst.requirement;
  j["capacities"] = inst.capacity;
  j["arcs"] = arcs_to_json(inst.arcs);
  j["meta"] = {{"name", inst.meta.name},
               {"network_complexity", json_detail::opt_number(inst.meta.network_complexity)},
               {"resource_factor", json_detail::opt_number(inst.meta.resource_factor)},
               {"resource_strength", json_detail::opt_number(inst.meta.resource_strength)},
               {"source_path", inst.meta.source_path},
               {"robustified", inst.robustified}};
  return j;
}

inline ProjectInstance instance_from_json(const json& j) {
  try {
    ProjectInstance inst;
    const auto ids = j.at("activities").get<std::vector<ActivityId>>();
    for (std::size_t i = 0; i < ids.size(); ++i)
      if (ids[i] != i) throw DomainError("activity ids must be 0..n+1 in order");
    inst.nominal = j.at("nominal").get<std::vector<Time>>();
    inst.deviation = j.at("deviation").get<std::vector<Time>>();
    inst.requirement = j.at("requirements").get<std::vector<std::vector<Time>>>();
    inst.capacity = j.at("capacities").get<std::vector<Time>>();
    inst.arcs = arcs_from_json(j.at("arcs"));
    if (ids.size() != inst.nominal.size()) throw DomainError("activity list and duration vector differ in length");
    if (j.contains("meta")) {
      const auto& m = j["meta"];
      inst.meta.name = m.value("name", "");
      inst.meta.network_complexity = json_detail::opt_number(m, "network_complexity");
      inst.meta.resource_factor = json_detail::opt_number(m, "resource_factor");
      inst.meta.resource_strength = json_detail::opt_number(m, "resource_strength");
      inst.meta.source_path = m.value("source_path", "");
      inst.robustified = m.value("robustified", false);
    }
    normalize_arcs(inst.arcs);
    validate(inst);
    return inst;
  } catch (const json::exception& e) {
    throw DomainError(std::string("malformed instance JSON: ") + e.what());
  }
}

}  // namespace rrcpsp
