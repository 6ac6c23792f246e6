#pragma once

// Random project instances for tests and synthetic corpora.

#include <random>
#include <string>
#include <vector>

#include "rrcpsp/instance.hpp"

namespace rrcpsp {

struct GeneratorOptions {
  std::size_t real_activities = 6;
  std::size_t resources = 1;
  Time max_duration = 9;
  Time max_deviation = 9;  // negative: deviation = ceil(nominal / 2)
  double arc_probability = 0.3;
  Time max_requirement = 4;
  Time capacity = 5;
  bool zero_durations = false;  // allow nominal duration 0 for real activities
};

/// Arcs i -> j (i < j) are drawn independently; activities left without a
/// predecessor hang off the source, those without a successor feed the sink.
inline ProjectInstance random_instance(std::mt19937_64& rng, const GeneratorOptions& opt, std::string name = "random") {
  const std::size_t n = opt.real_activities;
  const std::size_t total = n + 2;
  auto uniform = [&](Time lo, Time hi) { return std::uniform_int_distribution<Time>(lo, hi)(rng); };
  std::bernoulli_distribution coin(opt.arc_probability);

  std::vector<Time> nominal(total, 0), deviation(total, 0);
  std::vector<std::vector<Time>> req(total, std::vector<Time>(opt.resources, 0));
  for (std::size_t i = 1; i <= n; ++i) {
    nominal[i] = uniform(opt.zero_durations ? 0 : 1, opt.max_duration);
    deviation[i] = opt.max_deviation < 0 ? (nominal[i] + 1) / 2 : uniform(0, opt.max_deviation);
    for (auto& r : req[i]) r = uniform(0, std::min(opt.max_requirement, opt.capacity));
  }
  std::vector<Arc> arcs;
  std::vector<bool> has_pred(total, false), has_succ(total, false);
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = i + 1; j <= n; ++j)
      if (coin(rng)) {
        arcs.push_back({i, j});
        has_succ[i] = has_pred[j] = true;
      }
  for (std::size_t i = 1; i <= n; ++i) {
    if (!has_pred[i]) arcs.push_back({0, i});
    if (!has_succ[i]) arcs.push_back({i, n + 1});
  }
  if (n == 0) arcs.push_back({0, 1});
  return make_instance(std::move(nominal), std::move(deviation), std::move(req),
                       std::vector<Time>(opt.resources, opt.capacity), std::move(arcs), std::move(name));
}

}  // namespace rrcpsp
