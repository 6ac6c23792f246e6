#pragma once

// The three-activity diamond on which the linearized adversary model and its
// linear relaxation disagree: 0 -> 1 -> {2, 3} -> 4, unit nominal durations
// and unit deviations, budget 1.

#include "rrcpsp/adversary.hpp"

namespace rrcpsp::counterexample {

inline constexpr int kGamma = 1;

inline ProjectInstance instance() {
  return make_instance({0, 1, 1, 1, 0}, {0, 1, 1, 1, 0}, std::vector<std::vector<Time>>(5), {},
                       {{0, 1}, {1, 2}, {1, 3}, {2, 4}, {3, 4}}, "diamond");
}

/// Unit flow split evenly after activity 1, delay spread as (1/2, 1/4, 1/4),
/// w_ij = min(delta_i, alpha_ij). Objective 7/2.
inline FractionalCertificate fractional_certificate() {
  FractionalCertificate c;
  const Rational half(1, 2);
  c.alpha = {{{0, 1}, Rational(1)}, {{1, 2}, half}, {{1, 3}, half}, {{2, 4}, half}, {{3, 4}, half}};
  c.delta = {Rational(0), half, Rational(1, 4), Rational(1, 4), Rational(0)};
  for (const auto& [a, al] : c.alpha) c.w[a] = std::min(c.delta[a.from], al);
  return c;
}

/// Single path 0 -> 1 -> 2 -> 4 with the whole budget on activity 2. Objective 3.
inline FractionalCertificate integral_certificate() {
  FractionalCertificate c;
  c.alpha = {{{0, 1}, Rational(1)}, {{1, 2}, Rational(1)}, {{2, 4}, Rational(1)}};
  c.delta = {Rational(0), Rational(0), Rational(1), Rational(0), Rational(0)};
  c.w = {{{2, 4}, Rational(1)}};
  return c;
}

}  // namespace rrcpsp::counterexample
