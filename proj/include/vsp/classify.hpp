#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "vsp/agent_set.hpp"
#include "vsp/numeric.hpp"
#include "vsp/theory.hpp"

namespace vsp {

namespace detail {

template <Scalar S>
Rational exact_value(const S& x) {
  if constexpr (is_exact_v<S>) {
    return x;
  } else {
    return rational_from_double(x);
  }
}

template <Scalar S>
bool near(const S& x, const Rational& target, double tolerance) {
  if constexpr (is_exact_v<S>) {
    return tolerance == 0.0 ? x == target : std::abs(Rational(x - target).get_d()) <= tolerance;
  } else {
    return std::abs(x - to_double(target)) <= tolerance;
  }
}

}  // namespace detail

/// Places an action profile in {ones} or some A_m, or returns empty when it
/// fits neither. Use tolerance 0 for exact rationals. Infected agents must
/// be among the coordinates at 1.
template <Scalar S>
std::optional<ActionProfileClass> classify_action_profile(const std::vector<S>& actions, AgentSet infected, int n,
                                                          const S& tau, double tolerance = 0.0) {
  if (static_cast<int>(actions.size()) != n) return std::nullopt;
  AgentSet ones;
  for (int i = 0; i < n; ++i)
    if (detail::near(actions[static_cast<std::size_t>(i)], Rational(1), tolerance)) ones.insert(i);
  if (ones.size() == n) return ActionProfileClass::ones();
  if (!ones.contains(0) || !ones.includes(infected)) return std::nullopt;
  const long m = ones.size();
  const Rational t = detail::exact_value(tau);
  if (!(Rational(n - 1) * t < Rational(m))) return std::nullopt;
  ActionProfileClass cls = ActionProfileClass::a_class(m, n, t);
  for (int i = 0; i < n; ++i) {
    if (ones.contains(i)) continue;
    if (!detail::near(actions[static_cast<std::size_t>(i)], cls.off_value, tolerance)) return std::nullopt;
  }
  return cls;
}

}  // namespace vsp
