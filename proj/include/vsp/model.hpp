#pragma once

// Single-epoch mechanics: viral exposure, utility, best response and the
// state transition. Every function here is pure.

#include <utility>

#include "vsp/config.hpp"
#include "vsp/state.hpp"

namespace vsp {

namespace detail {

/// Numerator and denominator of r_i(S): infected-weighted and total
/// interaction mass seen by agent i, excluding i itself.
template <Scalar S>
std::pair<S, S> exposure_terms(int i, const State<S>& s, const ModelConfig<S>& cfg) {
  S num = 0, den = 0;
  if (cfg.common_weight) {
    // A common factor cancels in the ratio; zero weight means no exposure.
    if (*cfg.common_weight == 0) return {num, den};
    for (int j = 0; j < cfg.n; ++j) {
      if (j == i) continue;
      den += s.actions[static_cast<std::size_t>(j)];
      if (s.infected.contains(j)) num += s.actions[static_cast<std::size_t>(j)];
    }
    return {num, den};
  }
  for (int j = 0; j < cfg.n; ++j) {
    if (j == i) continue;
    S term = cfg.weight(i, j) * s.actions[static_cast<std::size_t>(j)];
    if (s.infected.contains(j)) num += term;
    den += term;
  }
  return {num, den};
}

/// a_j * r_j > tau_j with r_j given as num/den. Exact mode cross-multiplies
/// (den > 0); float mode evaluates the product literally, so rounding can
/// tip a best response sitting exactly on the boundary.
template <Scalar S>
bool exceeds_immunity(const S& action, const S& num, const S& den, const S& tau) {
  if (den == 0) return false;
  if constexpr (is_exact_v<S>) {
    return action * num > tau * den;
  } else {
    return action * (num / den) > tau;
  }
}

}  // namespace detail

/// r_i(S): fraction of agent i's weighted contact coming from infected
/// agents; 0 when i has no contact mass at all.
template <Scalar S>
S exposure(int i, const State<S>& s, const ModelConfig<S>& cfg) {
  auto [num, den] = detail::exposure_terms(i, s, cfg);
  if (den == 0) return S(0);
  return S(num / den);
}

/// u_i(S). Returned as double because f may be irrational (sqrt); the
/// branch between reward and no reward is decided in the state's scalar.
template <Scalar S>
double utility(int i, const State<S>& s, const ModelConfig<S>& cfg) {
  const S& a = s.actions[static_cast<std::size_t>(i)];
  double base = cfg.curve(scalar_traits<S>::to_double(a));
  if (s.infected.contains(i)) return base;
  auto [num, den] = detail::exposure_terms(i, s, cfg);
  return detail::exceeds_immunity(a, num, den, cfg.tau[static_cast<std::size_t>(i)]) ? base : 1.0 + base;
}

/// b_i(S) in closed form: 1 for infected or unexposed agents, otherwise
/// min{1, tau_i / r_i}. Independent of the utility curve.
template <Scalar S>
S best_response(int i, const State<S>& s, const ModelConfig<S>& cfg) {
  if (s.infected.contains(i)) return S(1);
  auto [num, den] = detail::exposure_terms(i, s, cfg);
  if (num == 0 || den == 0) return S(1);
  const S& tau = cfg.tau[static_cast<std::size_t>(i)];
  S reply;
  if constexpr (is_exact_v<S>) {
    reply = tau * den / num;
  } else {
    reply = tau / (num / den);
  }
  return reply < 1 ? reply : S(1);
}

/// Agents not yet infected whose action times exposure strictly exceeds
/// their immunity at the given mid-epoch state.
template <Scalar S>
AgentSet infection_update(const State<S>& intermediate, const ModelConfig<S>& cfg) {
  AgentSet hits;
  const auto& acts = intermediate.actions;
  if (cfg.common_weight) {
    if (*cfg.common_weight == 0) return hits;
    S total = 0, infected_total = 0;
    for (int j = 0; j < cfg.n; ++j) {
      total += acts[static_cast<std::size_t>(j)];
      if (intermediate.infected.contains(j)) infected_total += acts[static_cast<std::size_t>(j)];
    }
    if (infected_total == 0) return hits;
    for (int j = 0; j < cfg.n; ++j) {
      if (intermediate.infected.contains(j)) continue;
      const S& a = acts[static_cast<std::size_t>(j)];
      if (a == 0) continue;
      S den = total - a;
      if (detail::exceeds_immunity(a, infected_total, den, cfg.tau[static_cast<std::size_t>(j)])) hits.insert(j);
    }
    return hits;
  }
  for (int j = 0; j < cfg.n; ++j) {
    if (intermediate.infected.contains(j)) continue;
    const S& a = acts[static_cast<std::size_t>(j)];
    if (a == 0) continue;
    auto [num, den] = detail::exposure_terms(j, intermediate, cfg);
    if (detail::exceeds_immunity(a, num, den, cfg.tau[static_cast<std::size_t>(j)])) hits.insert(j);
  }
  return hits;
}

/// Next state only; the hot path of enumeration and Monte Carlo.
template <Scalar S>
State<S> step_state(const State<S>& s, int chosen, const ModelConfig<S>& cfg) {
  State<S> next = s;
  next.actions[static_cast<std::size_t>(chosen)] = best_response(chosen, s, cfg);
  next.infected |= infection_update(next, cfg);
  return next;
}

/// One full epoch: chosen agent best-responds, then infections apply.
template <Scalar S>
EpochRecord<S> epoch_step(const State<S>& s, int chosen, const ModelConfig<S>& cfg, long epoch = 0) {
  if (chosen < 0 || chosen >= cfg.n) throw ValidationError("chosen agent out of range");
  EpochRecord<S> rec;
  rec.epoch = epoch;
  rec.chosen = chosen;
  rec.intermediate = s;
  rec.intermediate.actions[static_cast<std::size_t>(chosen)] = best_response(chosen, s, cfg);
  rec.newly_infected = infection_update(rec.intermediate, cfg);
  rec.next = rec.intermediate;
  rec.next.infected |= rec.newly_infected;
  return rec;
}

/// Exact fixpoint: every agent already plays its best response and no
/// infection is pending, so epoch_step(s, i).next == s for all i.
template <Scalar S>
bool is_absorbing(const State<S>& s, const ModelConfig<S>& cfg) {
  for (int i = 0; i < cfg.n; ++i)
    if (best_response(i, s, cfg) != s.actions[static_cast<std::size_t>(i)]) return false;
  return infection_update(s, cfg).empty();
}

/// The infected set can no longer grow: all infected agents play 1 and no
/// uninfected agent is over its threshold. This is preserved by every
/// epoch (an uninfected mover only raises its own action to a safe level,
/// which can only lower others' exposure), so I(S) = I(S_inf).
template <Scalar S>
bool is_settled(const State<S>& s, const ModelConfig<S>& cfg) {
  for (int i : s.infected.members())
    if (s.actions[static_cast<std::size_t>(i)] != 1) return false;
  return infection_update(s, cfg).empty();
}

}  // namespace vsp
