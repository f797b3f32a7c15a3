#pragma once

// Exact law of S_T: dynamic programming over state distributions, each
// epoch branching to the n choices of mover with weight 1/n.

#include <algorithm>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "vsp/config.hpp"
#include "vsp/errors.hpp"
#include "vsp/model.hpp"
#include "vsp/state.hpp"

namespace vsp {

struct DistributionEntry {
  std::string key;  // State::canonical_key()
  State<Rational> state;
  Rational prob;
};

/// Finite support of exact probabilities, sorted by canonical key.
struct StateDistribution {
  std::vector<DistributionEntry> support;
  long epoch = 0;

  Rational total() const {
    Rational t = 0;
    for (const auto& e : support) t += e.prob;
    return t;
  }
};

struct EnumerationOptions {
  std::size_t support_cap = 1'000'000;
  unsigned threads = 1;
};

inline StateDistribution point_mass(const State<Rational>& s, long epoch = 0) {
  StateDistribution d;
  d.epoch = epoch;
  d.support.push_back({s.canonical_key(), s, Rational(1)});
  return d;
}

namespace detail {

using Accumulator = std::unordered_map<std::string, std::pair<State<Rational>, Rational>>;

inline void cap_exceeded(std::size_t cap) {
  throw ResourceLimitError("enumeration support exceeded the cap of " + std::to_string(cap) +
                           " states (raise --support-cap)");
}

inline void branch(const std::vector<DistributionEntry>& support, std::size_t begin, std::size_t end,
                   const ModelConfig<Rational>& cfg, std::size_t cap, Accumulator& out) {
  const Rational share(1, cfg.n);
  auto add = [&](std::string key, State<Rational>&& s, const Rational& p) {
    auto it = out.find(key);
    if (it == out.end()) {
      out.emplace(std::move(key), std::make_pair(std::move(s), p));
      if (out.size() > cap) cap_exceeded(cap);
    } else {
      it->second.second += p;
    }
  };
  for (std::size_t k = begin; k < end; ++k) {
    const auto& e = support[k];
    if (is_absorbing(e.state, cfg)) {
      add(e.key, State<Rational>(e.state), e.prob);
      continue;
    }
    const Rational p = e.prob * share;
    for (int i = 0; i < cfg.n; ++i) {
      State<Rational> next = step_state(e.state, i, cfg);
      std::string key = next.canonical_key();
      add(std::move(key), std::move(next), p);
    }
  }
}

}  // namespace detail

/// One epoch of the exact law. Output is independent of `threads`: partial
/// sums are exact and the merged support is sorted by canonical key.
template <Scalar S>
StateDistribution advance(const StateDistribution& dist, const ModelConfig<S>& cfg, const EnumerationOptions& opt = {}) {
  if constexpr (!is_exact_v<S>) {
    (void)dist;
    (void)cfg;
    (void)opt;
    throw ValidationError("exact enumeration requires rational arithmetic");
  } else {
    const std::size_t size = dist.support.size();
    const unsigned workers = std::max(1u, std::min<unsigned>(opt.threads, static_cast<unsigned>(size / 256 + 1)));
    std::vector<detail::Accumulator> parts(workers);
    if (workers == 1) {
      detail::branch(dist.support, 0, size, cfg, opt.support_cap, parts[0]);
    } else {
      std::vector<std::thread> pool;
      std::vector<std::exception_ptr> errors(workers);
      for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          try {
            detail::branch(dist.support, size * w / workers, size * (w + 1) / workers, cfg, opt.support_cap, parts[w]);
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
      }
      for (auto& th : pool) th.join();
      for (auto& e : errors)
        if (e) std::rethrow_exception(e);
      for (unsigned w = 1; w < workers; ++w) {
        for (auto& [key, val] : parts[w]) {
          auto it = parts[0].find(key);
          if (it == parts[0].end()) {
            parts[0].emplace(key, std::move(val));
            if (parts[0].size() > opt.support_cap) detail::cap_exceeded(opt.support_cap);
          } else {
            it->second.second += val.second;
          }
        }
        detail::Accumulator().swap(parts[w]);
      }
    }
    StateDistribution next;
    next.epoch = dist.epoch + 1;
    next.support.reserve(parts[0].size());
    for (auto& [key, val] : parts[0]) next.support.push_back({key, std::move(val.first), std::move(val.second)});
    std::sort(next.support.begin(), next.support.end(),
              [](const DistributionEntry& a, const DistributionEntry& b) { return a.key < b.key; });
    return next;
  }
}

/// Law after `transitions` epochs started from the config's initial state.
template <Scalar S>
StateDistribution enumerate_exact(const ModelConfig<S>& cfg, long transitions, const EnumerationOptions& opt = {}) {
  if (transitions < 0) throw ValidationError("transition count must be non-negative");
  if constexpr (!is_exact_v<S>) {
    throw ValidationError("exact enumeration requires rational arithmetic");
  } else {
    StateDistribution d = point_mass(initial_state(cfg));
    for (long t = 0; t < transitions; ++t) d = advance(d, cfg, opt);
    return d;
  }
}

/// Transitions behind a table horizon. Epochs are counted from 1 with the
/// initial state as epoch 1, so "after 10 epochs" is the law after 9
/// transitions; this is the convention that reproduces the published
/// enumeration columns.
inline long transitions_for_horizon(long horizon) {
  if (horizon < 1) throw ValidationError("horizon must be at least 1");
  return horizon - 1;
}

/// Law at a table horizon; see transitions_for_horizon.
template <Scalar S>
StateDistribution enumerate_horizon(const ModelConfig<S>& cfg, long horizon, const EnumerationOptions& opt = {}) {
  return enumerate_exact(cfg, transitions_for_horizon(horizon), opt);
}

/// Index m-1 holds P(|I(S_T)| = m).
inline std::vector<Rational> marginal_infected_size(const StateDistribution& dist, int n) {
  std::vector<Rational> law(static_cast<std::size_t>(n), Rational(0));
  for (const auto& e : dist.support) law[static_cast<std::size_t>(e.state.infected.size() - 1)] += e.prob;
  return law;
}

/// Probability mass on exact fixpoints.
inline Rational absorbed_mass(const StateDistribution& dist, const ModelConfig<Rational>& cfg) {
  Rational m = 0;
  for (const auto& e : dist.support)
    if (is_absorbing(e.state, cfg)) m += e.prob;
  return m;
}

/// Probability mass on states whose infected set is already final.
inline Rational settled_mass(const StateDistribution& dist, const ModelConfig<Rational>& cfg) {
  Rational m = 0;
  for (const auto& e : dist.support)
    if (is_settled(e.state, cfg)) m += e.prob;
  return m;
}

}  // namespace vsp
