#pragma once

#include <string>
#include <vector>

#include "vsp/agent_set.hpp"
#include "vsp/config.hpp"
#include "vsp/numeric.hpp"

namespace vsp {

/// Infected set plus action profile: the full configuration of the process.
template <Scalar S>
struct State {
  AgentSet infected;
  std::vector<S> actions;

  int size() const { return static_cast<int>(actions.size()); }

  bool operator==(const State& other) const {
    return infected == other.infected && actions == other.actions;
  }

  /// Byte encoding in agent order; equal states give identical bytes.
  std::string canonical_key() const {
    std::string key;
    key.reserve(8 + actions.size() * 16);
    std::uint64_t m = infected.mask();
    for (int b = 7; b >= 0; --b) key.push_back(static_cast<char>((m >> (8 * b)) & 0xff));
    for (const S& a : actions) append_canonical(key, a);
    return key;
  }
};

template <Scalar S>
State<S> initial_state(const ModelConfig<S>& cfg) {
  return State<S>{cfg.initial_infected, cfg.initial_actions};
}

/// One epoch: the chosen agent's move (intermediate state) followed by the
/// infection update (next state).
template <Scalar S>
struct EpochRecord {
  long epoch = 0;
  int chosen = 0;
  State<S> intermediate;
  State<S> next;
  AgentSet newly_infected;
};

}  // namespace vsp
