#pragma once

// Trajectories of the process under a fixed agent sequence (DVSP) or a
// seeded uniform one (SVSP), plus Monte Carlo aggregation of their limits.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <thread>
#include <vector>

#include "vsp/classify.hpp"
#include "vsp/config.hpp"
#include "vsp/model.hpp"
#include "vsp/rng.hpp"
#include "vsp/state.hpp"

namespace vsp {

/// Default horizon: a small multiple of n covers the homogeneous presets.
inline long default_max_epochs(int n) { return 64L * n; }

enum class StopRule {
  absorbed,  // run until an exact fixpoint (or the sequence/horizon ends)
  settled,   // stop as soon as the infected set is provably final
};

struct RunOptions {
  StopRule stop = StopRule::absorbed;
  bool record = true;            // keep per-epoch records
  bool wait_for_first = false;   // with StopRule::settled, also wait for agent 1's first move
};

template <Scalar S>
struct Trajectory {
  State<S> initial;
  std::vector<EpochRecord<S>> records;
  State<S> final_state;
  long epochs = 0;
  bool absorbed = false;
  std::optional<long> absorbed_at;
  std::optional<long> settled_at;
  std::vector<std::optional<long>> first_hit;  // t_i, first epoch agent i moved
  std::optional<AgentSet> n1;                  // agents that moved before agent 1
  std::optional<State<S>> limit;               // S_inf when it is determined

  /// The infected set is known to be I(S_inf).
  bool settled() const { return settled_at.has_value(); }
};

/// Limit action of the uninfected agents in a complete graph with common
/// immunity; see theory's predict_action_limit.
template <Scalar S>
S common_action_limit(long m, int n, const S& tau) {
  const S mm = scalar_traits<S>::from_rational(Rational(m));
  const S nm1 = scalar_traits<S>::from_rational(Rational(n - 1));
  if (nm1 * tau >= mm) return S(1);
  return S(tau * mm / ((1 + tau) * mm - tau * nm1));
}

/// S_inf for a settled state when it has a closed form: all infected at 1
/// and every uninfected agent at the common limit. Requires equal weights
/// and a common tau; otherwise empty.
template <Scalar S>
std::optional<State<S>> settled_limit(const State<S>& s, const ModelConfig<S>& cfg) {
  if (!cfg.common_weight) return std::nullopt;
  auto tau = cfg.uniform_tau();
  if (!tau) return std::nullopt;
  State<S> lim{s.infected, std::vector<S>(static_cast<std::size_t>(cfg.n), S(1))};
  if (*cfg.common_weight == 0) return lim;
  const S gamma = common_action_limit(s.infected.size(), cfg.n, *tau);
  for (int i = 0; i < cfg.n; ++i)
    if (!s.infected.contains(i)) lim.actions[static_cast<std::size_t>(i)] = gamma;
  return lim;
}

/// Runs the process along `seq` for at most `max_epochs` epochs.
/// Absorption is tested on each post-epoch state (on S0 only if no epoch
/// runs at all).
template <Scalar S>
Trajectory<S> run_dvsp(const ModelConfig<S>& cfg, const AgentSequence& seq, long max_epochs,
                       RunOptions opt = {}) {
  if (max_epochs < 0) throw ValidationError("max_epochs must be non-negative");
  seq.validate(cfg.n);
  Trajectory<S> tr;
  tr.initial = initial_state(cfg);
  tr.first_hit.assign(static_cast<std::size_t>(cfg.n), std::nullopt);
  State<S> s = tr.initial;
  if (is_settled(s, cfg)) tr.settled_at = 0;

  long t = 0;
  if (max_epochs == 0 || !seq.at(0, cfg.n)) {
    if (is_absorbing(s, cfg)) {
      tr.absorbed = true;
      tr.absorbed_at = 0;
    }
  }
  while (t < max_epochs) {
    auto agent = seq.at(t, cfg.n);
    if (!agent) break;
    auto& hit = tr.first_hit[static_cast<std::size_t>(*agent)];
    if (!hit) hit = t;
    if (opt.record) {
      tr.records.push_back(epoch_step(s, *agent, cfg, t));
      s = tr.records.back().next;
    } else {
      s = step_state(s, *agent, cfg);
    }
    ++t;
    if (!tr.settled_at && is_settled(s, cfg)) tr.settled_at = t;
    if (tr.settled_at && is_absorbing(s, cfg)) {
      tr.absorbed = true;
      tr.absorbed_at = t;
      break;
    }
    if (opt.stop == StopRule::settled && tr.settled_at && (!opt.wait_for_first || tr.first_hit[0])) break;
  }
  tr.epochs = t;
  tr.final_state = s;

  if (tr.first_hit[0]) {
    AgentSet before;
    for (int i = 0; i < cfg.n; ++i) {
      const auto& h = tr.first_hit[static_cast<std::size_t>(i)];
      if (h && *h < *tr.first_hit[0]) before.insert(i);
    }
    tr.n1 = before;
  }
  if (tr.absorbed) {
    tr.limit = s;
  } else if (tr.settled_at) {
    tr.limit = settled_limit(s, cfg);
  }
  return tr;
}

/// One SVSP sample: agents drawn uniformly from stream `stream` of `seed`.
/// Stops once the infected set is final and agent 1 has moved.
template <Scalar S>
Trajectory<S> run_svsp_sample(const ModelConfig<S>& cfg, std::uint64_t seed, std::uint64_t stream, long max_epochs,
                              RunOptions opt = {StopRule::settled, true, true}) {
  return run_dvsp(cfg, AgentSequence::seeded(seed, stream), max_epochs, opt);
}

/// Frequencies of |N_1| in {0, ..., n-1}; trajectories in which agent 1
/// never moved are counted in `missing` and left out of the frequencies.
struct FirstHitStats {
  std::vector<std::uint64_t> counts;
  std::uint64_t missing = 0;

  std::uint64_t observed() const {
    std::uint64_t s = 0;
    for (auto c : counts) s += c;
    return s;
  }
  std::vector<double> frequencies() const {
    std::vector<double> f(counts.size(), 0.0);
    const double total = static_cast<double>(observed());
    if (total == 0) return f;
    for (std::size_t i = 0; i < counts.size(); ++i) f[i] = static_cast<double>(counts[i]) / total;
    return f;
  }
};

template <Scalar S>
FirstHitStats first_hit_stats(const std::vector<Trajectory<S>>& samples, int n) {
  FirstHitStats st;
  st.counts.assign(static_cast<std::size_t>(n), 0);
  for (const auto& tr : samples) {
    if (tr.n1) {
      ++st.counts[static_cast<std::size_t>(tr.n1->size())];
    } else {
      ++st.missing;
    }
  }
  return st;
}

/// Counts over settled samples. Unsettled samples (horizon hit before the
/// infected set became final) are excluded from the laws and reported.
struct EmpiricalLaw {
  int n = 0;
  std::uint64_t samples = 0;
  std::uint64_t settled = 0;
  std::uint64_t unsettled = 0;
  std::uint64_t unclassified = 0;  // settled, but the limit profile fits no class or is unknown
  std::vector<std::uint64_t> infected_size_counts;  // index m-1
  std::map<AgentSet, std::uint64_t> infected_set_counts;
  std::map<ActionProfileClass, std::uint64_t> action_class_counts;
  FirstHitStats first_hits;

  /// Index m-1 holds the fraction of settled samples with |I(S_inf)| = m.
  std::vector<double> infected_size_probs() const {
    std::vector<double> p(infected_size_counts.size(), 0.0);
    if (settled == 0) return p;
    for (std::size_t i = 0; i < p.size(); ++i)
      p[i] = static_cast<double>(infected_size_counts[i]) / static_cast<double>(settled);
    return p;
  }

  std::vector<Rational> infected_size_probs_exact() const {
    std::vector<Rational> p(infected_size_counts.size(), Rational(0));
    if (settled == 0) return p;
    for (std::size_t i = 0; i < p.size(); ++i) {
      p[i] = Rational(Integer(static_cast<unsigned long>(infected_size_counts[i])),
                      Integer(static_cast<unsigned long>(settled)));
      p[i].canonicalize();
    }
    return p;
  }

  void merge(const EmpiricalLaw& o) {
    samples += o.samples;
    settled += o.settled;
    unsettled += o.unsettled;
    unclassified += o.unclassified;
    for (std::size_t i = 0; i < infected_size_counts.size(); ++i) infected_size_counts[i] += o.infected_size_counts[i];
    for (const auto& [k, v] : o.infected_set_counts) infected_set_counts[k] += v;
    for (const auto& [k, v] : o.action_class_counts) action_class_counts[k] += v;
    for (std::size_t i = 0; i < first_hits.counts.size(); ++i) first_hits.counts[i] += o.first_hits.counts[i];
    first_hits.missing += o.first_hits.missing;
  }
};

struct MonteCarloOptions {
  unsigned threads = 1;
  double class_tolerance = 1e-9;  // float mode only; rational mode classifies exactly
};

namespace detail {

template <Scalar S>
EmpiricalLaw empty_law(int n) {
  EmpiricalLaw law;
  law.n = n;
  law.infected_size_counts.assign(static_cast<std::size_t>(n), 0);
  law.first_hits.counts.assign(static_cast<std::size_t>(n), 0);
  return law;
}

template <Scalar S>
void tally(EmpiricalLaw& law, const Trajectory<S>& tr, const ModelConfig<S>& cfg, double tolerance) {
  ++law.samples;
  if (tr.n1) {
    ++law.first_hits.counts[static_cast<std::size_t>(tr.n1->size())];
  } else {
    ++law.first_hits.missing;
  }
  if (!tr.settled()) {
    ++law.unsettled;
    return;
  }
  ++law.settled;
  const AgentSet fin = tr.final_state.infected;
  ++law.infected_size_counts[static_cast<std::size_t>(fin.size() - 1)];
  ++law.infected_set_counts[fin];
  auto tau = cfg.uniform_tau();
  std::optional<ActionProfileClass> cls;
  if (tr.limit && tau)
    cls = classify_action_profile(tr.limit->actions, fin, cfg.n, *tau, is_exact_v<S> ? 0.0 : tolerance);
  if (cls) {
    ++law.action_class_counts[*cls];
  } else {
    ++law.unclassified;
  }
}

}  // namespace detail

/// Aggregates SVSP samples over streams 0..samples-1 of `seed`. Each stream
/// is independent, so the result does not depend on the thread count.
template <Scalar S>
EmpiricalLaw monte_carlo(const ModelConfig<S>& cfg, std::uint64_t samples, std::uint64_t seed, long max_epochs,
                         MonteCarloOptions opt = {}) {
  if (samples == 0) throw ValidationError("samples must be at least 1");
  const unsigned workers = std::max(1u, std::min<unsigned>(opt.threads, static_cast<unsigned>(std::min<std::uint64_t>(samples, 1024))));
  std::vector<EmpiricalLaw> partial(workers, detail::empty_law<S>(cfg.n));
  auto work = [&](unsigned w) {
    const RunOptions run{StopRule::settled, false, true};
    for (std::uint64_t s = w; s < samples; s += workers) {
      auto tr = run_svsp_sample(cfg, seed, s, max_epochs, run);
      detail::tally(partial[w], tr, cfg, opt.class_tolerance);
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }
  EmpiricalLaw law = detail::empty_law<S>(cfg.n);
  for (const auto& p : partial) law.merge(p);
  return law;
}

}  // namespace vsp
