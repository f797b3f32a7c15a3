#pragma once

// Closed-form limiting laws of the infected set and the action profile for
// the homogeneous setting (complete graph, common a and tau, I(S0) = {1}).
// Everything is evaluated over exact rationals.

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vsp/agent_set.hpp"
#include "vsp/config.hpp"
#include "vsp/errors.hpp"
#include "vsp/numeric.hpp"

namespace vsp {

enum class Regime {
  zero_action,   // a = 0, any tau
  full_action,   // a = 1, any tau
  low_action,    // 0 < a <= tau < 1, tau >= 1/(n-1)
  high_action,   // 1/(n-1) <= tau < a < 1
  low_immunity,  // tau <= a/(n-1), tau < a < 1
  uncovered,
};

/// Short tag used in reports: T1, T3, T4, T5, T9 or "uncovered".
inline std::string regime_tag(Regime r) {
  switch (r) {
    case Regime::zero_action: return "T1";
    case Regime::full_action: return "T3";
    case Regime::low_action: return "T4";
    case Regime::high_action: return "T5";
    case Regime::low_immunity: return "T9";
    case Regime::uncovered: return "uncovered";
  }
  return "uncovered";
}

struct RegimeThresholds {
  std::optional<long> alpha, beta;
  std::optional<long> hat_alpha, hat_beta;
  std::optional<long> tilde_alpha, bar_alpha, tilde_beta, bar_beta;
};

namespace detail {

inline long to_long(const Integer& z) {
  if (!z.fits_slong_p()) throw DomainError("threshold does not fit in a long");
  return z.get_si();
}

inline void check_params(int n, const Rational& a, const Rational& tau) {
  if (n < 2) throw ValidationError("n must be at least 2");
  if (a < 0 || a > 1) throw ValidationError("a must lie in [0,1]");
  if (tau <= 0 || tau >= 1) throw ValidationError("tau must lie strictly between 0 and 1");
}

}  // namespace detail

/// Integer cut-offs that bound the support of the limit laws. alpha and
/// beta are always reported; the hat family needs 0 < a <= tau, the tilde
/// and bar families need tau < a < 1.
inline RegimeThresholds thresholds(int n, const Rational& a, const Rational& tau) {
  detail::check_params(n, a, tau);
  RegimeThresholds t;
  const Rational nm1(n - 1);
  const long capped_floor = detail::to_long(floor(Rational(nm1 * tau))) + 1;

  t.alpha = std::min<long>(detail::to_long(ceil(Rational(1 / tau))), n);
  t.beta = std::min<long>(capped_floor, *t.alpha + 1);

  if (a > 0 && a <= tau && a < 1) {
    Rational x = (1 / tau - nm1 * a) / (1 - a);
    t.hat_alpha = std::max<long>(1, detail::to_long(ceil(x)));
    t.hat_beta = std::min<long>(capped_floor, *t.hat_alpha + 1);
  }
  if (tau < a && a < 1) {
    Rational x = (1 - nm1 * a * tau) / (tau * (1 - a));
    t.tilde_alpha = std::max<long>(1, detail::to_long(ceil(x)));
    Rational y = nm1 * a * tau / (a - tau * (1 - a));
    t.bar_alpha = detail::to_long(floor(y)) + 1;
    t.tilde_beta = std::min<long>(capped_floor, *t.tilde_alpha + 1);
    t.bar_beta = std::min<long>(capped_floor, *t.bar_alpha);
  }
  return t;
}

/// Stirling number of the second kind S(p, q).
inline Integer stirling2(unsigned p, unsigned q) {
  if (q > p) return 0;
  // row[k] = S(i, k), built up from S(0, 0) = 1.
  std::vector<Integer> row(q + 1, Integer(0));
  row[0] = 1;
  for (unsigned i = 1; i <= p; ++i) {
    for (unsigned k = std::min(i, q); k >= 1; --k) row[k] = Integer(k) * row[k] + row[k - 1];
    row[0] = 0;
  }
  return row[q];
}

namespace detail {

inline Integer factorial(long k) {
  Integer r;
  mpz_fac_ui(r.get_mpz_t(), static_cast<unsigned long>(k));
  return r;
}

inline void check_eta_args(long tilde_alpha, long bar_alpha, int n) {
  if (bar_alpha < 2 || bar_alpha >= tilde_alpha + 1)
    throw DomainError("eta needs 2 <= bar_alpha < tilde_alpha + 1");
  if (tilde_alpha - 1 >= n - 1)
    throw DomainError("eta needs tilde_alpha <= n - 1 (the Stirling series diverges otherwise)");
}

}  // namespace detail

/// eta(tilde_alpha, bar_alpha, n) exactly. The inner Stirling series
/// sum_{p >= w} S(p, w) x^p is summed with its generating function
/// x^w / prod_{k=1..w} (1 - k x) at x = 1/n.
inline Rational eta(long tilde_alpha, long bar_alpha, int n) {
  detail::check_eta_args(tilde_alpha, bar_alpha, n);
  const Rational x(1, n);
  Rational sum = 0;
  for (long w = bar_alpha - 1; w <= tilde_alpha - 1; ++w) {
    Rational series = 1;
    for (long k = 1; k <= w; ++k) series *= x / (1 - Rational(k) * x);
    sum += series / Rational(detail::factorial(n - w - 2));
  }
  Rational result = Rational(detail::factorial(n - 1)) / Rational(Integer(n) * n * n) * sum;
  result.canonicalize();
  return result;
}

/// eta by direct summation of the Stirling series in double precision,
/// stopping once a geometric bound on the tail drops below 1e-17 of the
/// running total. Terms S(p, w)/n^p come from the normalised recurrence
/// T(p, q) = (q/n) T(p-1, q) + (1/n) T(p-1, q-1).
inline double eta_series(long tilde_alpha, long bar_alpha, int n) {
  detail::check_eta_args(tilde_alpha, bar_alpha, n);
  const long double inv_n = 1.0L / n;
  const auto top = static_cast<std::size_t>(tilde_alpha - 1);
  // row[q] = S(p, q) / n^p for the current p; sum[q] accumulates over p.
  std::vector<long double> row(top + 1, 0.0L), sum(top + 1, 0.0L);
  row[0] = 1.0L;
  for (long p = 1; p < 1'000'000; ++p) {
    bool converged = p > static_cast<long>(top);
    for (std::size_t q = top; q >= 1; --q) {
      long double next = static_cast<long double>(q) * inv_n * row[q] + inv_n * row[q - 1];
      sum[q] += next;
      if (static_cast<std::size_t>(p) > q) {
        // Term ratios decrease towards q/n, so the current one bounds the tail.
        long double ratio = next / row[q];
        long double tail = ratio < 1.0L ? next * ratio / (1.0L - ratio) : INFINITY;
        if (!(tail < 1e-17L * sum[q])) converged = false;
      }
      row[q] = next;
    }
    row[0] = 0.0L;
    if (converged) break;
  }
  long double total = 0.0L;
  for (long w = bar_alpha - 1; w <= tilde_alpha - 1; ++w)
    total += sum[static_cast<std::size_t>(w)] / detail::factorial(n - w - 2).get_d();
  long double scale = detail::factorial(n - 1).get_d() / (static_cast<long double>(n) * n * n);
  return static_cast<double>(scale * total);
}

struct EtaEvaluation {
  Rational exact;
  double series = 0.0;
  double relative_gap = 0.0;
};

/// Closed form plus the series self-check; throws if they disagree beyond
/// 1e-15 relative.
inline EtaEvaluation eta_checked(long tilde_alpha, long bar_alpha, int n) {
  EtaEvaluation e;
  e.exact = eta(tilde_alpha, bar_alpha, n);
  e.series = eta_series(tilde_alpha, bar_alpha, n);
  double exact = to_double(e.exact);
  e.relative_gap = exact == 0.0 ? std::abs(e.series) : std::abs(e.series - exact) / std::abs(exact);
  if (e.relative_gap > 1e-15) throw std::logic_error("eta: series and closed form disagree");
  return e;
}

/// Which closed form covers (n, a, tau). Band edges are included exactly
/// as in the regime conditions; a = 0 always maps to zero_action.
inline Regime classify_regime(int n, const Rational& a, const Rational& tau) {
  detail::check_params(n, a, tau);
  const Rational inv_nm1(1, n - 1);
  if (a == 0) return Regime::zero_action;
  if (a == 1) return Regime::full_action;
  if (a <= tau && tau >= inv_nm1) return Regime::low_action;
  if (tau < a && tau >= inv_nm1) return Regime::high_action;
  if (tau < a && tau <= a / Rational(n - 1)) return Regime::low_immunity;
  return Regime::uncovered;
}

/// Common limit action of the uninfected agents when |I(S_inf)| = m:
/// tau m / ((1 + tau) m - tau (n - 1)) if (n - 1) tau < m, else 1.
inline Rational predict_action_limit(long m, int n, const Rational& tau) {
  if (m < 1 || m > n) throw ValidationError("infected-set size must lie in [1, n]");
  const Rational mm(m);
  if (Rational(n - 1) * tau >= mm) return Rational(1);
  Rational g = tau * mm / ((1 + tau) * mm - tau * Rational(n - 1));
  g.canonicalize();
  return g;
}

/// All-ones profile, or a member of A_m: agent 1 and m-1 others at 1, the
/// rest at the common off value.
struct ActionProfileClass {
  bool all_ones = true;
  long m = 0;
  Rational off_value = 1;

  static ActionProfileClass ones() { return {}; }
  static ActionProfileClass a_class(long m, int n, const Rational& tau) {
    if (m == n) return ones();
    if (Rational(n - 1) * tau >= Rational(m))
      throw DomainError("A_m needs m > (n-1) tau");
    return ActionProfileClass{false, m, predict_action_limit(m, n, tau)};
  }

  std::string name() const { return all_ones ? std::string("ones") : "A" + std::to_string(m); }
  bool operator==(const ActionProfileClass& o) const {
    return all_ones == o.all_ones && (all_ones || (m == o.m && off_value == o.off_value));
  }
  bool operator<(const ActionProfileClass& o) const {
    if (all_ones != o.all_ones) return all_ones;  // ones first
    return m < o.m;
  }
};

/// Sets of size m containing agent 1, all equally likely.
struct SizeAtom {
  long size = 0;
  bool contains_first = true;
  Integer count;      // number of sets in the atom
  Rational total;     // mass of the atom
  Rational per_set;   // mass of each set
};

struct ClassAtom {
  ActionProfileClass cls;
  Integer count;      // |A_m|, or 1 for the all-ones profile
  Rational total;
  Rational per_tuple;
};

struct InfectedLaw {
  int n = 0;
  Regime regime = Regime::uncovered;
  std::vector<SizeAtom> atoms;
  std::vector<std::string> diagnostics;

  /// Index m-1 holds P(|I(S_inf)| = m).
  std::vector<Rational> size_law() const {
    std::vector<Rational> law(static_cast<std::size_t>(n), Rational(0));
    for (const auto& a : atoms) law[static_cast<std::size_t>(a.size - 1)] += a.total;
    return law;
  }

  Rational total() const {
    Rational t = 0;
    for (const auto& a : atoms) t += a.total;
    return t;
  }

  /// Every set with positive mass, with its probability. Small n only.
  std::vector<std::pair<AgentSet, Rational>> expand() const {
    if (n > 12) throw ResourceLimitError("set expansion is limited to n <= 12");
    std::vector<std::pair<AgentSet, Rational>> out;
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
      AgentSet s(mask);
      for (const auto& a : atoms) {
        if (a.size == s.size() && a.contains_first == s.contains(0) && a.per_set != 0) out.emplace_back(s, a.per_set);
      }
    }
    return out;
  }
};

struct ActionLaw {
  int n = 0;
  Regime regime = Regime::uncovered;
  std::vector<ClassAtom> atoms;

  Rational total() const {
    Rational t = 0;
    for (const auto& a : atoms) t += a.total;
    return t;
  }

  Rational mass(const ActionProfileClass& c) const {
    Rational t = 0;
    for (const auto& a : atoms)
      if (a.cls == c) t += a.total;
    return t;
  }
};

namespace detail {

inline Integer binomial(long n, long k) {
  Integer r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return r;
}

inline void add_size(InfectedLaw& law, long m, const Rational& total) {
  if (total == 0) return;
  SizeAtom a;
  a.size = m;
  a.count = binomial(law.n - 1, m - 1);
  a.total = total;
  a.per_set = total / Rational(a.count);
  a.per_set.canonicalize();
  law.atoms.push_back(std::move(a));
}

inline void add_class(ActionLaw& law, const ActionProfileClass& c, const Rational& total) {
  if (total == 0) return;
  ClassAtom a;
  a.cls = c;
  a.count = c.all_ones ? Integer(1) : binomial(law.n - 1, c.m - 1);
  a.total = total;
  a.per_tuple = total / Rational(a.count);
  a.per_tuple.canonicalize();
  law.atoms.push_back(std::move(a));
}

inline Regime covered_regime(int n, const Rational& a, const Rational& tau) {
  Regime r = classify_regime(n, a, tau);
  if (r == Regime::uncovered)
    throw UncoveredRegimeError("no closed form for n=" + std::to_string(n) + ", a=" + to_string(a) +
                               ", tau=" + to_string(tau) + " (a/(n-1) < tau < 1/(n-1))");
  return r;
}

/// Whether the tau-vs-a regime takes the eta branch.
inline bool eta_branch(const RegimeThresholds& t) { return *t.bar_alpha < *t.tilde_alpha + 1; }

}  // namespace detail

/// Limit law of I(S_inf), one atom per (size, contains agent 1).
inline InfectedLaw infected_law(int n, const Rational& a, const Rational& tau) {
  InfectedLaw law;
  law.n = n;
  law.regime = detail::covered_regime(n, a, tau);
  const RegimeThresholds t = thresholds(n, a, tau);
  const Rational inv_n(1, n);
  const Rational inv_nm1(1, n - 1);
  const Rational nn(n);

  // Singleton {1} with the rest spread 1/n per size in [2, top].
  auto spread = [&](long top) {
    detail::add_size(law, 1, 1 - Rational(top - 1) * inv_n);
    for (long m = 2; m <= top; ++m) detail::add_size(law, m, inv_n);
  };
  auto near_full = [&] {
    detail::add_size(law, n - 1, Rational(n - 1) / (nn * nn));
    detail::add_size(law, n, 1 - Rational(n - 1) / (nn * nn));
  };

  switch (law.regime) {
    case Regime::zero_action:
      spread(*t.alpha);
      break;
    case Regime::full_action:
      if (tau >= inv_nm1) {
        detail::add_size(law, 1, Rational(1));
      } else {
        near_full();
      }
      break;
    case Regime::low_action:
      spread(*t.hat_alpha);
      break;
    case Regime::high_action:
      if (!detail::eta_branch(t)) {
        spread(*t.tilde_alpha);
      } else {
        const long ta = *t.tilde_alpha, ba = *t.bar_alpha;
        const Rational e = eta_checked(ta, ba, n).exact;
        detail::add_size(law, 1, 1 - Rational(ta - 1) * inv_n);
        for (long m = 2; m <= ba - 1; ++m) detail::add_size(law, m, inv_n);
        detail::add_size(law, n - 1, e);
        Rational full = Rational(ta - (ba - 1)) * inv_n - e;
        if (full < 0) law.diagnostics.push_back("negative mass on |I| = n: " + to_string(full));
        detail::add_size(law, n, full);
      }
      break;
    case Regime::low_immunity:
      if (tau == a / Rational(n - 1)) {
        detail::add_size(law, n, Rational(1));
      } else {
        near_full();
      }
      break;
    case Regime::uncovered:
      break;
  }
  std::sort(law.atoms.begin(), law.atoms.end(), [](const SizeAtom& x, const SizeAtom& y) { return x.size < y.size; });
  return law;
}

/// Limit law of the action profile over {ones} and the classes A_m.
inline ActionLaw action_law(int n, const Rational& a, const Rational& tau) {
  ActionLaw law;
  law.n = n;
  law.regime = detail::covered_regime(n, a, tau);
  const RegimeThresholds t = thresholds(n, a, tau);
  const Rational inv_n(1, n);
  const Rational inv_nm1(1, n - 1);
  const Rational nn(n);
  auto cls = [&](long m) { return ActionProfileClass::a_class(m, n, tau); };

  // Ones with probability 1 - (top - bottom + 1)/n, A_m for m in [bottom, top].
  auto banded = [&](long bottom, long top) {
    detail::add_class(law, ActionProfileClass::ones(), 1 - Rational(top - bottom + 1) * inv_n);
    for (long m = bottom; m <= top; ++m) detail::add_class(law, cls(m), inv_n);
  };
  auto near_full = [&] {
    detail::add_class(law, ActionProfileClass::ones(), 1 - Rational(n - 1) / (nn * nn));
    detail::add_class(law, cls(n - 1), Rational(n - 1) / (nn * nn));
  };

  switch (law.regime) {
    case Regime::zero_action:
      if (tau >= inv_nm1) {
        banded(*t.beta, *t.alpha);
      } else {
        for (long m = 1; m <= n; ++m) detail::add_class(law, cls(m), inv_n);
      }
      break;
    case Regime::full_action:
      if (tau >= inv_nm1) {
        detail::add_class(law, ActionProfileClass::ones(), Rational(1));
      } else {
        near_full();
      }
      break;
    case Regime::low_action:
      banded(*t.hat_beta, *t.hat_alpha);
      break;
    case Regime::high_action:
      if (!detail::eta_branch(t)) {
        banded(*t.tilde_beta, *t.tilde_alpha);
      } else {
        const long ba = *t.bar_alpha, bb = *t.bar_beta;
        const Rational e = eta_checked(*t.tilde_alpha, ba, n).exact;
        detail::add_class(law, ActionProfileClass::ones(), 1 + Rational(bb - ba) * inv_n - e);
        for (long m = bb; m <= ba - 1; ++m) detail::add_class(law, cls(m), inv_n);
        detail::add_class(law, cls(n - 1), e);
      }
      break;
    case Regime::low_immunity:
      if (tau == a / Rational(n - 1)) {
        detail::add_class(law, ActionProfileClass::ones(), Rational(1));
      } else {
        near_full();
      }
      break;
    case Regime::uncovered:
      break;
  }
  std::sort(law.atoms.begin(), law.atoms.end(), [](const ClassAtom& x, const ClassAtom& y) { return x.cls < y.cls; });
  return law;
}

/// Both laws plus the thresholds, as exported by the theory command.
struct LimitLaws {
  int n = 0;
  Rational a, tau;
  Regime regime = Regime::uncovered;
  RegimeThresholds thresholds;
  InfectedLaw infected;
  ActionLaw actions;
};

inline LimitLaws limit_laws(int n, const Rational& a, const Rational& tau) {
  LimitLaws l;
  l.n = n;
  l.a = a;
  l.tau = tau;
  l.regime = classify_regime(n, a, tau);
  l.thresholds = thresholds(n, a, tau);
  l.infected = infected_law(n, a, tau);
  l.actions = action_law(n, a, tau);
  return l;
}

}  // namespace vsp
