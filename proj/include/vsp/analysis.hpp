#pragma once

// Comparison of finite-horizon or sampled laws with the closed forms, and
// the table rows built from them.

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "vsp/config.hpp"
#include "vsp/dynamics.hpp"
#include "vsp/enumeration.hpp"
#include "vsp/errors.hpp"
#include "vsp/theory.hpp"

namespace vsp {

/// Half the L1 distance between two probability vectors.
inline Rational tv_distance(const std::vector<Rational>& p, const std::vector<Rational>& q) {
  if (p.size() != q.size()) throw ValidationError("tv_distance needs vectors of equal length");
  Rational s = 0;
  for (std::size_t i = 0; i < p.size(); ++i) s += abs(p[i] - q[i]);
  s /= 2;
  return s;
}

inline double tv_distance(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw ValidationError("tv_distance needs vectors of equal length");
  double s = 0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return s / 2;
}

inline std::vector<double> to_doubles(const std::vector<Rational>& v) {
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& x : v) out.push_back(to_double(x));
  return out;
}

/// Pearson goodness of fit of observed counts against a law. Cells with zero
/// expected mass contribute nothing when empty and make the fit impossible
/// (statistic +inf, p-value 0) otherwise.
struct ChiSquare {
  double statistic = 0;
  long dof = 0;
  double p_value = 1;
};

inline ChiSquare chi_square(const std::vector<std::uint64_t>& counts, const std::vector<Rational>& law) {
  if (counts.size() != law.size()) throw ValidationError("chi_square needs vectors of equal length");
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  ChiSquare out;
  if (total == 0) return out;
  long cells = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double expected = to_double(law[i]) * static_cast<double>(total);
    if (law[i] == 0) {
      if (counts[i] != 0) {
        out.statistic = std::numeric_limits<double>::infinity();
        out.p_value = 0;
      }
      continue;
    }
    ++cells;
    const double d = static_cast<double>(counts[i]) - expected;
    out.statistic += d * d / expected;
  }
  out.dof = cells - 1;
  if (std::isinf(out.statistic)) return out;
  if (out.dof <= 0) {
    out.p_value = 1;
    return out;
  }
  boost::math::chi_squared dist(static_cast<double>(out.dof));
  out.p_value = boost::math::cdf(boost::math::complement(dist, out.statistic));
  return out;
}

enum class Method { enumerate, monte_carlo };

inline std::string to_string(Method m) { return m == Method::enumerate ? "enumerate" : "monte_carlo"; }

inline Method parse_method(std::string_view s) {
  if (s == "enumerate") return Method::enumerate;
  if (s == "monte_carlo" || s == "monte-carlo" || s == "mc") return Method::monte_carlo;
  throw ValidationError("method must be \"enumerate\" or \"monte_carlo\"");
}

struct GridPoint {
  Rational a;
  Rational tau;
  long horizon = 10;  // table horizon; Monte Carlo rows run to settlement instead
};

struct TableOptions {
  Method method = Method::enumerate;
  EnumerationOptions enumeration;
  std::uint64_t samples = 10000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct ComparisonRow {
  int n = 0;
  Rational a, tau;
  long horizon = 0;
  Method method = Method::enumerate;
  std::string regime;                             // tag, or "uncovered"
  std::optional<std::vector<Rational>> theoretical;  // empty when uncovered
  std::vector<Rational> empirical;
  std::optional<Rational> tv;                      // needs both columns
  std::optional<ChiSquare> chi2;                   // Monte Carlo rows with a theoretical column
  std::uint64_t samples = 0;                       // Monte Carlo only
  std::uint64_t unsettled = 0;                     // Monte Carlo only
  std::optional<std::string> error;                // row failed; the other fields are partial

  bool uncovered() const { return regime == regime_tag(Regime::uncovered); }
};

/// One row: theory column (or "uncovered"), empirical column, distances.
/// Failures are captured in `error` instead of propagating.
inline ComparisonRow comparison_row(int n, const GridPoint& g, const TableOptions& opt) {
  ComparisonRow row;
  row.n = n;
  row.a = g.a;
  row.tau = g.tau;
  row.horizon = g.horizon;
  row.method = opt.method;
  try {
    const Regime regime = classify_regime(n, g.a, g.tau);
    row.regime = regime_tag(regime);
    if (regime != Regime::uncovered) row.theoretical = infected_law(n, g.a, g.tau).size_law();

    const auto cfg = homogeneous_config<Rational>(n, g.a, g.tau);
    if (opt.method == Method::enumerate) {
      EnumerationOptions eo = opt.enumeration;
      eo.threads = std::max(eo.threads, opt.threads);
      row.empirical = marginal_infected_size(enumerate_horizon(cfg, g.horizon, eo), n);
    } else {
      // Laws are tallied over settled samples only, so a short cap would
      // bias them; sample the limit and report the cap as the horizon.
      const long cap = default_max_epochs(n);
      row.horizon = cap;
      const EmpiricalLaw law = monte_carlo(cfg, opt.samples, opt.seed, cap, {opt.threads, 0.0});
      row.empirical = law.infected_size_probs_exact();
      row.samples = law.samples;
      row.unsettled = law.unsettled;
      if (row.theoretical && law.settled > 0) row.chi2 = chi_square(law.infected_size_counts, *row.theoretical);
    }
    if (row.theoretical) row.tv = tv_distance(row.empirical, *row.theoretical);
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  return row;
}

/// Rows in grid order.
inline std::vector<ComparisonRow> build_table(const std::vector<GridPoint>& grid, int n, const TableOptions& opt = {}) {
  std::vector<ComparisonRow> rows;
  rows.reserve(grid.size());
  for (const auto& g : grid) rows.push_back(comparison_row(n, g, opt));
  return rows;
}

struct TvPoint {
  long horizon = 0;
  Rational tv;
};

/// (horizon, tv) for horizons 1..max_horizon of the exact enumeration
/// against the closed form. Throws on uncovered parameters.
inline std::vector<TvPoint> tv_series(int n, const Rational& a, const Rational& tau, long max_horizon,
                                      const EnumerationOptions& opt = {}) {
  const auto theory = infected_law(n, a, tau).size_law();
  const auto cfg = homogeneous_config<Rational>(n, a, tau);
  std::vector<TvPoint> out;
  StateDistribution d = point_mass(initial_state(cfg));
  for (long h = 1; h <= max_horizon; ++h) {
    if (h > 1) d = advance(d, cfg, opt);
    out.push_back({h, tv_distance(marginal_infected_size(d, n), theory)});
  }
  return out;
}

}  // namespace vsp
