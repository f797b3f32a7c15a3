#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "vsp/agent_set.hpp"
#include "vsp/errors.hpp"
#include "vsp/numeric.hpp"

namespace vsp {

/// Strictly increasing f : [0,1] -> [0,1] with f(x) > 0 for x > 0. Only the
/// utility report depends on it; best responses do not.
class UtilityCurve {
 public:
  enum class Kind { identity, square_root, polynomial };

  static UtilityCurve identity() { return UtilityCurve(Kind::identity, Rational(1)); }
  static UtilityCurve square_root() { return UtilityCurve(Kind::square_root, Rational(1, 2)); }
  static UtilityCurve polynomial(const Rational& exponent) {
    if (exponent <= 0) throw ValidationError("utility exponent must be positive");
    return UtilityCurve(Kind::polynomial, exponent);
  }

  Kind kind() const { return kind_; }
  const Rational& exponent() const { return exponent_; }

  double operator()(double x) const {
    switch (kind_) {
      case Kind::identity: return x;
      case Kind::square_root: return std::sqrt(x);
      case Kind::polynomial: return std::pow(x, to_double(exponent_));
    }
    return x;
  }

  std::string name() const {
    switch (kind_) {
      case Kind::identity: return "identity";
      case Kind::square_root: return "sqrt";
      case Kind::polynomial: return "poly(" + to_string(exponent_) + ")";
    }
    return "identity";
  }

 private:
  UtilityCurve(Kind k, Rational e) : kind_(k), exponent_(std::move(e)) {}
  Kind kind_;
  Rational exponent_;
};

/// Scalar-valued homogeneous parameters: common a and tau, complete graph,
/// agent 1 initially infected.
struct HomogeneousParams {
  int n = 0;
  Rational a;
  Rational tau;
};

template <Scalar S>
struct ModelConfig {
  int n = 0;
  std::vector<S> weights;  // row-major n x n, diagonal unused
  std::vector<S> tau;
  UtilityCurve curve = UtilityCurve::identity();
  std::vector<S> initial_actions;
  AgentSet initial_infected = AgentSet::single(0);
  /// Common off-diagonal weight, cached by finalize(); enables O(n) exposure.
  std::optional<S> common_weight;

  const S& weight(int i, int j) const { return weights[static_cast<std::size_t>(i * n + j)]; }

  /// Common off-diagonal weight, when every pair interacts equally.
  std::optional<S> uniform_weight() const {
    if (n < 2) return std::nullopt;
    const S& w = weight(0, 1);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j && weight(i, j) != w) return std::nullopt;
    return w;
  }

  std::optional<S> uniform_tau() const {
    for (const S& t : tau)
      if (t != tau.front()) return std::nullopt;
    return tau.front();
  }

  void validate() const {
    if (n < 2) throw ValidationError("population size n must be at least 2");
    if (n > max_agents) throw ValidationError("population size n must be at most " + std::to_string(max_agents));
    const auto nn = static_cast<std::size_t>(n);
    if (weights.size() != nn * nn) throw ValidationError("interaction matrix must be n x n");
    if (tau.size() != nn) throw ValidationError("tau must have n entries");
    if (initial_actions.size() != nn) throw ValidationError("initial actions must have n entries");
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        const S& w = weight(i, j);
        if (w < 0 || w > 1) throw ValidationError("interaction weights must lie in [0,1]");
        if (w != weight(j, i)) throw ValidationError("interaction matrix must be symmetric");
      }
    }
    for (const S& t : tau)
      if (!(t > 0 && t < 1)) throw ValidationError("immunity tau must lie strictly between 0 and 1");
    for (const S& a : initial_actions)
      if (a < 0 || a > 1) throw ValidationError("initial actions must lie in [0,1]");
    if (initial_infected.empty()) throw ValidationError("initial infected set must be non-empty");
    if (!AgentSet::first_n(n).includes(initial_infected))
      throw ValidationError("initial infected agent out of range");
  }

  /// Validates and caches derived data. Call after editing fields.
  void finalize() {
    validate();
    common_weight = uniform_weight();
  }

  /// The homogeneous preset this config instantiates, if any.
  std::optional<HomogeneousParams> homogeneous() const
    requires is_exact_v<S>
  {
    auto w = uniform_weight();
    auto t = uniform_tau();
    if (!w || *w <= 0 || !t || initial_infected != AgentSet::single(0)) return std::nullopt;
    for (const S& a : initial_actions)
      if (a != initial_actions.front()) return std::nullopt;
    return HomogeneousParams{n, initial_actions.front(), *t};
  }
};

/// g = 1 on every pair, common a and tau, I(S0) = {1}.
template <Scalar S>
ModelConfig<S> homogeneous_config(int n, const Rational& a, const Rational& tau,
                                  UtilityCurve curve = UtilityCurve::identity()) {
  if (n < 2 || n > max_agents) throw ValidationError("population size n must lie in [2, 64]");
  ModelConfig<S> cfg;
  cfg.n = n;
  const auto nn = static_cast<std::size_t>(n);
  cfg.weights.assign(nn * nn, scalar_traits<S>::from_rational(Rational(1)));
  for (std::size_t i = 0; i < nn; ++i) cfg.weights[i * nn + i] = scalar_traits<S>::from_rational(Rational(0));
  cfg.tau.assign(nn, scalar_traits<S>::from_rational(tau));
  cfg.initial_actions.assign(nn, scalar_traits<S>::from_rational(a));
  cfg.curve = std::move(curve);
  cfg.initial_infected = AgentSet::single(0);
  cfg.finalize();
  return cfg;
}

template <Scalar S>
ModelConfig<S> homogeneous_config(const HomogeneousParams& p) {
  return homogeneous_config<S>(p.n, p.a, p.tau);
}

/// Re-expresses an exact config in another scalar type.
template <Scalar To>
ModelConfig<To> convert(const ModelConfig<Rational>& from) {
  ModelConfig<To> to;
  to.n = from.n;
  to.curve = from.curve;
  to.initial_infected = from.initial_infected;
  auto conv = [](const std::vector<Rational>& v) {
    std::vector<To> out;
    out.reserve(v.size());
    for (const Rational& q : v) out.push_back(scalar_traits<To>::from_rational(q));
    return out;
  };
  to.weights = conv(from.weights);
  to.tau = conv(from.tau);
  to.initial_actions = conv(from.initial_actions);
  to.finalize();
  return to;
}

}  // namespace vsp
