#pragma once

// JSON ingestion of model configs and JSON/CSV rendering of every result
// type. Probabilities are written as exact "p/q" strings plus half-up
// decimals; agents are numbered from 1.

#include <fstream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "vsp/analysis.hpp"
#include "vsp/config.hpp"
#include "vsp/dynamics.hpp"
#include "vsp/enumeration.hpp"
#include "vsp/errors.hpp"
#include "vsp/numeric.hpp"
#include "vsp/theory.hpp"

namespace vsp {

using Json = nlohmann::ordered_json;

/// Config as read from a file; command-line flags overwrite fields before
/// build(). n, a and tau are required by then.
struct ConfigSpec {
  std::optional<int> n;
  std::vector<Rational> a;    // one entry = common value
  std::vector<Rational> tau;  // one entry = common value
  std::optional<std::vector<std::vector<Rational>>> g;  // empty = complete graph
  UtilityCurve curve = UtilityCurve::identity();
  std::vector<int> initial_infected{1};
  Arithmetic arithmetic = Arithmetic::rational;

  /// Exact config; validation errors name the offending field.
  ModelConfig<Rational> build() const {
    if (!n) throw ValidationError("config is missing n");
    const int size = *n;
    if (size < 2 || size > max_agents)
      throw ValidationError("n must lie in [2, " + std::to_string(max_agents) + "]");
    const auto nn = static_cast<std::size_t>(size);
    auto expand = [&](const std::vector<Rational>& v, const char* name) {
      if (v.empty()) throw ValidationError(std::string("config is missing ") + name);
      if (v.size() == 1) return std::vector<Rational>(nn, v.front());
      if (v.size() != nn) throw ValidationError(std::string(name) + " must be a scalar or have n entries");
      return v;
    };
    ModelConfig<Rational> cfg;
    cfg.n = size;
    cfg.initial_actions = expand(a, "a");
    cfg.tau = expand(tau, "tau");
    cfg.curve = curve;
    cfg.weights.assign(nn * nn, Rational(1));
    if (g) {
      if (g->size() != nn) throw ValidationError("g must be an n x n matrix");
      for (std::size_t i = 0; i < nn; ++i) {
        if ((*g)[i].size() != nn) throw ValidationError("g must be an n x n matrix");
        for (std::size_t j = 0; j < nn; ++j) cfg.weights[i * nn + j] = (*g)[i][j];
      }
    }
    for (std::size_t i = 0; i < nn; ++i) cfg.weights[i * nn + i] = 0;
    cfg.initial_infected = AgentSet();
    for (int agent : initial_infected) {
      if (agent < 1 || agent > size) throw ValidationError("initial_infected entry " + std::to_string(agent) + " is outside 1..n");
      cfg.initial_infected.insert(agent - 1);
    }
    cfg.finalize();
    return cfg;
  }
};

namespace detail {

inline Rational json_rational(const Json& v, const std::string& field) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<long>());
  if (v.is_number_float()) return rational_from_double(v.get<double>());
  throw ValidationError("field " + field + " must be a number or a \"p/q\" string");
}

inline std::vector<Rational> json_rationals(const Json& v, const std::string& field) {
  std::vector<Rational> out;
  if (v.is_array()) {
    for (const auto& x : v) out.push_back(json_rational(x, field));
  } else {
    out.push_back(json_rational(v, field));
  }
  return out;
}

inline UtilityCurve json_curve(const Json& v) {
  std::string kind;
  if (v.is_string()) {
    kind = v.get<std::string>();
  } else if (v.is_object() && v.contains("kind") && v["kind"].is_string()) {
    kind = v["kind"].get<std::string>();
  } else {
    throw ValidationError("field f must be a string or an object with \"kind\"");
  }
  if (kind == "identity") return UtilityCurve::identity();
  if (kind == "sqrt") return UtilityCurve::square_root();
  if (kind == "poly") {
    if (!v.is_object() || !v.contains("exponent")) throw ValidationError("f of kind poly needs an exponent");
    return UtilityCurve::polynomial(json_rational(v["exponent"], "f.exponent"));
  }
  throw ValidationError("unknown utility curve \"" + kind + "\"");
}

}  // namespace detail

inline ConfigSpec parse_config(const Json& j) {
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  static const char* known[] = {"n", "a", "tau", "g", "f", "initial_infected", "arithmetic"};
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw ValidationError("unknown config field \"" + key + "\"");
  }
  ConfigSpec c;
  if (j.contains("n")) {
    if (!j["n"].is_number_integer()) throw ValidationError("field n must be an integer");
    c.n = j["n"].get<int>();
  }
  if (j.contains("a")) c.a = detail::json_rationals(j["a"], "a");
  if (j.contains("tau")) c.tau = detail::json_rationals(j["tau"], "tau");
  if (j.contains("g")) {
    const auto& g = j["g"];
    if (g.is_string()) {
      if (g.get<std::string>() != "complete") throw ValidationError("field g must be \"complete\" or a matrix");
    } else if (g.is_array()) {
      std::vector<std::vector<Rational>> rows;
      for (const auto& row : g) {
        if (!row.is_array()) throw ValidationError("field g must be a matrix");
        rows.push_back(detail::json_rationals(row, "g"));
      }
      c.g = std::move(rows);
    } else {
      throw ValidationError("field g must be \"complete\" or a matrix");
    }
  }
  if (j.contains("f")) c.curve = detail::json_curve(j["f"]);
  if (j.contains("initial_infected")) {
    const auto& v = j["initial_infected"];
    if (!v.is_array() || v.empty()) throw ValidationError("initial_infected must be a non-empty array");
    c.initial_infected.clear();
    for (const auto& x : v) {
      if (!x.is_number_integer()) throw ValidationError("initial_infected entries must be integers");
      c.initial_infected.push_back(x.get<int>());
    }
  }
  if (j.contains("arithmetic")) {
    if (!j["arithmetic"].is_string()) throw ValidationError("field arithmetic must be a string");
    c.arithmetic = parse_arithmetic(j["arithmetic"].get<std::string>());
  }
  return c;
}

inline ConfigSpec load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ValidationError("config " + path + " is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

/// Grid file: {"n": 5, "points": [{"a": .., "tau": .., "horizon": ..}, ...]}
/// or a bare array of points. Missing horizons take `default_horizon`.
struct GridSpec {
  std::optional<int> n;
  std::vector<GridPoint> points;
};

inline GridSpec parse_grid(const Json& j, long default_horizon) {
  GridSpec g;
  const Json* points = &j;
  if (j.is_object()) {
    if (j.contains("n")) {
      if (!j["n"].is_number_integer()) throw ValidationError("grid field n must be an integer");
      g.n = j["n"].get<int>();
    }
    if (!j.contains("points")) throw ValidationError("grid object needs a \"points\" array");
    points = &j["points"];
  }
  if (!points->is_array()) throw ValidationError("grid points must be an array");
  for (const auto& p : *points) {
    if (!p.is_object() || !p.contains("a") || !p.contains("tau")) throw ValidationError("grid point needs a and tau");
    GridPoint gp;
    gp.a = detail::json_rational(p["a"], "a");
    gp.tau = detail::json_rational(p["tau"], "tau");
    gp.horizon = default_horizon;
    if (p.contains("horizon")) {
      if (!p["horizon"].is_number_integer()) throw ValidationError("grid horizon must be an integer");
      gp.horizon = p["horizon"].get<long>();
    }
    g.points.push_back(std::move(gp));
  }
  return g;
}

inline GridSpec load_grid(const std::string& path, long default_horizon) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open grid file " + path);
  try {
    return parse_grid(Json::parse(in), default_horizon);
  } catch (const Json::parse_error& e) {
    throw ValidationError("grid " + path + " is not valid JSON: " + e.what());
  }
}

// ---- rendering helpers -------------------------------------------------

template <Scalar S>
std::string scalar_string(const S& x) {
  return scalar_traits<S>::to_string(x);
}

template <Scalar S>
Json scalars_json(const std::vector<S>& v) {
  Json out = Json::array();
  for (const auto& x : v) out.push_back(scalar_string(x));
  return out;
}

inline Json set_json(AgentSet s) {
  Json out = Json::array();
  for (int a : s.external()) out.push_back(a);
  return out;
}

inline Json prob_json(const Rational& p, int precision) {
  return Json{{"exact", to_string(p)}, {"decimal", to_decimal(p, precision)}};
}

inline Json law_vector_json(const std::vector<Rational>& law, int precision) {
  Json exact = Json::array(), dec = Json::array();
  for (const auto& p : law) {
    exact.push_back(to_string(p));
    dec.push_back(to_decimal(p, precision));
  }
  return Json{{"exact", exact}, {"decimal", dec}};
}

inline std::string decimal_row(const std::vector<Rational>& law, int precision) {
  std::string s;
  for (std::size_t i = 0; i < law.size(); ++i) {
    if (i) s += ",";
    s += to_decimal(law[i], precision);
  }
  return s;
}

inline std::string exact_row(const std::vector<Rational>& law) {
  std::string s;
  for (std::size_t i = 0; i < law.size(); ++i) {
    if (i) s += ",";
    s += to_string(law[i]);
  }
  return s;
}

/// Two-line CSV of a size law: header p1..pn, a decimal row and an exact row.
inline std::string size_law_csv(const std::vector<Rational>& law, int precision) {
  std::string s = "kind";
  for (std::size_t i = 1; i <= law.size(); ++i) s += ",p" + std::to_string(i);
  s += "\ndecimal," + decimal_row(law, precision) + "\nexact," + exact_row(law) + "\n";
  return s;
}

template <Scalar S>
Json state_json(const State<S>& s) {
  return Json{{"infected", set_json(s.infected)}, {"actions", scalars_json(s.actions)}};
}

inline Json params_json(const ModelConfig<Rational>& cfg, Arithmetic arithmetic) {
  Json j;
  j["n"] = cfg.n;
  if (auto h = cfg.homogeneous()) {
    j["a"] = to_string(h->a);
    j["tau"] = to_string(h->tau);
    j["g"] = "complete";
  } else {
    j["a"] = scalars_json(cfg.initial_actions);
    j["tau"] = scalars_json(cfg.tau);
    if (cfg.common_weight) {
      j["g"] = "uniform:" + to_string(*cfg.common_weight);
    } else {
      Json g = Json::array();
      for (int i = 0; i < cfg.n; ++i) {
        Json row = Json::array();
        for (int k = 0; k < cfg.n; ++k) row.push_back(to_string(cfg.weight(i, k)));
        g.push_back(row);
      }
      j["g"] = g;
    }
  }
  j["f"] = cfg.curve.name();
  j["initial_infected"] = set_json(cfg.initial_infected);
  j["arithmetic"] = to_string(arithmetic);
  return j;
}

inline Json optional_long(const std::optional<long>& v) { return v ? Json(*v) : Json(nullptr); }

// ---- trajectories ------------------------------------------------------

/// JSON lines: an "initial" snapshot, one "epoch" line per record, and a
/// closing "summary" line.
template <Scalar S>
std::string trajectory_jsonl(const Trajectory<S>& tr) {
  std::string out;
  Json init{{"type", "initial"}, {"epoch", 0}};
  init.update(state_json(tr.initial));
  out += init.dump() + "\n";
  for (const auto& r : tr.records) {
    Json line{{"type", "epoch"}, {"epoch", r.epoch}, {"chosen", r.chosen + 1},
              {"newly_infected", set_json(r.newly_infected)}};
    line.update(state_json(r.next));
    out += line.dump() + "\n";
  }
  Json first_hit = Json::array();
  for (const auto& h : tr.first_hit) first_hit.push_back(optional_long(h));
  Json summary{{"type", "summary"},
               {"epochs", tr.epochs},
               {"absorbed", tr.absorbed},
               {"absorbed_at", optional_long(tr.absorbed_at)},
               {"settled_at", optional_long(tr.settled_at)},
               {"final", state_json(tr.final_state)},
               {"first_hit", first_hit},
               {"n1", tr.n1 ? set_json(*tr.n1) : Json(nullptr)},
               {"limit", tr.limit ? state_json(*tr.limit) : Json(nullptr)}};
  out += summary.dump() + "\n";
  return out;
}

template <Scalar S>
std::string trajectory_csv(const Trajectory<S>& tr) {
  auto join = [](const std::vector<std::string>& parts, char sep) {
    std::string s;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (i) s += sep;
      s += parts[i];
    }
    return s;
  };
  auto set_str = [&](AgentSet s) {
    std::vector<std::string> p;
    for (int a : s.external()) p.push_back(std::to_string(a));
    return join(p, ' ');
  };
  auto actions_str = [&](const std::vector<S>& v) {
    std::vector<std::string> p;
    for (const auto& x : v) p.push_back(scalar_string(x));
    return join(p, ' ');
  };
  std::string out = "epoch,chosen,newly_infected,infected,actions\n";
  out += "initial,,," + set_str(tr.initial.infected) + "," + actions_str(tr.initial.actions) + "\n";
  for (const auto& r : tr.records)
    out += std::to_string(r.epoch) + "," + std::to_string(r.chosen + 1) + "," + set_str(r.newly_infected) + "," +
           set_str(r.next.infected) + "," + actions_str(r.next.actions) + "\n";
  return out;
}

// ---- Monte Carlo -------------------------------------------------------

inline Json empirical_law_json(const EmpiricalLaw& law, int precision) {
  Json sizes = Json::array();
  const auto probs = law.infected_size_probs_exact();
  for (int m = 1; m <= law.n; ++m) {
    const auto idx = static_cast<std::size_t>(m - 1);
    Json e{{"size", m}, {"count", law.infected_size_counts[idx]}};
    e.update(prob_json(probs[idx], precision));
    sizes.push_back(e);
  }
  Json sets = Json::array();
  for (const auto& [s, c] : law.infected_set_counts) sets.push_back(Json{{"set", set_json(s)}, {"count", c}});
  Json classes = Json::array();
  for (const auto& [cls, c] : law.action_class_counts) {
    Json e{{"class", cls.name()}, {"m", cls.all_ones ? Json(law.n) : Json(cls.m)}, {"off_value", to_string(cls.off_value)},
           {"count", c}};
    classes.push_back(e);
  }
  Json fh_counts = Json::array(), fh_freq = Json::array();
  for (auto c : law.first_hits.counts) fh_counts.push_back(c);
  for (double f : law.first_hits.frequencies()) fh_freq.push_back(to_decimal(f, precision));
  return Json{{"samples", law.samples},
              {"settled", law.settled},
              {"unsettled", law.unsettled},
              {"unclassified", law.unclassified},
              {"infected_size", sizes},
              {"infected_sets", sets},
              {"action_classes", classes},
              {"n1_size", Json{{"counts", fh_counts}, {"missing", law.first_hits.missing}, {"frequencies", fh_freq}}}};
}

// ---- enumeration -------------------------------------------------------

inline Json distribution_json(const StateDistribution& d, const ModelConfig<Rational>& cfg, int precision,
                              bool include_states) {
  Json j;
  j["transitions"] = d.epoch;
  j["support_size"] = d.support.size();
  j["total"] = to_string(d.total());
  j["absorbed_mass"] = prob_json(absorbed_mass(d, cfg), precision);
  j["settled_mass"] = prob_json(settled_mass(d, cfg), precision);
  j["size_law"] = law_vector_json(marginal_infected_size(d, cfg.n), precision);
  if (include_states) {
    Json states = Json::array();
    for (const auto& e : d.support) {
      Json s{{"infected_mask", e.state.infected.mask()}};
      s.update(state_json(e.state));
      s["prob"] = to_string(e.prob);
      states.push_back(s);
    }
    j["states"] = states;
  }
  return j;
}

// ---- theory ------------------------------------------------------------

inline Json thresholds_json(const RegimeThresholds& t) {
  return Json{{"alpha", optional_long(t.alpha)},           {"beta", optional_long(t.beta)},
              {"hat_alpha", optional_long(t.hat_alpha)},   {"hat_beta", optional_long(t.hat_beta)},
              {"tilde_alpha", optional_long(t.tilde_alpha)}, {"bar_alpha", optional_long(t.bar_alpha)},
              {"tilde_beta", optional_long(t.tilde_beta)}, {"bar_beta", optional_long(t.bar_beta)}};
}

inline Json limit_laws_json(const LimitLaws& l, int precision) {
  Json j;
  j["regime"] = regime_tag(l.regime);
  j["thresholds"] = thresholds_json(l.thresholds);
  j["size_law"] = law_vector_json(l.infected.size_law(), precision);
  Json atoms = Json::array();
  for (const auto& a : l.infected.atoms)
    atoms.push_back(Json{{"size", a.size},
                         {"contains_agent_1", a.contains_first},
                         {"sets", a.count.get_str()},
                         {"per_set", to_string(a.per_set)},
                         {"prob", to_string(a.total)}});
  j["infected_sets"] = atoms;
  Json actions = Json::array();
  for (const auto& a : l.actions.atoms)
    actions.push_back(Json{{"class", a.cls.name()},
                           {"m", a.cls.all_ones ? l.n : a.cls.m},
                           {"off_value", to_string(a.cls.off_value)},
                           {"tuples", a.count.get_str()},
                           {"per_tuple", to_string(a.per_tuple)},
                           {"prob", to_string(a.total)},
                           {"decimal", to_decimal(a.total, precision)}});
  j["action_law"] = actions;
  j["total"] = {{"infected", to_string(l.infected.total())}, {"actions", to_string(l.actions.total())}};
  j["diagnostics"] = l.infected.diagnostics;
  return j;
}

// ---- comparison tables -------------------------------------------------

inline Json comparison_row_json(const ComparisonRow& r, int precision) {
  Json j;
  j["a"] = to_string(r.a);
  j["tau"] = to_string(r.tau);
  j["horizon"] = r.horizon;
  j["method"] = to_string(r.method);
  j["regime"] = r.regime.empty() ? Json(nullptr) : Json(r.regime);
  j["theoretical"] = r.theoretical ? law_vector_json(*r.theoretical, precision) : Json("uncovered");
  j["empirical"] = r.empirical.empty() ? Json(nullptr) : law_vector_json(r.empirical, precision);
  j["tv"] = r.tv ? prob_json(*r.tv, precision) : Json(nullptr);
  if (r.method == Method::monte_carlo) {
    j["samples"] = r.samples;
    j["unsettled"] = r.unsettled;
    j["chi2"] = r.chi2 ? Json{{"statistic", std::isinf(r.chi2->statistic) ? Json("inf") : Json(to_decimal(r.chi2->statistic, 6))},
                             {"dof", r.chi2->dof},
                             {"p_value", to_decimal(r.chi2->p_value, 6)}}
                       : Json(nullptr);
  }
  j["error"] = r.error ? Json(*r.error) : Json(nullptr);
  return j;
}

inline std::string comparison_csv(const std::vector<ComparisonRow>& rows, int precision) {
  auto vec = [&](const std::vector<Rational>& v) { return "\"(" + decimal_row(v, precision) + ")\""; };
  auto quote = [](std::string s) {
    std::string out = "\"";
    for (char c : s) {
      if (c == '"') out += '"';
      out += c;
    }
    return out + "\"";
  };
  std::string out = "a,tau,horizon,method,regime,theoretical,empirical,tv,chi2,p_value,error\n";
  for (const auto& r : rows) {
    out += to_string(r.a) + "," + to_string(r.tau) + "," + std::to_string(r.horizon) + "," + to_string(r.method) + "," +
           r.regime + ",";
    out += (r.theoretical ? vec(*r.theoretical) : std::string("uncovered")) + ",";
    out += (r.empirical.empty() ? std::string() : vec(r.empirical)) + ",";
    out += (r.tv ? to_decimal(*r.tv, precision) : std::string()) + ",";
    if (r.chi2) {
      out += (std::isinf(r.chi2->statistic) ? std::string("inf") : to_decimal(r.chi2->statistic, 6)) + "," +
             to_decimal(r.chi2->p_value, 6);
    } else {
      out += ",";
    }
    out += "," + (r.error ? quote(*r.error) : std::string()) + "\n";
  }
  return out;
}

inline std::string tv_series_csv(const Rational& a, const Rational& tau, const std::vector<TvPoint>& series,
                                 int precision, bool header) {
  std::string out = header ? "a,tau,horizon,tv,tv_exact\n" : "";
  for (const auto& p : series)
    out += to_string(a) + "," + to_string(tau) + "," + std::to_string(p.horizon) + "," + to_decimal(p.tv, precision) +
           "," + to_string(p.tv) + "\n";
  return out;
}

}  // namespace vsp
