// vsp: command-line front end for the virus spread simulator.

#include <CLI11.hpp>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "vsp/vsp.hpp"

namespace {

using vsp::Json;
using vsp::Rational;

enum class Format { json, csv };

struct Common {
  std::string config_path;
  std::optional<int> n;
  std::optional<std::string> a, tau, arithmetic;
  std::string output;
  std::string format = "json";
  int precision = 3;
  unsigned threads = 1;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    cmd->add_option("--n", n, "population size (overrides config)");
    cmd->add_option("--a", a, "common initial action, decimal or p/q (overrides config)");
    cmd->add_option("--tau", tau, "common immunity, decimal or p/q (overrides config)");
    cmd->add_option("--arithmetic", arithmetic, "rational (default) or float");
    cmd->add_option("-o,--output", output, "output file (default stdout)");
    cmd->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--precision", precision, "decimal places in rendered probabilities")->check(CLI::Range(0, 30));
  }

  Format fmt() const { return format == "csv" ? Format::csv : Format::json; }

  vsp::ConfigSpec spec() const {
    vsp::ConfigSpec c;
    if (!config_path.empty()) c = vsp::load_config(config_path);
    if (n) c.n = *n;
    if (a) c.a = {vsp::parse_rational(*a)};
    if (tau) c.tau = {vsp::parse_rational(*tau)};
    if (arithmetic) c.arithmetic = vsp::parse_arithmetic(*arithmetic);
    return c;
  }
};

void emit(const Common& common, const std::string& text) {
  if (common.output.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(common.output, std::ios::binary);
  if (!out) throw vsp::ValidationError("cannot write " + common.output);
  out << text;
}

Json envelope(const char* command, const vsp::ModelConfig<Rational>& cfg, vsp::Arithmetic arithmetic) {
  return Json{{"command", command}, {"params", vsp::params_json(cfg, arithmetic)}};
}

std::vector<int> parse_sequence(const std::string& text, int n) {
  std::vector<int> seq;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    int v = 0;
    try {
      std::size_t used = 0;
      v = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw vsp::ValidationError("sequence entry \"" + item + "\" is not an integer");
    }
    if (v < 1 || v > n) throw vsp::ValidationError("sequence entry " + item + " is outside 1.." + std::to_string(n));
    seq.push_back(v - 1);
  }
  return seq;
}

// ---- trace -------------------------------------------------------------

struct TraceArgs {
  Common common;
  std::optional<std::string> seq;
  std::optional<std::uint64_t> seed;
  std::uint64_t stream = 0;
  std::optional<long> max_epochs;
};

template <vsp::Scalar S>
int run_trace(const TraceArgs& args, const vsp::ModelConfig<Rational>& exact, vsp::Arithmetic arithmetic) {
  const auto cfg = vsp::convert<S>(exact);
  vsp::AgentSequence seq = vsp::AgentSequence::seeded(0, 0);
  long cap = 0;
  if (args.seq) {
    auto list = parse_sequence(*args.seq, exact.n);
    cap = args.max_epochs.value_or(static_cast<long>(list.size()));
    seq = vsp::AgentSequence::explicit_list(std::move(list));
  } else {
    seq = vsp::AgentSequence::seeded(*args.seed, args.stream);
    cap = args.max_epochs.value_or(vsp::default_max_epochs(exact.n));
  }
  const auto tr = vsp::run_dvsp(cfg, seq, cap);
  if (args.common.fmt() == Format::csv) {
    emit(args.common, vsp::trajectory_csv(tr));
  } else {
    Json head = envelope("trace", exact, arithmetic);
    emit(args.common, head.dump() + "\n" + vsp::trajectory_jsonl(tr));
  }
  // Horizon exhaustion: the epoch cap stopped the run before absorption
  // while the sequence still had entries.
  const bool cut_short = !tr.absorbed && seq.at(tr.epochs, exact.n).has_value();
  return cut_short ? static_cast<int>(vsp::ExitCode::horizon) : 0;
}

// ---- simulate ----------------------------------------------------------

struct SimulateArgs {
  Common common;
  std::uint64_t samples = 10000;
  std::optional<std::uint64_t> seed;
  std::optional<long> max_epochs;
};

template <vsp::Scalar S>
int run_simulate(const SimulateArgs& args, const vsp::ModelConfig<Rational>& exact, vsp::Arithmetic arithmetic) {
  const auto cfg = vsp::convert<S>(exact);
  const long cap = args.max_epochs.value_or(vsp::default_max_epochs(exact.n));
  const auto law = vsp::monte_carlo(cfg, args.samples, *args.seed, cap, {args.common.threads, 1e-9});
  const int p = args.common.precision;
  if (args.common.fmt() == Format::csv) {
    emit(args.common, vsp::size_law_csv(law.infected_size_probs_exact(), p));
  } else {
    Json j = envelope("simulate", exact, arithmetic);
    j["seed"] = *args.seed;
    j["max_epochs"] = cap;
    j.update(vsp::empirical_law_json(law, p));
    emit(args.common, j.dump(2) + "\n");
  }
  return law.unsettled > 0 ? static_cast<int>(vsp::ExitCode::horizon) : 0;
}

// ---- enumerate ---------------------------------------------------------

struct EnumerateArgs {
  Common common;
  long horizon = 10;
  std::optional<long> transitions;
  std::size_t support_cap = 1'000'000;
  bool no_states = false;
};

int run_enumerate(const EnumerateArgs& args, const vsp::ModelConfig<Rational>& cfg) {
  const long steps = args.transitions ? *args.transitions : vsp::transitions_for_horizon(args.horizon);
  const auto dist = vsp::enumerate_exact(cfg, steps, {args.support_cap, args.common.threads});
  const int p = args.common.precision;
  if (args.common.fmt() == Format::csv) {
    emit(args.common, vsp::size_law_csv(vsp::marginal_infected_size(dist, cfg.n), p));
  } else {
    Json j = envelope("enumerate", cfg, vsp::Arithmetic::rational);
    j["horizon"] = args.transitions ? Json(nullptr) : Json(args.horizon);
    j.update(vsp::distribution_json(dist, cfg, p, !args.no_states));
    emit(args.common, j.dump(2) + "\n");
  }
  return 0;
}

// ---- theory ------------------------------------------------------------

int run_theory(const Common& common, const vsp::ModelConfig<Rational>& cfg) {
  const auto h = cfg.homogeneous();
  if (!h) throw vsp::ValidationError("theory needs a homogeneous config (complete graph, common a and tau, I0 = {1})");
  const int p = common.precision;
  Json j = envelope("theory", cfg, vsp::Arithmetic::rational);
  try {
    const auto laws = vsp::limit_laws(h->n, h->a, h->tau);
    if (common.fmt() == Format::csv) {
      emit(common, vsp::size_law_csv(laws.infected.size_law(), p));
    } else {
      j.update(vsp::limit_laws_json(laws, p));
      emit(common, j.dump(2) + "\n");
    }
    return 0;
  } catch (const vsp::UncoveredRegimeError& e) {
    if (common.fmt() == Format::csv) {
      emit(common, "regime\nuncovered\n");
    } else {
      j["regime"] = "uncovered";
      j["thresholds"] = vsp::thresholds_json(vsp::thresholds(h->n, h->a, h->tau));
      j["error"] = e.what();
      emit(common, j.dump(2) + "\n");
    }
    std::cerr << "vsp: " << e.what() << "\n";
    return static_cast<int>(vsp::ExitCode::uncovered);
  }
}

// ---- compare -----------------------------------------------------------

struct CompareArgs {
  Common common;
  std::string grid_path;
  std::string method = "enumerate";
  long horizon = 10;
  std::uint64_t samples = 10000;
  std::optional<std::uint64_t> seed;
  std::size_t support_cap = 1'000'000;
  bool plot_data = false;
};

int run_compare(const CompareArgs& args) {
  const auto& common = args.common;
  vsp::GridSpec grid;
  if (!args.grid_path.empty()) grid = vsp::load_grid(args.grid_path, args.horizon);
  const vsp::ConfigSpec base = common.spec();
  std::optional<int> n = common.n ? common.n : (grid.n ? grid.n : base.n);
  if (!n) throw vsp::ValidationError("compare needs n (flag, grid or config)");
  if (grid.points.empty() && args.grid_path.empty()) {
    if (base.a.size() != 1 || base.tau.size() != 1) throw vsp::ValidationError("compare needs --grid or scalar --a and --tau");
    grid.points.push_back({base.a.front(), base.tau.front(), args.horizon});
  }
  vsp::TableOptions opt;
  opt.method = vsp::parse_method(args.method);
  opt.enumeration = {args.support_cap, common.threads};
  opt.samples = args.samples;
  opt.threads = common.threads;
  if (opt.method == vsp::Method::monte_carlo) {
    if (!args.seed) throw vsp::ValidationError("--seed is required for Monte Carlo comparison");
    opt.seed = *args.seed;
  }
  const int p = common.precision;

  if (args.plot_data) {
    std::string out;
    bool header = true;
    for (const auto& g : grid.points) {
      if (vsp::classify_regime(*n, g.a, g.tau) == vsp::Regime::uncovered) continue;
      out += vsp::tv_series_csv(g.a, g.tau, vsp::tv_series(*n, g.a, g.tau, g.horizon, opt.enumeration), p, header);
      header = false;
    }
    if (header) out = "a,tau,horizon,tv,tv_exact\n";
    emit(common, out);
    return 0;
  }

  const auto rows = vsp::build_table(grid.points, *n, opt);
  if (common.fmt() == Format::csv) {
    emit(common, vsp::comparison_csv(rows, p));
  } else {
    Json j{{"command", "compare"}, {"n", *n}, {"method", vsp::to_string(opt.method)}};
    if (opt.method == vsp::Method::monte_carlo) {
      j["samples"] = opt.samples;
      j["seed"] = opt.seed;
    }
    Json list = Json::array();
    for (const auto& r : rows) list.push_back(vsp::comparison_row_json(r, p));
    j["rows"] = list;
    emit(common, j.dump(2) + "\n");
  }
  int code = 0;
  for (const auto& r : rows)
    if (r.error) code = static_cast<int>(vsp::ExitCode::resource);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Best-response virus spread: trajectories, Monte Carlo, exact enumeration and limit laws"};
  app.require_subcommand(1);

  TraceArgs trace;
  auto* trace_cmd = app.add_subcommand("trace", "run one trajectory along an explicit or seeded agent sequence");
  trace.common.attach(trace_cmd);
  auto* seq_opt = trace_cmd->add_option("--seq", trace.seq, "comma-separated 1-based agents, e.g. 2,1,3");
  auto* seed_opt = trace_cmd->add_option("--seed", trace.seed, "seed for a uniform random sequence");
  trace_cmd->add_option("--stream", trace.stream, "stream id under --seed");
  trace_cmd->add_option("--max-epochs", trace.max_epochs, "epoch cap (default: sequence length, or 64n when seeded)");
  seq_opt->excludes(seed_opt);

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo estimate of the limit laws");
  sim.common.attach(sim_cmd);
  sim_cmd->add_option("--samples", sim.samples, "number of trajectories")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--seed", sim.seed, "master seed")->required();
  sim_cmd->add_option("--max-epochs", sim.max_epochs, "epoch cap per trajectory (default 64n)");
  sim_cmd->add_option("--threads", sim.common.threads, "worker threads")->check(CLI::PositiveNumber);

  EnumerateArgs en;
  auto* en_cmd = app.add_subcommand("enumerate", "exact law of the process after a number of epochs");
  en.common.attach(en_cmd);
  auto* hz = en_cmd->add_option("--horizon", en.horizon, "epochs counted from 1 at the initial state (default 10)");
  auto* tr = en_cmd->add_option("--transitions", en.transitions, "raw number of transitions instead of --horizon");
  hz->excludes(tr);
  en_cmd->add_option("--support-cap", en.support_cap, "maximum number of distinct states");
  en_cmd->add_option("--threads", en.common.threads, "worker threads")->check(CLI::PositiveNumber);
  en_cmd->add_flag("--no-states", en.no_states, "omit the state list from JSON output");

  Common th;
  auto* th_cmd = app.add_subcommand("theory", "closed-form limit laws and thresholds");
  th.attach(th_cmd);

  CompareArgs cmp;
  auto* cmp_cmd = app.add_subcommand("compare", "table of theoretical vs enumerated or sampled laws");
  cmp.common.attach(cmp_cmd);
  cmp_cmd->add_option("--grid", cmp.grid_path, "grid JSON file")->check(CLI::ExistingFile);
  cmp_cmd->add_option("--method", cmp.method, "enumerate or monte_carlo");
  cmp_cmd->add_option("--horizon", cmp.horizon, "default horizon for grid points (default 10)");
  cmp_cmd->add_option("--samples", cmp.samples, "Monte Carlo samples per row")->check(CLI::PositiveNumber);
  cmp_cmd->add_option("--seed", cmp.seed, "Monte Carlo seed");
  cmp_cmd->add_option("--support-cap", cmp.support_cap, "maximum number of distinct states");
  cmp_cmd->add_option("--threads", cmp.common.threads, "worker threads")->check(CLI::PositiveNumber);
  cmp_cmd->add_flag("--plot-data", cmp.plot_data, "emit (horizon, tv) series as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return static_cast<int>(vsp::ExitCode::validation);
  }

  try {
    if (*trace_cmd) {
      if (!trace.seq && !trace.seed) throw vsp::ValidationError("trace needs --seq or --seed");
      const auto spec = trace.common.spec();
      const auto cfg = spec.build();
      return spec.arithmetic == vsp::Arithmetic::rational ? run_trace<Rational>(trace, cfg, spec.arithmetic)
                                                          : run_trace<double>(trace, cfg, spec.arithmetic);
    }
    if (*sim_cmd) {
      const auto spec = sim.common.spec();
      const auto cfg = spec.build();
      return spec.arithmetic == vsp::Arithmetic::rational ? run_simulate<Rational>(sim, cfg, spec.arithmetic)
                                                          : run_simulate<double>(sim, cfg, spec.arithmetic);
    }
    if (*en_cmd) {
      const auto spec = en.common.spec();
      if (spec.arithmetic != vsp::Arithmetic::rational)
        throw vsp::ValidationError("exact enumeration requires rational arithmetic");
      return run_enumerate(en, spec.build());
    }
    if (*th_cmd) {
      const auto spec = th.spec();
      if (spec.arithmetic != vsp::Arithmetic::rational) throw vsp::ValidationError("theory requires rational arithmetic");
      return run_theory(th, spec.build());
    }
    if (*cmp_cmd) return run_compare(cmp);
  } catch (const vsp::Error& e) {
    std::cerr << "vsp: " << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "vsp: internal error: " << e.what() << "\n";
    return 70;
  }
  return 0;
}
