#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "slowmix/analysis.hpp"
#include "slowmix/dsl.hpp"
#include "slowmix/error.hpp"
#include "slowmix/io.hpp"
#include "slowmix/parallel.hpp"
#include "slowmix/path_file.hpp"
#include "slowmix/regression.hpp"
#include "slowmix/simulate.hpp"
#include "slowmix/structure.hpp"

#ifndef SLOWMIX_VERSION
#define SLOWMIX_VERSION "unknown"
#endif

namespace slowmix::cli {

namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

/// A request the tool refuses to serve, e.g. mixing without a stationary reference.
class GuardError : public Error {
 public:
  using Error::Error;
};

constexpr const char* kModel12 = "0 <-> A + B @ 1, 1\nB <-> 2 B @ 1, 1\n";

// ---------------------------------------------------------------- parsing

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(text);
  while (std::getline(ss, field, sep)) out.push_back(field);
  if (!text.empty() && text.back() == sep) out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

template <typename T>
T number(const std::string& raw, const std::string& what) {
  const std::string text = trim(raw);
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error("invalid " + what + ": '" + raw + "'");
  }
  return value;
}

template <typename T>
std::vector<T> number_list(const std::string& text, const std::string& what) {
  std::vector<T> out;
  for (const std::string& f : split(text, ',')) out.push_back(number<T>(f, what));
  if (out.empty()) throw Error("empty " + what);
  return out;
}

std::vector<Count> n_grid(const std::string& text) {
  std::vector<Count> grid = number_list<Count>(text, "n-grid");
  for (Count n : grid)
    if (n < 0) throw Error("n-grid values must be non-negative");
  return grid;
}

State parse_state(const std::string& text, const ReactionNetwork& net) {
  std::vector<Count> x = number_list<Count>(text, "state");
  if (x.size() != net.dimension()) {
    throw Error("state '" + text + "' has " + std::to_string(x.size()) + " coordinates, network has " +
                std::to_string(net.dimension()));
  }
  return State(std::move(x));
}

Window parse_window(const std::string& text, const ReactionNetwork& net) {
  if (text.empty()) return Window::square(net.dimension(), 100);
  std::vector<Count> lo;
  std::vector<Count> hi;
  for (const std::string& range : split(text, ',')) {
    const std::vector<std::string> ends = split(range, ':');
    if (ends.size() != 2) throw Error("window ranges look like 'lo:hi', got '" + range + "'");
    lo.push_back(number<Count>(ends[0], "window bound"));
    hi.push_back(number<Count>(ends[1], "window bound"));
  }
  if (lo.size() != net.dimension()) throw Error("window dimension does not match network");
  return Window(std::move(lo), std::move(hi));
}

std::vector<double> concentrations(const std::string& text, const ReactionNetwork& net) {
  if (text.empty()) return std::vector<double>(net.dimension(), 1.0);
  std::vector<double> c = number_list<double>(text, "concentration");
  if (c.size() != net.dimension()) throw Error("concentration vector dimension does not match network");
  return c;
}

/// "sup:C" or "<species>:C".
FptQuery parse_query(const std::string& text, const ReactionNetwork& net) {
  const std::vector<std::string> parts = split(text, ':');
  if (parts.size() != 2) throw Error("query looks like 'sup:C' or '<species>:C', got '" + text + "'");
  const Count c = number<Count>(parts[1], "query threshold");
  if (c < 0) throw Error("query threshold must be non-negative");
  if (parts[0] == "sup") return FptQuery::sup_norm_at_most(c);
  for (const Species& s : net.species())
    if (s.name == parts[0]) return FptQuery::coordinate_at_most(s.index, c);
  throw Error("query names unknown species '" + parts[0] + "'");
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("SLOWMIX_SEED")) return number<std::uint64_t>(env, "SLOWMIX_SEED");
  return 1;
}

std::string window_text(const Window& w) {
  std::string s;
  for (std::size_t i = 0; i < w.dimension(); ++i) {
    if (i) s += ',';
    s += std::to_string(w.lower()[i]) + ':' + std::to_string(w.upper()[i]);
  }
  return s;
}

json state_json(std::span<const Count> x) { return json(std::vector<Count>(x.begin(), x.end())); }

json sequence_json(const TransitionSequence& seq) {
  json increments = json::array();
  for (const Increment& v : seq.increments) increments.push_back(v);
  return {{"labels", seq.labels}, {"increments", increments}, {"endpoint", seq.endpoint()}, {"is_cycle", is_cycle(seq)}};
}

std::optional<PowerLawFit> slope_of(const std::vector<std::pair<double, double>>& points) {
  std::vector<std::pair<double, double>> positive;
  for (const auto& p : points)
    if (p.first > 0.0 && p.second > 0.0) positive.push_back(p);
  try {
    return loglog_slope(positive);
  } catch (const Error&) {
    return std::nullopt;
  }
}

json fit_json(const std::optional<PowerLawFit>& fit) {
  if (!fit) return nullptr;
  return {{"slope", fit->slope}, {"intercept", fit->intercept}, {"r_squared", fit->r_squared}};
}

// ---------------------------------------------------------------- output

struct Context {
  std::string command;
  json config = json::object();
  Clock::time_point start = Clock::now();
  std::string format = "csv";
  std::string out_path;

  double elapsed() const { return std::chrono::duration<double>(Clock::now() - start).count(); }
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;
  json summary = json::object();
};

std::string cell_text(const json& v) {
  if (v.is_null()) return {};
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) return format_double(v.get<double>());
  return v.dump();
}

json report_header(const Context& ctx) {
  return {{"command", ctx.command}, {"version", SLOWMIX_VERSION}, {"config", ctx.config}};
}

void write_table(const Table& table, const Context& ctx, std::ostream& out) {
  if (ctx.format == "json") {
    json report = report_header(ctx);
    json rows = json::array();
    for (const auto& row : table.rows) {
      json r = json::object();
      for (std::size_t i = 0; i < table.columns.size(); ++i) r[table.columns[i]] = row[i];
      rows.push_back(std::move(r));
    }
    report["rows"] = std::move(rows);
    report["summary"] = table.summary;
    report["wall_clock_seconds"] = ctx.elapsed();
    out << report.dump(2) << '\n';
    return;
  }
  for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << cell_text(row[i]);
    out << '\n';
  }
  for (const auto& [key, value] : table.summary.items()) out << "# " << key << '=' << cell_text(value) << '\n';
  out << "# version=" << SLOWMIX_VERSION << '\n';
  if (ctx.config.contains("seed")) out << "# seed=" << ctx.config["seed"].dump() << '\n';
  out << "# wall_clock_seconds=" << format_double(ctx.elapsed()) << '\n';
}

void emit(const Table& table, const Context& ctx, std::ostream& out) {
  if (ctx.out_path.empty()) {
    write_table(table, ctx, out);
    return;
  }
  std::ofstream file(ctx.out_path);
  if (!file) throw Error("cannot write " + ctx.out_path);
  write_table(table, ctx, file);
}

void emit_json(json report, const Context& ctx, std::ostream& out) {
  report["wall_clock_seconds"] = ctx.elapsed();
  if (ctx.out_path.empty()) {
    out << report.dump(2) << '\n';
    return;
  }
  std::ofstream file(ctx.out_path);
  if (!file) throw Error("cannot write " + ctx.out_path);
  file << report.dump(2) << '\n';
}

std::ofstream open_output(const std::string& path) {
  std::ofstream file(path);
  if (!file) throw Error("cannot write " + path);
  return file;
}

// ---------------------------------------------------------------- commands

struct Options {
  std::string network;
  std::string format = "csv";
  std::string out;
  unsigned workers = 0;
  std::optional<std::uint64_t> seed;
  std::string init;
  std::string n_grid;
  std::string paths;
  bool automatic = false;
  std::string query = "sup:5";
  std::size_t M = 100;
  double delta = 0.2;
  double grid = 100.0;
  std::string window;
  std::string reference;
  std::string c;
  std::string mode = "full";
  std::string tv = "windowed";
  std::string curves_dir;
  std::optional<double> t_max;
  std::uint64_t max_events = SimConfig{}.max_events;
  double max_time = SimConfig{}.max_time;
  std::string boundary_out;
  std::string fpt_grid = "100,200,400,800";
  std::string mixing_grid = "100,200,400";
  bool skip_mixing = false;
};

SimConfig sim_config(const Options& o, std::uint64_t seed) {
  if (o.max_events == 0) throw Error("max-events must be positive");
  if (!(o.max_time > 0.0)) throw Error("max-time must be positive");
  return SimConfig{seed, o.max_events, o.max_time};
}

Context context(const std::string& command, const Options& o) {
  Context ctx;
  ctx.command = command;
  ctx.format = o.format;
  ctx.out_path = o.out;
  ctx.config["network"] = o.network;
  ctx.config["workers"] = resolve_workers(o.workers);
  return ctx;
}

json analyze_report(const ReactionNetwork& net) {
  const CyclicSpec spec = recognize_cyclic(net);
  const AssumptionReport assumptions = check_cyclic_assumptions(spec);
  ThetaBounds theta;
  try {
    theta = theta_bounds(spec);
  } catch (const Error& e) {
    throw UnsupportedClassError(std::string("theta undefined: ") + e.what());
  }

  json report;
  report["network"] = render_network(net);
  report["cyclic"] = {{"L", spec.L},
                      {"alpha", spec.alpha},
                      {"beta", spec.beta},
                      {"kappa", spec.kappa},
                      {"step_reaction", spec.step_reaction}};
  report["assumptions"] = {{"ok", assumptions.ok}, {"violations", assumptions.violations}};
  report["theta"] = {{"theta1", theta.theta1}, {"theta2", theta.theta2}, {"theta", theta.theta}};

  json excursions = json::array();
  PathSets paths;
  paths.cycles.push_back(build_eta0(spec));
  if (theta.assumptions_ok) {
    for (std::size_t i = 2; i <= spec.L; ++i) {
      if (spec.gap(i) != theta.theta1) continue;
      TransitionSequence eta = build_eta(spec, i);
      json j = sequence_json(eta);
      j["exit_step"] = i;
      excursions.push_back(std::move(j));
      paths.excursions.push_back(std::move(eta));
    }
  }
  report["dominating_paths"] = {{"cycles", json::array({sequence_json(paths.cycles.front())})},
                                {"excursions", excursions}};
  report["minimal_feasible_n"] = minimal_feasible_n(paths);
  return report;
}

int cmd_analyze(const Options& o, std::ostream& out) {
  Context ctx = context("analyze", o);
  const ReactionNetwork net = load_network(o.network);
  json report = report_header(ctx);
  report.update(analyze_report(net));
  emit_json(std::move(report), ctx, out);
  return kSuccess;
}

// Rows (n, set, index, exact, decimal) for every path and both complements.
void path_rows(const ReactionNetwork& net, const PathSets& paths, const State& start, Table& table) {
  const json n = start[0];
  bool feasible = true;
  auto add = [&](const char* set, const std::vector<TransitionSequence>& seqs) {
    for (std::size_t k = 0; k < seqs.size(); ++k) {
      try {
        const Rational p = path_probability(net, start, seqs[k]);
        table.rows.push_back({n, set, k, to_string(p), p.get_d()});
      } catch (const InfeasiblePathError&) {
        feasible = false;
        table.rows.push_back({n, set, k, "infeasible", nullptr});
      }
    }
  };
  add("cycle", paths.cycles);
  add("excursion", paths.excursions);
  if (!feasible) {
    table.rows.push_back({n, "complement-cycles", nullptr, "infeasible", nullptr});
    table.rows.push_back({n, "complement-all", nullptr, "infeasible", nullptr});
    return;
  }
  const EscapeComplement comp = escape_complement_probability(net, paths, start);
  table.rows.push_back({n, "complement-cycles", nullptr, to_string(comp.cycles_only), comp.cycles_only.get_d()});
  table.rows.push_back({n, "complement-all", nullptr, to_string(comp.with_excursions), comp.with_excursions.get_d()});
}

int cmd_path_prob(const Options& o, std::ostream& out) {
  Context ctx = context("path-prob", o);
  const ReactionNetwork net = load_network(o.network);
  if (o.automatic == !o.paths.empty()) throw Error("give exactly one of --paths and --auto");

  PathSets paths;
  if (o.automatic) {
    paths = dominating_paths(recognize_cyclic(net));
  } else {
    paths = load_path_file(o.paths, net);
  }

  std::vector<State> starts;
  if (!o.init.empty()) starts.push_back(parse_state(o.init, net));
  if (!o.n_grid.empty()) {
    for (Count n : n_grid(o.n_grid)) {
      std::vector<Count> x(net.dimension(), 0);
      x[0] = n;
      starts.emplace_back(std::move(x));
    }
  }
  if (starts.empty()) throw Error("give --n-grid or --init");
  ctx.config["paths"] = o.automatic ? json("auto") : json(o.paths);
  ctx.config["n_grid"] = o.n_grid;
  ctx.config["init"] = o.init;

  Table table{{"n", "set", "index", "exact", "decimal"}, {}, json::object()};
  for (const State& start : starts) path_rows(net, paths, start, table);
  emit(table, ctx, out);
  return kSuccess;
}

int cmd_fpt(const Options& o, std::ostream& out) {
  Context ctx = context("fpt", o);
  const ReactionNetwork net = load_network(o.network);
  const FptQuery q = parse_query(o.query, net);
  const std::uint64_t seed = resolve_seed(o.seed);
  const SimConfig sim = sim_config(o, seed);
  const std::vector<Count> grid = n_grid(o.n_grid.empty() ? "100,200,400,800" : o.n_grid);
  ctx.config.update({{"query", o.query}, {"M", o.M}, {"seed", seed}, {"n_grid", grid},
                     {"max_events", sim.max_events}, {"max_time", sim.max_time}});

  Table table{{"n", "mean", "stderr", "completed", "capped"}, {}, json::object()};
  std::vector<std::pair<double, double>> points;
  std::size_t capped = 0;
  for (Count n : grid) {
    std::vector<Count> x(net.dimension(), 0);
    x[0] = n;
    const FptSummary s = mean_first_passage(net, State(std::move(x)), q, o.M, sim, o.workers);
    table.rows.push_back({n, s.mean, s.standard_error, s.completed, s.capped});
    points.emplace_back(static_cast<double>(n), s.mean);
    capped += s.capped;
  }
  const auto fit = slope_of(points);
  table.summary["slope"] = fit ? json(fit->slope) : json("NA");
  table.summary["intercept"] = fit ? json(fit->intercept) : json("NA");
  table.summary["r_squared"] = fit ? json(fit->r_squared) : json("NA");
  table.summary["capped_total"] = capped;
  emit(table, ctx, out);
  return kSuccess;
}

Pmf mixing_reference(const Options& o, const ReactionNetwork& net, Window& window, json& config) {
  if (!o.reference.empty()) {
    std::ifstream in(o.reference);
    if (!in) throw Error("cannot read " + o.reference);
    Pmf ref = read_pmf_csv(in);
    if (ref.window.dimension() != net.dimension()) throw Error("reference dimension does not match network");
    if (o.window.empty()) {
      window = ref.window;
    } else if (!(ref.window == window)) {
      throw Error("reference window " + window_text(ref.window) + " differs from --window " + window_text(window));
    }
    ref.validate(1e-6);
    config["reference"] = o.reference;
    return ref;
  }
  const std::vector<double> c = concentrations(o.c, net);
  const BalanceCheck check = verify_complex_balanced(net, c);
  if (!check.balanced) {
    throw GuardError("network is not complex balanced at c; no stationary reference available (pass --reference)");
  }
  config["reference"] = "poisson";
  config["c"] = c;
  return stationary_pmf(net, c, window, StationaryMode::Full).pmf;
}

int cmd_mixing(const Options& o, std::ostream& out) {
  Context ctx = context("mixing", o);
  const ReactionNetwork net = load_network(o.network);
  const std::uint64_t seed = resolve_seed(o.seed);
  const SimConfig sim = sim_config(o, seed);
  Window window = parse_window(o.window, net);
  const Pmf reference = mixing_reference(o, net, window, ctx.config);

  MixingConfig cfg;
  cfg.delta = o.delta;
  cfg.grid_step = o.grid;
  cfg.M = o.M;
  cfg.window = window;
  cfg.t_max = o.t_max ? *o.t_max : 1e7 * o.grid / 100.0;
  if (o.tv != "windowed" && o.tv != "symmetric") throw Error("--tv is windowed or symmetric");
  cfg.tv_mode = o.tv == "symmetric" ? TvMode::Symmetric : TvMode::Windowed;
  const std::vector<Count> grid = n_grid(o.n_grid.empty() ? "100,200,400" : o.n_grid);
  ctx.config.update({{"delta", cfg.delta}, {"grid", cfg.grid_step}, {"M", cfg.M}, {"window", window_text(window)},
                     {"t_max", cfg.t_max}, {"tv", o.tv}, {"seed", seed}, {"n_grid", grid},
                     {"max_events", sim.max_events}});
  if (!o.curves_dir.empty()) std::filesystem::create_directories(o.curves_dir);

  Table table{{"n", "t_mix", "final_tv", "grid_points", "capped"}, {}, json::object()};
  std::vector<std::pair<double, double>> points;
  std::size_t capped = 0;
  for (Count n : grid) {
    std::vector<Count> x(net.dimension(), 0);
    x[0] = n;
    const MixingEstimate est = estimate_mixing_time(net, State(std::move(x)), reference, cfg, sim, o.workers);
    const double final_tv = est.tv_curve.empty() ? 1.0 : est.tv_curve.back().second;
    table.rows.push_back({n, est.t_mix ? json(*est.t_mix) : json("not-reached"), final_tv, est.tv_curve.size(),
                          est.capped});
    if (est.t_mix) points.emplace_back(static_cast<double>(n), *est.t_mix);
    capped += est.capped;
    if (!o.curves_dir.empty()) {
      std::ofstream curve = open_output((std::filesystem::path(o.curves_dir) / ("tv_n" + std::to_string(n) + ".csv")).string());
      write_tv_curve_csv(curve, est.tv_curve);
    }
  }
  const auto fit = slope_of(points);
  table.summary["slope"] = fit ? json(fit->slope) : json("NA");
  table.summary["intercept"] = fit ? json(fit->intercept) : json("NA");
  table.summary["r_squared"] = fit ? json(fit->r_squared) : json("NA");
  table.summary["capped_total"] = capped;
  emit(table, ctx, out);
  return kSuccess;
}

int cmd_stationary(const Options& o, std::ostream& out) {
  Context ctx = context("stationary", o);
  ctx.out_path.clear();  // --out names the pmf file here
  const ReactionNetwork net = load_network(o.network);
  const std::vector<double> c = concentrations(o.c, net);
  const Window window = parse_window(o.window, net);
  if (o.mode != "full" && o.mode != "class") throw Error("--mode is full or class");
  const StationaryMode mode = o.mode == "class" ? StationaryMode::Class : StationaryMode::Full;
  std::optional<State> seed_state;
  if (mode == StationaryMode::Class) {
    if (o.init.empty()) throw Error("class mode needs --init for the class seed");
    seed_state = parse_state(o.init, net);
  }
  const Window interior = balance_interior(net, window);
  const StationaryPmf st = stationary_pmf(net, c, window, mode, seed_state);
  const double residual = generator_balance_residual(net, st.pmf, interior);

  if (!o.out.empty()) {
    std::ofstream file = open_output(o.out);
    write_pmf_csv(file, net, st.pmf);
  }
  ctx.config.update({{"c", c}, {"window", window_text(window)}, {"mode", o.mode}, {"init", o.init}, {"out", o.out}});

  Table table{{"quantity", "value"}, {}, json::object()};
  table.rows.push_back({"complex_balanced", st.balance.balanced});
  table.rows.push_back({"max_complex_residual", st.balance.max_abs_residual});
  table.rows.push_back({"interior", window_text(interior)});
  table.rows.push_back({"generator_residual", residual});
  table.rows.push_back({"window_mass", st.pmf.window_mass()});
  table.rows.push_back({"tail_mass", st.pmf.tail_mass});
  if (!st.balance.balanced) table.summary["warning"] = "not complex balanced at c; pmf is not stationary";
  emit(table, ctx, out);
  return kSuccess;
}

int cmd_simulate(const Options& o, std::ostream& out) {
  Context ctx = context("simulate", o);
  const ReactionNetwork net = load_network(o.network);
  if (o.init.empty()) throw Error("simulate needs --init");
  const State init = parse_state(o.init, net);
  const std::uint64_t seed = resolve_seed(o.seed);
  const SimConfig sim = sim_config(o, seed);
  const double horizon = o.t_max ? *o.t_max : 1e4;
  if (!(horizon >= 0.0)) throw Error("--t-max must be non-negative");

  const Trajectory traj = simulate(net, init, Horizon{horizon}, sim);
  if (o.out.empty()) {
    write_trajectory_csv(out, net, traj);
  } else {
    std::ofstream file = open_output(o.out);
    write_trajectory_csv(file, net, traj);
  }
  std::optional<BoundaryStats> stats;
  if (net.dimension() >= 2) stats = boundary_stats(traj);
  if (!o.boundary_out.empty()) {
    if (!stats) throw Error("boundary statistics need at least two species");
    std::ofstream file = open_output(o.boundary_out);
    write_boundary_csv(file, net, *stats);
  }
  if (o.out.empty()) return kSuccess;

  ctx.out_path.clear();
  ctx.format = "json";
  ctx.config.update({{"init", o.init}, {"t_max", horizon}, {"seed", seed}, {"out", o.out},
                     {"boundary_out", o.boundary_out}, {"max_events", sim.max_events}});
  json report = report_header(ctx);
  report["events"] = traj.events.size();
  report["end_time"] = traj.end_time;
  report["termination"] = to_string(traj.termination);
  report["final_state"] = state_json(traj.events.empty() ? traj.initial.counts() : traj.events.back().state.counts());
  if (stats) report["boundary_visits"] = stats->visits_by(traj.end_time);
  emit_json(std::move(report), ctx, out);
  return kSuccess;
}

int cmd_replicate(const Options& o, std::ostream& out) {
  Context ctx = context("replicate-paper", o);
  const std::uint64_t seed = resolve_seed(o.seed);
  const SimConfig sim = sim_config(o, seed);
  const ReactionNetwork model = parse_network(kModel12);
  ctx.config = {{"seed", seed}, {"M", o.M}, {"workers", resolve_workers(o.workers)}, {"fpt_grid", o.fpt_grid},
                {"mixing_grid", o.mixing_grid}, {"delta", 0.2}, {"grid", 100}, {"window", "0:100,0:100"}};
  json report = report_header(ctx);

  // Exact escape probabilities for the two-species model.
  json exact = json::array();
  for (Count n : {10, 100, 1000}) {
    const State start{n, 0};
    const std::vector<std::vector<std::size_t>> labels = {{0, 1}, {0, 0, 1, 1}, {0, 2, 1, 1}};
    json row = {{"n", n}};
    for (std::size_t k = 0; k < labels.size(); ++k) {
      const Rational p = path_probability(model, start, sequence_from_labels(model, labels[k]));
      row["eta" + std::to_string(k + 1)] = to_string(p);
    }
    exact.push_back(std::move(row));
  }
  report["model12_paths"] = std::move(exact);

  json thetas = json::array();
  for (Count a : {2, 3, 4}) {
    const CyclicSpec spec = make_cyclic_spec({0, a, 2 * a - 1}, {0, 1, 2}, {1.0, 1.0, 1.0});
    const ThetaBounds t = theta_bounds(spec);
    thetas.push_back({{"alpha", a}, {"theta1", t.theta1}, {"theta2", t.theta2}, {"theta", t.theta}});
  }
  report["example32_theta"] = std::move(thetas);

  {
    const CyclicSpec spec = make_cyclic_spec({0, 2, 3}, {0, 1, 2}, {1.0, 1.0, 1.0});
    const AssumptionFits fits = fit_assumption(cyclic_network(spec), spec, {50, 100, 200, 400, 800});
    report["example32_assumption_fit"] = {{"cycles_exponent", fits.cycles.fitted_exponent},
                                          {"excursions_exponent", fits.excursions.fitted_exponent},
                                          {"N0", fits.cycles.N0_suggested}};
  }

  json fpt = json::array();
  std::vector<std::pair<double, double>> fpt_points;
  for (Count n : n_grid(o.fpt_grid)) {
    const FptSummary s = mean_first_passage(model, State{n, 0}, FptQuery::sup_norm_at_most(5), o.M, sim, o.workers);
    fpt.push_back({{"n", n}, {"mean", s.mean}, {"stderr", s.standard_error}, {"capped", s.capped}});
    fpt_points.emplace_back(static_cast<double>(n), s.mean);
  }
  report["model12_fpt"] = {{"rows", fpt}, {"fit", fit_json(slope_of(fpt_points))}};

  if (!o.skip_mixing) {
    MixingConfig cfg;
    cfg.M = o.M;
    cfg.window = Window::square(2, 100);
    const Pmf reference = stationary_pmf(model, std::vector<double>{1.0, 1.0}, cfg.window, StationaryMode::Full).pmf;
    json mixing = json::array();
    std::vector<std::pair<double, double>> mix_points;
    for (Count n : n_grid(o.mixing_grid)) {
      const MixingEstimate est = estimate_mixing_time(model, State{n, 0}, reference, cfg, sim, o.workers);
      mixing.push_back({{"n", n}, {"t_mix", est.t_mix ? json(*est.t_mix) : json(nullptr)}, {"capped", est.capped}});
      if (est.t_mix) mix_points.emplace_back(static_cast<double>(n), *est.t_mix);
    }
    report["model12_mixing"] = {{"rows", mixing}, {"fit", fit_json(slope_of(mix_points))}};
  }
  emit_json(std::move(report), ctx, out);
  return kSuccess;
}

// ---------------------------------------------------------------- errors

void report_error(std::ostream& err, const std::string& kind, const std::string& message, json extra = json::object()) {
  json j = {{"error", kind}, {"message", message}};
  j.update(extra);
  err << j.dump() << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Slow-mixing analysis of stochastic reaction networks", "slowmix"};
  app.require_subcommand(1);
  Options o;

  auto common = [&o](CLI::App* sub, bool needs_network = true) {
    auto* net = sub->add_option("--network", o.network, "Network file");
    if (needs_network) net->required();
    sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--out", o.out, "Output file");
    sub->add_option("--workers", o.workers, "Worker threads (0: all)");
    sub->add_option("--seed", o.seed, "Master seed (default: $SLOWMIX_SEED or 1)");
  };
  auto sim_caps = [&o](CLI::App* sub) {
    sub->add_option("--max-events", o.max_events, "Event cap per trajectory");
    sub->add_option("--max-time", o.max_time, "Time cap per trajectory");
  };

  auto* analyze = app.add_subcommand("analyze", "Cyclic-class recognition, theta exponents and dominating paths");
  common(analyze);

  auto* path_prob = app.add_subcommand("path-prob", "Exact path and escape probabilities");
  common(path_prob);
  path_prob->add_option("--n-grid", o.n_grid, "Start points (n, 0)");
  path_prob->add_option("--init", o.init, "Explicit start state");
  path_prob->add_option("--paths", o.paths, "Path file with [cycles] and [excursions]");
  path_prob->add_flag("--auto", o.automatic, "Use the constructed dominating paths of a cyclic network");

  auto* fpt = app.add_subcommand("fpt", "Mean first-passage times over a grid of starts (n, 0)");
  common(fpt);
  sim_caps(fpt);
  fpt->add_option("--n-grid", o.n_grid, "Start points (n, 0)");
  fpt->add_option("--query", o.query, "sup:C or <species>:C");
  fpt->add_option("--M", o.M, "Trajectories per start")->check(CLI::Range(std::size_t{2}, std::size_t{100000000}));

  auto* mixing = app.add_subcommand("mixing", "Monte-Carlo mixing times over a grid of starts (n, 0)");
  common(mixing);
  sim_caps(mixing);
  mixing->add_option("--n-grid", o.n_grid, "Start points (n, 0)");
  mixing->add_option("--delta", o.delta, "TV threshold")->check(CLI::Range(0.0, 1.0));
  mixing->add_option("--grid", o.grid, "Grid step in time");
  mixing->add_option("--M", o.M, "Trajectories per start")->check(CLI::Range(std::size_t{1}, std::size_t{100000000}));
  mixing->add_option("--window", o.window, "Window, e.g. 0:100,0:100");
  mixing->add_option("--reference", o.reference, "Reference pmf CSV");
  mixing->add_option("--c", o.c, "Complex-balanced concentration for the Poisson reference");
  mixing->add_option("--t-max", o.t_max, "Last grid time");
  mixing->add_option("--tv", o.tv, "windowed or symmetric");
  mixing->add_option("--curves-dir", o.curves_dir, "Directory for per-n tv curves");

  auto* stationary = app.add_subcommand("stationary", "Poisson-product stationary pmf and its balance residual");
  common(stationary);
  stationary->add_option("--c", o.c, "Concentration vector");
  stationary->add_option("--window", o.window, "Window, e.g. 0:100,0:100");
  stationary->add_option("--mode", o.mode, "full or class");
  stationary->add_option("--init", o.init, "Class seed for class mode");

  auto* sim = app.add_subcommand("simulate", "One trajectory with boundary statistics");
  common(sim);
  sim_caps(sim);
  sim->add_option("--init", o.init, "Initial state");
  sim->add_option("--t-max", o.t_max, "Horizon (default 1e4)");
  sim->add_option("--boundary-out", o.boundary_out, "Boundary statistics CSV");

  auto* replicate = app.add_subcommand("replicate-paper", "Both example networks at desk-scale parameters");
  common(replicate, false);
  sim_caps(replicate);
  replicate->add_option("--M", o.M, "Trajectories per start");
  replicate->add_option("--fpt-grid", o.fpt_grid, "Starts for first-passage times");
  replicate->add_option("--mixing-grid", o.mixing_grid, "Starts for mixing times");
  replicate->add_flag("--skip-mixing", o.skip_mixing, "Skip the mixing-time runs");

  try {
    std::vector<std::string> rest(args.begin() + (args.empty() ? 0 : 1), args.end());
    std::reverse(rest.begin(), rest.end());
    app.parse(rest);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    report_error(err, "usage", e.what());
    return kInputError;
  }

  try {
    if (analyze->parsed()) return cmd_analyze(o, out);
    if (path_prob->parsed()) return cmd_path_prob(o, out);
    if (fpt->parsed()) return cmd_fpt(o, out);
    if (mixing->parsed()) return cmd_mixing(o, out);
    if (stationary->parsed()) return cmd_stationary(o, out);
    if (sim->parsed()) return cmd_simulate(o, out);
    if (replicate->parsed()) return cmd_replicate(o, out);
  } catch (const ParseError& e) {
    report_error(err, "parse", e.message(), {{"line", e.line()}, {"column", e.column()}});
    return kInputError;
  } catch (const UnsupportedClassError& e) {
    report_error(err, "unsupported-class", e.what(),
                 {{"suggestion", "supply dominating paths explicitly: path-prob --paths <file>"}});
    return kUnsupported;
  } catch (const GuardError& e) {
    report_error(err, "guard", e.what());
    return kUnsupported;
  } catch (const std::exception& e) {
    report_error(err, "input", e.what());
    return kInputError;
  }
  return kInputError;
}

}  // namespace slowmix::cli
