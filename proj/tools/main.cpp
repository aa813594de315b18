#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <iostream>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "blgram/io.hpp"

namespace {

using namespace blgram;

constexpr double kMaxRepresentableDet = 1e300;

struct Output {
  std::string path;  // empty -> stdout
  void emit(const std::string& text) const {
    if (path.empty()) {
      std::cout << text;
    } else {
      io::write_file(path, text);
    }
  }
};

BilinearSystem load_system(const std::string& path) {
  return io::system_from_json(io::parse_json_text(io::read_file(path), path));
}

ActuatorLibrary load_library(const std::string& path) {
  return io::library_from_json(io::parse_json_text(io::read_file(path), path));
}

MetricKind metric_from_flag(const std::string& flag) {
  if (flag == "trace") return MetricKind::trace;
  if (flag == "lmin") return MetricKind::lambda_min;
  if (flag == "logdet") return MetricKind::log_det;
  throw InputError("unknown metric \"" + flag + "\" (expected trace, lmin, or logdet)");
}

io::Json finite_or_null(double x) {
  if (std::isfinite(x)) return x;
  return nullptr;
}

/// Gramian metric row for the selection table; determinant entries fall back
/// to null when the Gramian is singular or the determinant overflows.
io::Json metric_row(const ActuatorLibrary& lib, const std::vector<int>& s) {
  const Matrix w = gramian_vec_solve(assemble(lib, s)).W;
  io::Json row = io::Json::object();
  io::Json idx = io::Json::array();
  for (int i : s) idx.push_back(i);
  row["S"] = std::move(idx);
  row["trace"] = w.trace();
  row["lambda_min"] = lambda_min(w);
  try {
    const double ld = log_det_pd(w);
    row["log_det"] = ld;
    row["det"] = ld < std::log(kMaxRepresentableDet) ? io::Json(std::exp(ld))
                                                     : io::Json(nullptr);
  } catch (const DefinitenessError&) {
    row["log_det"] = nullptr;
    row["det"] = nullptr;
  }
  return row;
}

int cmd_gramian(const Output& out, const std::string& system_path,
                const std::string& method, int max_order, double tol) {
  const BilinearSystem sys = load_system(system_path);
  const GramianResult g = method == "series" ? gramian_series(sys, max_order, tol)
                                             : gramian_vec_solve(sys);
  out.emit(io::dump_json(io::gramian_to_json(g)));
  return 0;
}

int cmd_metrics(const Output& out, const std::string& system_path) {
  const BilinearSystem sys = load_system(system_path);
  const Matrix w = gramian_vec_solve(sys).W;
  io::Json doc = io::Json::object();
  doc["trace"] = w.trace();
  doc["lambda_min"] = lambda_min(w);
  try {
    const double ld = log_det_pd(w);
    doc["log_det"] = ld;
    doc["det"] = ld < std::log(kMaxRepresentableDet) ? io::Json(std::exp(ld))
                                                     : io::Json(nullptr);
  } catch (const DefinitenessError& e) {
    doc["log_det"] = nullptr;
    doc["det"] = nullptr;
    out.emit(io::dump_json(doc));
    std::cerr << "warning: determinant metrics unavailable: " << e.what() << "\n";
    return 3;
  }
  out.emit(io::dump_json(doc));
  return 0;
}

int cmd_bound(const Output& out, const std::string& system_path, bool emit_psi) {
  const BilinearSystem sys = load_system(system_path);
  const EnergyBound eb = input_cap(sys);
  out.emit(io::dump_json(io::energy_bound_to_json(eb, emit_psi)));
  if (!eb.G_negdef) {
    std::cerr << "warning: gap matrix is not negative definite (lambda_max "
              << eb.gap_lambda_max << "); the amplitude cap is not positive\n";
  }
  return 0;
}

std::vector<Vector> random_inputs(Index m, int steps, std::uint64_t seed, double cap) {
  // Portable uniforms: identical across platforms for a fixed seed.
  std::mt19937_64 rng(seed);
  auto unit = [&rng]() {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
  };
  const double amp = std::isfinite(cap) && cap > 0.0 ? 0.9 * cap : 1.0;
  std::vector<Vector> rows;
  rows.reserve(static_cast<std::size_t>(steps));
  for (int k = 0; k < steps; ++k) {
    Vector u(m);
    for (Index j = 0; j < m; ++j) u(j) = (2.0 * unit() - 1.0) * amp;
    rows.push_back(std::move(u));
  }
  return rows;
}

int cmd_simulate(const Output& out, const std::string& system_path,
                 const std::string& inputs_path, int random_steps, std::uint64_t seed,
                 bool check_bound) {
  const BilinearSystem sys = load_system(system_path);
  if (inputs_path.empty() == (random_steps < 0)) {
    throw InputError("simulate: provide exactly one of --inputs or --random-steps");
  }
  const Matrix w = gramian_vec_solve(sys).W;
  std::vector<Vector> inputs;
  if (!inputs_path.empty()) {
    inputs = io::inputs_from_csv(io::read_file(inputs_path), sys.m());
  } else {
    const EnergyBound eb = input_cap(sys, w);
    inputs = random_inputs(sys.m(), random_steps, seed, eb.input_cap);
  }
  const EnergyReport rep = verify_energy_inequality(sys, inputs, w);
  out.emit(io::energy_report_csv(rep));
  if (!rep.cap_satisfied) {
    std::cerr << "warning: input amplitude exceeds the cap "
              << (std::isfinite(rep.cap) ? io::format_double(rep.cap, 17) : "inf")
              << "; the energy bound is not guaranteed\n";
  }
  if (check_bound && rep.cap_satisfied && !rep.inequality_held) {
    std::cerr << "error: energy fell below the Gramian bound on an admissible "
                 "trajectory\n";
    return 5;
  }
  return 0;
}

int cmd_select(const Output& out, const std::string& library_path, int m,
               const std::string& metric_flag, const std::string& method,
               std::size_t budget) {
  const ActuatorLibrary lib = load_library(library_path);
  const MetricKind kind = metric_from_flag(metric_flag);
  const Selection sel = method == "exhaustive"
                            ? exhaustive_select(lib, m, kind, budget)
                            : greedy_select(lib, m, kind);
  io::Json doc = io::Json::object();
  io::Json s = io::Json::array();
  for (int i : sel.S) s.push_back(i);
  doc["S"] = std::move(s);
  doc["metric"] = metric_name(kind);
  doc["method"] = method;
  doc["value"] = finite_or_null(sel.value);
  io::Json singles = io::Json::object();
  for (const auto& [idx, val] : sel.per_singleton_values) {
    singles[std::to_string(idx)] = finite_or_null(val);
  }
  doc["singletons"] = std::move(singles);
  io::Json table = io::Json::array();
  for (const auto& [idx, val] : sel.per_singleton_values) {
    (void)val;
    table.push_back(metric_row(lib, {idx}));
  }
  table.push_back(metric_row(lib, sel.S));
  doc["table"] = std::move(table);
  io::Json warnings = io::Json::array();
  for (const std::string& wmsg : sel.warnings) warnings.push_back(wmsg);
  doc["warnings"] = std::move(warnings);
  out.emit(io::dump_json(doc));
  for (const std::string& wmsg : sel.warnings) {
    std::cerr << "warning: " << wmsg << "\n";
  }
  return 0;
}

int cmd_sweep(const Output& out, const std::string& family_flag, int n_from, int n_to,
              int m, double trace_budget, double coupling,
              const std::string& placement_flag) {
  NetworkFamily family;
  if (family_flag == "line-selfloop") {
    family.kind = FamilyKind::line_selfloop;
  } else if (family_flag == "line-subdiag") {
    family.kind = FamilyKind::line_subdiag;
  } else {
    throw InputError("unknown family \"" + family_flag +
                     "\" (expected line-selfloop or line-subdiag)");
  }
  family.m = m;
  family.trace_budget = trace_budget;
  family.coupling = coupling;
  family.placement = placement_flag == "first" ? PlacementRule::first_nodes
                                               : PlacementRule::optimal_exhaustive;
  const std::vector<SweepRecord> recs = dtc_sweep(family, n_from, n_to);
  out.emit(io::sweep_csv(recs));
  for (const SweepRecord& rec : recs) {
    if (!rec.assumptions_hold) {
      std::cerr << "note: n = " << rec.n
                << ": closed-form bound hypotheses do not hold\n";
    }
  }
  return 0;
}

int cmd_expand(const Output& out, const std::string& system_path) {
  const BilinearSystem sys = load_system(system_path);
  out.emit(io::dump_json(io::expansion_to_json(expand_to_linear(sys))));
  return 0;
}

int cmd_witness(const Output& out, double a, double f, double w) {
  const RatioWitness wit = unbounded_ratio_witness(a, f, w);
  out.emit(io::dump_json(io::witness_to_json(a, f, w, wit)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Reachability Gramians, energy bounds, actuator selection, and scaling sweeps "
      "for discrete-time bilinear networks"};
  app.fallthrough();
  app.require_subcommand(1);

  Output out;
  app.add_option("--output", out.path, "Write the result to this file instead of stdout");

  // gramian
  std::string g_system, g_method = "vec";
  int g_max_order = 200;
  double g_tol = 1e-12;
  CLI::App* gramian = app.add_subcommand(
      "gramian", "Compute the reachability Gramian of a bilinear system");
  gramian->add_option("--system", g_system, "System JSON file")->required();
  gramian->add_option("--method", g_method, "Solver: vec (direct) or series (layered)")
      ->check(CLI::IsMember({"vec", "series"}));
  gramian->add_option("--max-order", g_max_order, "Series order cap");
  gramian->add_option("--tol", g_tol, "Series truncation tolerance");

  // metrics
  std::string me_system;
  CLI::App* metrics = app.add_subcommand(
      "metrics", "Report trace, lambda_min, and determinant of the Gramian");
  metrics->add_option("--system", me_system, "System JSON file")->required();

  // bound
  std::string b_system;
  bool b_emit_psi = false;
  CLI::App* bound = app.add_subcommand(
      "bound", "Compute the admissible input-amplitude cap and its certificate");
  bound->add_option("--system", b_system, "System JSON file")->required();
  bound->add_flag("--emit-psi", b_emit_psi, "Include the certificate weight matrix");

  // simulate
  std::string s_system, s_inputs;
  int s_random_steps = -1;
  std::uint64_t s_seed = 0;
  bool s_check = false;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Drive the system from zero and tabulate energy against the bound");
  simulate->add_option("--system", s_system, "System JSON file")->required();
  simulate->add_option("--inputs", s_inputs, "CSV of input rows (header u1,...,um)");
  simulate->add_option("--random-steps", s_random_steps,
                       "Generate this many random admissible inputs instead")
      ->check(CLI::NonNegativeNumber);
  simulate->add_option("--seed", s_seed, "Seed for --random-steps");
  simulate->add_flag("--check-bound", s_check,
                     "Exit 5 if an admissible trajectory beats the energy bound");

  // select
  std::string sel_library, sel_metric = "trace", sel_method = "greedy";
  int sel_m = 0;
  std::size_t sel_budget = kDefaultSubsetBudget;
  CLI::App* select = app.add_subcommand(
      "select", "Choose actuators from a library by a Gramian metric");
  select->add_option("--library", sel_library, "Actuator library JSON file")->required();
  select->add_option("--m", sel_m, "Number of actuators to choose")->required();
  select->add_option("--metric", sel_metric, "Ranking metric")
      ->check(CLI::IsMember({"trace", "lmin", "logdet"}));
  select->add_option("--method", sel_method, "Search strategy")
      ->check(CLI::IsMember({"greedy", "exhaustive"}));
  select->add_option("--budget", sel_budget, "Subset ceiling for exhaustive search");

  // sweep
  std::string sw_family, sw_placement = "optimal";
  int sw_from = 0, sw_to = 0, sw_m = 3;
  double sw_budget = 0.9, sw_coupling = 0.25;
  CLI::App* sweep = app.add_subcommand(
      "sweep", "Scale a network family over its dimension and tabulate lambda_min");
  sweep->add_option("--family", sw_family, "line-selfloop or line-subdiag")
      ->required()
      ->check(CLI::IsMember({"line-selfloop", "line-subdiag"}));
  sweep->add_option("--n-from", sw_from, "First dimension")->required();
  sweep->add_option("--n-to", sw_to, "Last dimension")->required();
  sweep->add_option("--m", sw_m, "Actuator count (line-selfloop)");
  sweep->add_option("--trace-budget", sw_budget, "Total self-loop modulation weight");
  sweep->add_option("--coupling", sw_coupling, "Line-network edge weight");
  sweep->add_option("--placement", sw_placement, "Actuator placement rule")
      ->check(CLI::IsMember({"optimal", "first"}));

  // expand
  std::string e_system;
  CLI::App* expand = app.add_subcommand(
      "expand", "Linear pair whose reachable space contains the bilinear one");
  expand->add_option("--system", e_system, "System JSON file")->required();

  // witness
  double w_a = 0.0, w_f = 0.0, w_w = 0.0;
  CLI::App* witness = app.add_subcommand(
      "witness", "Two-step input pair defeating a 1/w energy floor (scalar system)");
  witness->add_option("--a", w_a, "State coefficient")->required();
  witness->add_option("--f", w_f, "Modulation coefficient")->required();
  witness->add_option("--w", w_w, "Gramian value whose floor to beat")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (gramian->parsed()) return cmd_gramian(out, g_system, g_method, g_max_order, g_tol);
    if (metrics->parsed()) return cmd_metrics(out, me_system);
    if (bound->parsed()) return cmd_bound(out, b_system, b_emit_psi);
    if (simulate->parsed())
      return cmd_simulate(out, s_system, s_inputs, s_random_steps, s_seed, s_check);
    if (select->parsed())
      return cmd_select(out, sel_library, sel_m, sel_metric, sel_method, sel_budget);
    if (sweep->parsed())
      return cmd_sweep(out, sw_family, sw_from, sw_to, sw_m, sw_budget, sw_coupling,
                       sw_placement);
    if (expand->parsed()) return cmd_expand(out, e_system);
    if (witness->parsed()) return cmd_witness(out, w_a, w_f, w_w);
    std::cerr << "error: no command given\n";
    return 2;
  } catch (const DiscriminantError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const BudgetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 6;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ShapeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const SizeLimitError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}
