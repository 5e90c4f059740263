// fpcs: command-line front end for schedules, searches, sweeps, noise
// traces, the benchmark table and spectral window search.

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fpcs/config.hpp"
#include "fpcs/experiments.hpp"
#include "fpcs/io.hpp"

namespace {

using namespace fpcs;

struct Globals {
  std::uint64_t seed = kDefaultSeed;
  std::string output;
  std::string format;
  std::string config_path;
  int threads = 0;
  bool paper_values = false;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* threads_opt = nullptr;
  Config config;
};

// Command-line value if given, else config value, else default.
template <class T>
T pick(const CLI::Option* opt, const T& cli, const Config& cfg, const char* section, const char* key, const T& fallback) {
  if (opt && opt->count() > 0) return cli;
  if (auto v = cfg.get<T>(section, key)) return *v;
  return fallback;
}

void emit(const Globals& g, const CsvDocument& doc, const std::string& default_format = "csv") {
  const std::string fmt = g.format.empty() ? default_format : g.format;
  write_text(g.output, fmt == "json" ? dump_json(doc.to_json()) : doc.str());
}

void flatten(const Json& j, const std::string& prefix, CsvDocument& doc) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, doc);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "." + std::to_string(i), doc);
  } else if (j.is_string()) {
    doc.rows.push_back({prefix, j.get<std::string>()});
  } else if (j.is_number_float()) {
    doc.rows.push_back({prefix, format_number(j.get<double>())});
  } else {
    doc.rows.push_back({prefix, j.dump()});
  }
}

void emit(const Globals& g, const Json& j) {
  if (g.format == "csv") {
    CsvDocument doc;
    doc.header = {"key", "value"};
    flatten(j, "", doc);
    write_text(g.output, doc.str());
    return;
  }
  write_text(g.output, dump_json(j));
}

struct SearchFlags {
  double delta = kDefaultDelta;
  std::string method = "grid";
  std::int64_t samples = 1'000'000;
  int resolution = 0;
  int refine = 4;
  int q_cap = 1'000'000;
  CLI::Option *delta_opt = nullptr, *method_opt = nullptr, *samples_opt = nullptr, *resolution_opt = nullptr,
              *refine_opt = nullptr, *q_cap_opt = nullptr;

  void attach(CLI::App* sub) {
    delta_opt = sub->add_option("--delta", delta, "failure tolerance; success threshold is 1 - delta");
    method_opt = sub->add_option("--method", method, "overlap estimator")->check(CLI::IsMember({"grid", "monte_carlo", "mc"}));
    samples_opt = sub->add_option("--samples", samples, "Monte Carlo samples inside A");
    resolution_opt = sub->add_option("--resolution", resolution, "grid base resolution per axis (0: problem default)");
    refine_opt = sub->add_option("--refine", refine, "grid boundary refinement levels");
    q_cap_opt = sub->add_option("--q-cap", q_cap, "largest query count tried");
  }

  SearchSettings resolve(const Globals& g, const char* section) const {
    SearchSettings s;
    const Config& c = g.config;
    s.delta = pick(delta_opt, delta, c, section, "delta", kDefaultDelta);
    s.method = overlap_method_from_string(pick(method_opt, method, c, section, "method", std::string("grid")));
    s.samples = pick(samples_opt, samples, c, section, "samples", std::int64_t{1'000'000});
    s.resolution = pick(resolution_opt, resolution, c, section, "resolution", 0);
    s.refine = pick(refine_opt, refine, c, section, "refine", 4);
    s.q_cap = pick(q_cap_opt, q_cap, c, section, "q_cap", 1'000'000);
    s.seed = pick(g.seed_opt, g.seed, c, section, "seed", kDefaultSeed);
    s.threads = pick(g.threads_opt, g.threads, c, section, "threads", 0);
    return s;
  }
};

// Overlap from --lambda directly, or estimated for --problem.
double resolve_lambda(const Globals& g, const char* section, const CLI::Option* lambda_opt, double lambda,
                      const CLI::Option* problem_opt, const std::string& problem, const SearchFlags& flags) {
  if (lambda_opt->count() > 0) return lambda;
  std::optional<std::string> name;
  if (problem_opt->count() > 0) name = problem;
  else if (auto v = g.config.get<double>(section, "lambda")) return *v;
  else name = g.config.get<std::string>(section, "problem");
  if (!name) throw ParameterError(std::string(section) + ": give --lambda or --problem");
  const TestFunction fn = resolve_problem(*name, &g.config);
  const OverlapEstimate est = estimate_overlap(fn, flags.resolve(g, section));
  if (est.lambda <= 0.0) throw DomainError(std::string(section) + ": no target region found for problem '" + *name + "'");
  std::cerr << "lambda(" << *name << ") = " << format_number(est.lambda) << "\n";
  return est.lambda;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fixed-point quantum continuous search simulator"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  g.seed_opt = app.add_option("--seed", g.seed, "64-bit RNG seed");
  app.add_option("--output,-o", g.output, "output path (default: standard output)");
  app.add_option("--format", g.format, "artifact format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--config", g.config_path, "INI configuration file")->check(CLI::ExistingFile);
  g.threads_opt = app.add_option("--threads", g.threads, "worker threads (0: all cores)");
  app.add_flag("--paper-values", g.paper_values, "include published reference values and deviations in table1");

  // schedule
  auto* schedule = app.add_subcommand("schedule", "write the phase schedule as j,alpha,beta");
  int q = 1;
  double sched_delta = kDefaultDelta;
  auto* q_opt = schedule->add_option("--q", q, "number of Grover iterations");
  auto* sched_delta_opt = schedule->add_option("--delta", sched_delta, "failure tolerance");

  // search
  auto* search = app.add_subcommand("search", "estimate lambda and the query counts for a problem");
  std::string search_problem = "alpine02";
  auto* search_problem_opt = search->add_option("--problem", search_problem, "builtin or [problem:NAME] from the config");
  SearchFlags search_flags;
  search_flags.attach(search);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "success probability versus q for fixed-point and naive search");
  double sweep_lambda = 0.0;
  std::string sweep_problem;
  int sweep_q_min = 1, sweep_q_max = 100;
  std::vector<std::string> sweep_modes;
  auto* sweep_lambda_opt = sweep->add_option("--lambda", sweep_lambda, "overlap");
  auto* sweep_problem_opt = sweep->add_option("--problem", sweep_problem, "problem whose overlap to use");
  auto* sweep_q_min_opt = sweep->add_option("--q-min", sweep_q_min);
  auto* sweep_q_max_opt = sweep->add_option("--q-max", sweep_q_max);
  sweep->add_option("--modes", sweep_modes, "columns to write")->check(CLI::IsMember({"fixed", "naive"}))->delimiter(',');
  SearchFlags sweep_flags;
  sweep_flags.attach(sweep);

  // noise
  auto* noise = app.add_subcommand("noise", "fixed-point search under per-iteration depolarizing noise");
  double noise_lambda = 0.0;
  std::string noise_problem;
  std::vector<double> depols;
  int noise_q_max = 100;
  auto* noise_lambda_opt = noise->add_option("--lambda", noise_lambda, "overlap");
  auto* noise_problem_opt = noise->add_option("--problem", noise_problem, "problem whose overlap to use");
  auto* depol_opt = noise->add_option("--depol", depols, "depolarizing probabilities")->delimiter(',');
  auto* noise_q_max_opt = noise->add_option("--q-max", noise_q_max);
  SearchFlags noise_flags;
  noise_flags.attach(noise);

  // table1
  auto* table1 = app.add_subcommand("table1", "reproduce the six-function benchmark table");
  std::string reference_path = default_reference_path();
  std::string text_path;
  table1->add_option("--reference", reference_path, "reference values CSV used with --paper-values");
  table1->add_option("--text", text_path, "also write the formatted text table here");
  SearchFlags table_flags;
  table_flags.attach(table1);

  // spectral
  auto* spectral = app.add_subcommand("spectral", "eigenvalue-window search for B = poly(x, p)");
  std::string terms;
  int n_points = 256, flag_levels = 4, pointer_points = 4096, gate_states = 10;
  double x_max = 8.0, spec_delta = kDefaultDelta, theta1 = 0.3, theta2 = 0.2;
  std::vector<double> window;
  std::string input = "equal:4";
  bool gate_check = false;
  auto* terms_opt = spectral->add_option("--terms", terms, "operator terms 'c a b; ...' meaning c x^a p^b");
  auto* n_points_opt = spectral->add_option("--n-points", n_points);
  auto* x_max_opt = spectral->add_option("--x-max", x_max);
  auto* window_opt = spectral->add_option("--window", window, "window a,b")->expected(2)->delimiter(',');
  auto* input_opt = spectral->add_option("--input", input, "equal:K | gaussian:x0,p0,sigma | amplitudes:c0 c1 ...");
  auto* spec_delta_opt = spectral->add_option("--delta", spec_delta);
  auto* flag_levels_opt = spectral->add_option("--flag-levels", flag_levels);
  auto* pointer_points_opt = spectral->add_option("--pointer-points", pointer_points);
  auto* gate_check_opt = spectral->add_flag("--gate-check", gate_check, "also verify the cubic-phase gate identity");
  auto* theta1_opt = spectral->add_option("--theta1", theta1);
  auto* theta2_opt = spectral->add_option("--theta2", theta2);
  auto* gate_states_opt = spectral->add_option("--gate-states", gate_states);

  CLI11_PARSE(app, argc, argv);

  try {
    if (!g.config_path.empty()) g.config = Config::from_file(g.config_path);
    const Config& c = g.config;

    if (schedule->parsed()) {
      const int qq = pick(q_opt, q, c, "schedule", "q", 1);
      const double d = pick(sched_delta_opt, sched_delta, c, "schedule", "delta", kDefaultDelta);
      emit(g, schedule_csv(qq, d));
    } else if (search->parsed()) {
      const std::string name = pick(search_problem_opt, search_problem, c, "search", "problem", std::string("alpine02"));
      const SearchSettings s = search_flags.resolve(g, "search");
      const SearchReport r = run_search(resolve_problem(name, &c), s);
      emit(g, search_record(r, s));
      if (!r.target_found) std::cerr << "search: no target region found for problem '" << name << "'\n";
    } else if (sweep->parsed()) {
      const double lam = resolve_lambda(g, "sweep", sweep_lambda_opt, sweep_lambda, sweep_problem_opt, sweep_problem, sweep_flags);
      const double d = pick(sweep_flags.delta_opt, sweep_flags.delta, c, "sweep", "delta", kDefaultDelta);
      const int lo = pick(sweep_q_min_opt, sweep_q_min, c, "sweep", "q_min", 1);
      const int hi = pick(sweep_q_max_opt, sweep_q_max, c, "sweep", "q_max", 100);
      bool fixed = true, naive = true;
      std::vector<std::string> modes = sweep_modes;
      if (modes.empty())
        if (auto m = c.raw("sweep", "modes")) boost::algorithm::split(modes, *m, boost::algorithm::is_any_of(", "), boost::algorithm::token_compress_on);
      if (!modes.empty()) {
        fixed = std::find(modes.begin(), modes.end(), "fixed") != modes.end();
        naive = std::find(modes.begin(), modes.end(), "naive") != modes.end();
      }
      emit(g, sweep_csv(lam, d, lo, hi, fixed, naive));
    } else if (noise->parsed()) {
      const double lam = resolve_lambda(g, "noise", noise_lambda_opt, noise_lambda, noise_problem_opt, noise_problem, noise_flags);
      const double d = pick(noise_flags.delta_opt, noise_flags.delta, c, "noise", "delta", kDefaultDelta);
      std::vector<double> ds = depols;
      if (depol_opt->count() == 0) ds = c.get_list("noise", "depol").value_or(std::vector<double>{0.0, 0.005, 0.01, 0.02, 0.03});
      const int hi = pick(noise_q_max_opt, noise_q_max, c, "noise", "q_max", 100);
      emit(g, noise_csv(lam, d, ds, hi));
    } else if (table1->parsed()) {
      const SearchSettings s = table_flags.resolve(g, "table1");
      const bool with_reference = g.paper_values || c.get<bool>("table1", "paper_values").value_or(false);
      std::vector<Table1Reference> refs;
      if (with_reference) refs = load_table1_reference(reference_path);
      const auto rows = run_table1(s, with_reference ? &refs : nullptr);
      if (g.format == "json") emit(g, table1_json(rows, s));
      else emit(g, table1_csv(rows, s));
      const std::string text = table1_text(rows);
      if (!text_path.empty()) write_text(text_path, text);
      else if (!g.output.empty() && g.output != "-") std::cout << text;
    } else if (spectral->parsed()) {
      SpectralSettings s;
      if (terms_opt->count() > 0) s.terms = Config::parse_operator_terms(terms);
      else if (auto t = c.raw("spectral", "terms")) s.terms = Config::parse_operator_terms(*t);
      s.grid.n_points = pick(n_points_opt, n_points, c, "spectral", "n_points", 256);
      s.grid.x_max = pick(x_max_opt, x_max, c, "spectral", "x_max", 8.0);
      std::vector<double> w = window;
      if (window_opt->count() == 0) w = c.get_list("spectral", "window").value_or(std::vector<double>{0.0, 4.0});
      if (w.size() != 2) throw ParameterError("spectral: window needs exactly two numbers a,b");
      s.window = {w[0], w[1]};
      s.input = pick(input_opt, input, c, "spectral", "input", std::string("equal:4"));
      s.delta = pick(spec_delta_opt, spec_delta, c, "spectral", "delta", kDefaultDelta);
      s.flag_levels = pick(flag_levels_opt, flag_levels, c, "spectral", "flag_levels", 4);
      s.pointer_points = pick(pointer_points_opt, pointer_points, c, "spectral", "pointer_points", 4096);
      s.gate_check = pick(gate_check_opt, gate_check, c, "spectral", "gate_check", false);
      s.theta1 = pick(theta1_opt, theta1, c, "spectral", "theta1", 0.3);
      s.theta2 = pick(theta2_opt, theta2, c, "spectral", "theta2", 0.2);
      s.gate_states = pick(gate_states_opt, gate_states, c, "spectral", "gate_states", 10);
      s.seed = pick(g.seed_opt, g.seed, c, "spectral", "seed", kDefaultSeed);
      emit(g, run_spectral(s));
    }
  } catch (const std::exception& e) {
    std::cerr << "fpcs: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
