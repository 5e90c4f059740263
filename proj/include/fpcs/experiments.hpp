#pragma once
// Experiment drivers behind the command-line tool. Each returns the artifact
// (CSV document or JSON record) with its resolved settings embedded.

#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "fpcs/config.hpp"
#include "fpcs/engine.hpp"
#include "fpcs/io.hpp"
#include "fpcs/overlap.hpp"
#include "fpcs/problems.hpp"
#include "fpcs/schedule.hpp"
#include "fpcs/spectral.hpp"

namespace fpcs {

inline constexpr double kDefaultDelta = 0.1;
inline constexpr std::uint64_t kDefaultSeed = 20240611;

/// Builtin benchmark by name, else a [problem:NAME] section of the config.
inline TestFunction resolve_problem(const std::string& name, const Config* config = nullptr) {
  if (config) {
    if (auto spec = config->custom_problem(name)) return make_custom_problem(*spec);
  }
  if (auto fn = find_builtin(name)) return *fn;
  std::string known;
  for (const TestFunction& f : builtin_suite()) known += (known.empty() ? "" : ", ") + f.name;
  throw ParameterError("unknown problem '" + name + "' (builtins: " + known + ", himmelblau; or define [problem:" + name +
                       "] in the config)");
}

// ---- schedule -------------------------------------------------------------

inline CsvDocument schedule_csv(int q, double delta) {
  const AngleSchedule s = build_schedule(q, delta);
  CsvDocument doc;
  doc.add_meta("version", std::string(kToolVersion));
  doc.add_meta("q", format_number(q));
  doc.add_meta("delta", format_number(delta));
  doc.add_meta("L", format_number(s.L));
  doc.add_meta("eta", format_number(s.eta));
  doc.header = {"j", "alpha", "beta"};
  for (int j = 0; j < q; ++j) doc.rows.push_back({format_number(j + 1), format_number(s.alphas[j]), format_number(s.betas[j])});
  return doc;
}

// ---- search ---------------------------------------------------------------

struct SearchSettings {
  double delta = kDefaultDelta;
  OverlapMethod method = OverlapMethod::grid;
  std::int64_t samples = 1'000'000;
  std::uint64_t seed = kDefaultSeed;
  int resolution = 0;  // 0: the problem's suggested base resolution
  int refine = 4;
  int threads = 0;
  int q_cap = 1'000'000;
};

struct SearchReport {
  std::string problem;
  std::string formula;
  OverlapEstimate estimate;
  bool target_found = false;
  std::optional<int> minimal_q;
  std::optional<int> predicted_q;  // ceil((ln(2/sqrt(delta))/sqrt(lambda) - 1)/2)
  std::optional<double> lower_bound;
  ClassicalBaseline classical;
};

inline OverlapEstimate estimate_overlap(const TestFunction& fn, const SearchSettings& s) {
  const SearchProblem problem = to_search_problem(fn);
  if (s.method == OverlapMethod::monte_carlo) return estimate_lambda_mc(problem, s.samples, s.seed, s.threads);
  return estimate_lambda_grid(problem, s.resolution > 0 ? s.resolution : fn.suggested_grid_resolution, s.refine, s.threads);
}

inline SearchReport search_from_lambda(const TestFunction& fn, const OverlapEstimate& est, const SearchSettings& s) {
  SearchReport r;
  r.problem = fn.name;
  r.formula = fn.formula;
  r.estimate = est;
  r.classical = classical_expected_iterations(est.lambda);
  r.target_found = est.lambda > 0.0;
  if (!r.target_found) return r;
  r.minimal_q = minimal_queries(est.lambda, s.delta, s.q_cap);
  r.predicted_q = required_queries(est.lambda, s.delta);
  r.lower_bound = lower_bound_queries(1.0 - s.delta, est.lambda);
  return r;
}

inline SearchReport run_search(const TestFunction& fn, const SearchSettings& s) {
  detail::require(s.delta > 0.0 && s.delta < 1.0, "search: delta must lie in (0, 1)");
  return search_from_lambda(fn, estimate_overlap(fn, s), s);
}

inline Json settings_json(const SearchSettings& s) {
  Json j;
  j["delta"] = s.delta;
  j["method"] = to_string(s.method);
  if (s.method == OverlapMethod::monte_carlo) {
    j["samples"] = s.samples;
    j["seed"] = s.seed;
  } else {
    j["resolution"] = s.resolution;
    j["refine"] = s.refine;
  }
  j["q_cap"] = s.q_cap;
  return j;
}

inline Json to_json(const SearchReport& r) {
  Json j;
  j["problem"] = r.problem;
  j["formula"] = r.formula;
  j["result"] = r.target_found ? "ok" : "no target region found";
  j["overlap"] = to_json(r.estimate);
  j["lambda"] = r.estimate.lambda;
  j["std_error"] = r.estimate.std_error;
  j["minimal_q"] = r.minimal_q ? Json(*r.minimal_q) : Json(nullptr);
  j["minimal_q_capped"] = r.target_found && !r.minimal_q;
  j["predicted_q"] = r.predicted_q ? Json(*r.predicted_q) : Json(nullptr);
  j["lower_bound"] = r.lower_bound ? Json(*r.lower_bound) : Json(nullptr);
  j["classical_expected"] = r.classical.reachable ? Json(r.classical.iterations) : Json(nullptr);
  j["classical_reachable"] = r.classical.reachable;
  return j;
}

inline Json search_record(const SearchReport& r, const SearchSettings& s) {
  Json j = to_json(r);
  j["version"] = std::string(kToolVersion);
  j["config"] = settings_json(s);
  return j;
}

// ---- sweep / noise --------------------------------------------------------

inline CsvDocument sweep_csv(double lambda, double delta, int q_min, int q_max, bool fixed = true, bool naive = true) {
  detail::require(q_min >= 1 && q_max >= q_min, "sweep: need 1 <= q_min <= q_max");
  detail::require(fixed || naive, "sweep: select at least one of the fixed and naive modes");
  CsvDocument doc;
  doc.add_meta("version", std::string(kToolVersion));
  doc.add_meta("lambda", format_number(lambda));
  doc.add_meta("delta", format_number(delta));
  doc.add_meta("schedule", "per-q");
  doc.header = {"q"};
  if (fixed) doc.header.push_back("p_fixed");
  if (naive) doc.header.push_back("p_naive");
  std::optional<Trace> naive_trace;
  if (naive) naive_trace = run_naive_grover(lambda, q_max);
  for (int q = q_min; q <= q_max; ++q) {
    std::vector<std::string> row{format_number(q)};
    if (fixed) row.push_back(format_number(fixed_point_final_p(lambda, q, delta)));
    if (naive) row.push_back(format_number(naive_trace->points[static_cast<std::size_t>(q - 1)].p));
    doc.rows.push_back(std::move(row));
  }
  return doc;
}

inline CsvDocument noise_csv(double lambda, double delta, const std::vector<double>& depols, int q_max) {
  detail::require(q_max >= 1, "noise: q_max must be at least 1");
  detail::require(!depols.empty(), "noise: depol list is empty");
  CsvDocument doc;
  doc.add_meta("version", std::string(kToolVersion));
  doc.add_meta("lambda", format_number(lambda));
  doc.add_meta("delta", format_number(delta));
  doc.add_meta("schedule", "per-q");
  doc.header = {"depol", "q", "p"};
  for (double d : depols)
    for (int q = 1; q <= q_max; ++q)
      doc.rows.push_back({format_number(d), format_number(q), format_number(noisy_final_p(lambda, q, delta, d))});
  return doc;
}

// ---- table ----------------------------------------------------------------

struct Table1Reference {
  std::string name;
  int quantum = 0;
  double classical = 0.0;
};

inline std::string default_reference_path() {
#ifdef FPCS_DATA_DIR
  return std::string(FPCS_DATA_DIR) + "/table1_reference.csv";
#else
  return "data/table1_reference.csv";
#endif
}

inline std::vector<Table1Reference> load_table1_reference(const std::string& path) {
  const CsvDocument doc = CsvDocument::parse(read_text_file(path));
  const std::size_t nc = doc.column("problem"), qc = doc.column("quantum"), cc = doc.column("classical");
  std::vector<Table1Reference> out;
  for (const auto& r : doc.rows) out.push_back({r[nc], static_cast<int>(parse_double(r[qc])), parse_double(r[cc])});
  return out;
}

struct Table1Row {
  SearchReport report;
  std::optional<Table1Reference> reference;

  std::optional<double> quantum_deviation() const {
    if (!reference || !report.minimal_q) return std::nullopt;
    return (*report.minimal_q - reference->quantum) / static_cast<double>(reference->quantum);
  }
  std::optional<double> classical_deviation() const {
    if (!reference || !report.classical.reachable) return std::nullopt;
    return (report.classical.iterations - reference->classical) / reference->classical;
  }
};

inline std::vector<Table1Row> run_table1(const SearchSettings& s, const std::vector<Table1Reference>* reference = nullptr) {
  std::vector<Table1Row> rows;
  for (const TestFunction& fn : builtin_suite()) {
    Table1Row row;
    row.report = run_search(fn, s);
    if (reference)
      for (const Table1Reference& ref : *reference)
        if (ref.name == fn.name) row.reference = ref;
    rows.push_back(std::move(row));
  }
  return rows;
}

inline CsvDocument table1_csv(const std::vector<Table1Row>& rows, const SearchSettings& s) {
  CsvDocument doc;
  doc.add_meta("version", std::string(kToolVersion));
  doc.add_meta("delta", format_number(s.delta));
  doc.add_meta("method", to_string(s.method));
  if (s.method == OverlapMethod::monte_carlo) {
    doc.add_meta("samples", format_number(s.samples));
    doc.add_meta("seed", fmt::format("{}", s.seed));
  } else {
    doc.add_meta("resolution", s.resolution > 0 ? format_number(s.resolution) : "suggested");
    doc.add_meta("refine", format_number(s.refine));
  }
  doc.header = {"problem", "lambda", "std_error", "quantum_q", "predicted_q", "lower_bound", "classical",
                "ref_quantum", "ref_classical", "dev_quantum", "dev_classical"};
  auto opt = [](const auto& v) { return v ? format_number(*v) : std::string("NA"); };
  for (const Table1Row& r : rows) {
    const SearchReport& rep = r.report;
    doc.rows.push_back({rep.problem, format_number(rep.estimate.lambda), format_number(rep.estimate.std_error), opt(rep.minimal_q),
                        opt(rep.predicted_q), opt(rep.lower_bound),
                        rep.classical.reachable ? format_number(rep.classical.iterations) : std::string("inf"),
                        r.reference ? format_number(r.reference->quantum) : "NA",
                        r.reference ? format_number(r.reference->classical) : "NA", opt(r.quantum_deviation()),
                        opt(r.classical_deviation())});
  }
  return doc;
}

inline std::string table1_text(const std::vector<Table1Row>& rows) {
  std::string out = fmt::format("{:<16} {:>12} {:>8} {:>8} {:>12} {:>10} {:>10}\n", "problem", "lambda", "q", "ref q", "1/lambda",
                                "ref 1/l", "dev 1/l");
  for (const Table1Row& r : rows) {
    const SearchReport& rep = r.report;
    out += fmt::format("{:<16} {:>12.5g} {:>8} {:>8} {:>12.5g} {:>10} {:>10}\n", rep.problem, rep.estimate.lambda,
                       rep.minimal_q ? fmt::format("{}", *rep.minimal_q) : "-",
                       r.reference ? fmt::format("{}", r.reference->quantum) : "-", rep.classical.iterations,
                       r.reference ? fmt::format("{:.4g}", r.reference->classical) : "-",
                       r.classical_deviation() ? fmt::format("{:+.1f}%", 100.0 * *r.classical_deviation()) : "-");
  }
  return out;
}

inline Json table1_json(const std::vector<Table1Row>& rows, const SearchSettings& s) {
  Json j;
  j["version"] = std::string(kToolVersion);
  j["config"] = settings_json(s);
  Json arr = Json::array();
  for (const Table1Row& r : rows) {
    Json row = to_json(r.report);
    if (r.reference) {
      row["ref_quantum"] = r.reference->quantum;
      row["ref_classical"] = r.reference->classical;
    }
    const auto dq = r.quantum_deviation(), dc = r.classical_deviation();
    row["dev_quantum"] = dq ? Json(*dq) : Json(nullptr);
    row["dev_classical"] = dc ? Json(*dc) : Json(nullptr);
    arr.push_back(std::move(row));
  }
  j["rows"] = std::move(arr);
  return j;
}

// ---- spectral -------------------------------------------------------------

struct SpectralSettings {
  OperatorSpec terms{{1.0, 2, 0}, {1.0, 0, 2}};
  ModeGrid grid{256, 8.0};
  SpectralWindow window{0.0, 4.0};
  std::string input = "equal:4";  // equal:K | gaussian:x0,p0,sigma | amplitudes:c0 c1 ...
  double delta = kDefaultDelta;
  int flag_levels = 4;
  int pointer_points = 4096;
  bool gate_check = false;
  double theta1 = 0.3;
  double theta2 = 0.2;
  ModeGrid gate_grid{64, 5.0};
  int gate_states = 10;
  std::uint64_t seed = kDefaultSeed;
};

inline void apply_input_spec(SpectralProblem& p, const std::string& spec) {
  const std::size_t colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string args = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "equal") {
    const auto v = Config::parse_number_list(args, "input");
    detail::require(v.size() == 1 && v[0] == std::floor(v[0]), "spectral input: expected equal:K");
    p.set_equal_superposition(static_cast<int>(v[0]));
  } else if (kind == "gaussian") {
    const auto v = Config::parse_number_list(args, "input");
    detail::require(v.size() == 3 && v[2] > 0.0, "spectral input: expected gaussian:x0,p0,sigma");
    const Eigen::VectorXd x = p.grid.positions();
    Eigen::VectorXcd psi(x.size());
    for (Eigen::Index j = 0; j < x.size(); ++j)
      psi(j) = std::exp(-(x(j) - v[0]) * (x(j) - v[0]) / (4.0 * v[2] * v[2])) * std::exp(Complex(0.0, v[1] * x(j)));
    p.project_wavefunction(psi);
  } else if (kind == "amplitudes") {
    const auto v = Config::parse_number_list(args, "input");
    detail::require(!v.empty() && static_cast<int>(v.size()) <= p.size(), "spectral input: too many amplitudes");
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(p.size());
    for (std::size_t k = 0; k < v.size(); ++k) c(static_cast<Eigen::Index>(k)) = v[k];
    detail::require(c.norm() > 0.0, "spectral input: amplitudes are all zero");
    p.set_amplitudes(c / c.norm());
  } else {
    throw ParameterError("spectral input '" + spec + "': expected equal:K, gaussian:x0,p0,sigma or amplitudes:c0 c1 ...");
  }
}

inline std::string terms_to_string(const OperatorSpec& terms) {
  std::string s;
  for (const OperatorTerm& t : terms) s += (s.empty() ? "" : "; ") + fmt::format("{} {} {}", t.coefficient, t.x_power, t.p_power);
  return s;
}

inline Json run_spectral(const SpectralSettings& s) {
  SpectralProblem p = SpectralProblem::build(s.terms, s.grid, s.window);
  apply_input_spec(p, s.input);
  const SpectralLambda lam = spectral_lambda(p);

  Json j;
  j["version"] = std::string(kToolVersion);
  Json cfg;
  cfg["terms"] = terms_to_string(s.terms);
  cfg["n_points"] = s.grid.n_points;
  cfg["x_max"] = s.grid.x_max;
  cfg["window"] = {s.window.a, s.window.b};
  cfg["input"] = s.input;
  cfg["delta"] = s.delta;
  cfg["flag_levels"] = s.flag_levels;
  cfg["pointer_points"] = s.pointer_points;
  j["config"] = cfg;

  Json spectrum = Json::array();
  for (int k = 0; k < std::min(p.size(), 16); ++k) spectrum.push_back(p.eigen.values(k));
  j["retained_eigenpairs"] = p.size();
  j["spectrum"] = spectrum;
  j["lambda"] = lam.lambda;
  j["states_in_window"] = lam.states_in_window;
  j["empty_window"] = lam.empty_window;

  if (lam.empty_window) {
    j["result"] = "no eigenstate weight in window; search impossible";
    j["minimal_q"] = nullptr;
    j["post_search_in_window_mass"] = 0.0;
  } else {
    const auto q = minimal_queries(lam.lambda, s.delta);
    j["result"] = "ok";
    j["minimal_q"] = q ? Json(*q) : Json(nullptr);
    TwoLevelState st = initial_state(lam.lambda);
    if (q && *q > 0) {
      const AngleSchedule sched = build_schedule(*q, s.delta);
      for (int i = 0; i < *q; ++i) st = apply_iteration(st, sched.alphas[i], sched.betas[i], lam.lambda);
    }
    j["post_search_in_window_mass"] = in_window_mass(p, post_search_distribution(p, st));
  }

  PipelineOptions opt;
  opt.flag_levels = s.flag_levels;
  opt.pointer_points = s.pointer_points;
  const PipelineReport rep = simulate_oracle_pipeline(p, opt);
  Json pipe;
  pipe["pointer_points"] = rep.pointer.n_points;
  pipe["pointer_x_max"] = rep.pointer.x_max;
  pipe["flag_levels"] = rep.flag_levels;
  pipe["all_flags_correct"] = rep.all_flags_correct();
  pipe["min_pointer_fidelity"] = rep.min_fidelity();
  pipe["pointer_purity"] = rep.pointer_purity;
  pipe["max_norm_error"] = rep.max_norm_error;
  pipe["flag_distribution"] = rep.flag_distribution;
  j["oracle_pipeline"] = pipe;

  if (s.gate_check) {
    const GateCheckResult g = verify_gate_decomposition(s.theta1, s.theta2, s.gate_grid, s.gate_states, s.seed);
    Json gj;
    gj["theta1"] = s.theta1;
    gj["theta2"] = s.theta2;
    gj["n_points"] = s.gate_grid.n_points;
    gj["x_max"] = s.gate_grid.x_max;
    gj["states"] = g.states;
    gj["seed"] = s.seed;
    gj["max_infidelity"] = g.max_infidelity;
    gj["reliable"] = g.reliable;
    j["gate_decomposition"] = gj;
  }
  return j;
}

}  // namespace fpcs
