#ifndef QCONTROL_CLI_HPP
#define QCONTROL_CLI_HPP

// Command implementations behind the `qcontrol` executable. Each command is a
// pure function of its RunConfig and returns the JSON/CSV it would print, so
// reports can be compared in-process.

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qcontrol/circuit.hpp"
#include "qcontrol/constructions.hpp"
#include "qcontrol/nogo.hpp"
#include "qcontrol/optimize.hpp"
#include "qcontrol/random.hpp"

namespace qcontrol::cli {

using json = nlohmann::ordered_json;

inline constexpr const char *kVersion = "0.1.0";
inline constexpr std::uint64_t kDefaultSeed = 42;
inline constexpr const char *kSeedEnv = "QCONTROL_SEED";

enum ExitCode : int { kPass = 0, kCheckFailure = 1, kUsageError = 2 };

/// Raised for invalid flag values; maps to exit code 2.
class UsageError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  std::string command;  // "verify", "nogo residual", "nogo search", "phase-demo"
  std::uint64_t seed = kDefaultSeed;
  std::size_t ancilla_dim = 1;
  std::size_t target_dim = 2;
  std::string gate_preset = "xzh";
  std::size_t restarts = 64;
  std::size_t max_iters = 2000;
  std::size_t workers = 1;
  std::optional<double> tolerance;  // overrides every tolerance-type threshold
  std::size_t samples = 50;         // random instances per verify check
  bool projected = false;
  std::optional<double> cap;
  bool fixed_phase = false;
  bool warm_start = true;
  std::size_t slice_points = 65;
  std::vector<double> phi_grid;
  std::size_t phi_points = 32;
  bool omit_timing = false;
  std::string output;
  std::string csv;

  void validate() const {
    if (ancilla_dim < 1) throw UsageError("--ancilla-dim must be >= 1");
    if (target_dim < 1) throw UsageError("--target-dim must be >= 1");
    if (restarts < 1) throw UsageError("--restarts must be >= 1");
    if (max_iters < 1) throw UsageError("--max-iters must be >= 1");
    if (workers < 1) throw UsageError("--workers must be >= 1");
    if (samples < 1) throw UsageError("--samples must be >= 1");
    if (tolerance && !(*tolerance >= 0.0)) throw UsageError("--tolerance must be >= 0");
    if (cap && !projected) throw UsageError("--cap requires --projected");
    if (cap && !(*cap > 0.0 && *cap <= 1.0)) throw UsageError("--cap must lie in (0, 1]");
    if (phi_points < 1) throw UsageError("--points must be >= 1");
    if (slice_points < 2) throw UsageError("--slice-points must be >= 2");
  }
};

/// Seed from QCONTROL_SEED if set, else the built-in default.
inline std::uint64_t default_seed() {
  const char *env = std::getenv(kSeedEnv);
  if (!env || !*env) return kDefaultSeed;
  std::uint64_t v = 0;
  const std::string s(env);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw UsageError(std::string(kSeedEnv) + " is not a 64-bit unsigned integer");
  return v;
}

/// 17 significant digits, locale independent.
inline std::string format_number(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

struct CommandResult {
  json report;      // empty for CSV-only commands
  std::string csv;  // optional CSV payload
  int exit_code = kPass;
};

class CheckList {
public:
  /// pass iff value <= threshold (NaN fails).
  void upper(std::string name, double value, double threshold) {
    items_.push_back({{"name", std::move(name)}, {"value", value}, {"threshold", threshold}, {"pass", value <= threshold}});
    if (!(value <= threshold)) failed_ = true;
  }
  /// pass iff value < threshold.
  void strict_upper(std::string name, double value, double threshold) {
    items_.push_back({{"name", std::move(name)}, {"value", value}, {"threshold", threshold}, {"pass", value < threshold}});
    if (!(value < threshold)) failed_ = true;
  }
  /// Recorded outcome without an asserted threshold.
  void record(std::string name, double value) {
    items_.push_back({{"name", std::move(name)}, {"value", value}, {"threshold", nullptr}, {"pass", nullptr}});
  }

  json items() const { return json(items_); }
  bool failed() const { return failed_; }

private:
  std::vector<json> items_;
  bool failed_ = false;
};

inline json envelope(const RunConfig &cfg, json config, json results, double wall_time) {
  json j;
  j["command"] = cfg.command;
  j["seed"] = cfg.seed;
  j["config"] = std::move(config);
  j["results"] = std::move(results);
  j["wall_time_s"] = cfg.omit_timing ? json(nullptr) : json(wall_time);
  j["version"] = kVersion;
  return j;
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

inline constexpr std::uint64_t kVerifyStream = 0x564552494659ULL;  // "VERIFY"

/// All permutations of 0..d-1 in lexicographic order.
inline std::vector<std::vector<std::size_t>> all_permutations(std::size_t d) {
  std::vector<std::size_t> p(d);
  std::iota(p.begin(), p.end(), std::size_t{0});
  std::vector<std::vector<std::size_t>> out;
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

inline CommandResult cmd_verify(const RunConfig &cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const auto d = cfg.target_dim;
  const auto tol = [&](double nominal) { return cfg.tolerance.value_or(nominal); };
  CheckList checks;

  // Interferometer vs alpha|H>psi + beta|V>U psi and vs control_u.
  double out_err = 0.0, path_res = 0.0, op_err = 0.0, stage_err = 0.0, law_err = 0.0;
  for (std::size_t i = 0; i < cfg.samples; ++i) {
    Rng rng(derive_seed(cfg.seed, kVerifyStream, i));
    const BlackboxGate u(random_unitary(d, rng));
    const auto ctrl = random_state(2, rng);
    const auto psi = random_state(d, rng);
    const auto run = run_interferometer(u, ctrl[0], ctrl[1], psi);
    const Matrix expected =
        kron(Matrix::column({ctrl[0], 0.0}), psi.amplitudes()) + kron(Matrix::column({0.0, ctrl[1]}), u.matrix() * psi.amplitudes());
    out_err = std::max(out_err, (run.output.amplitudes() - expected).frobenius_norm());
    path_res = std::max(path_res, run.path_residual);
    op_err = std::max(op_err, (interferometer_operator(u) - control_u(u)).frobenius_norm());
    stage_err = std::max(stage_err, max_abs_difference(blackbox_stage_matrix(u), control_u(u)));
    const Matrix v = random_unitary(d, rng);
    law_err = std::max(law_err, (control_u(u.matrix()) * control_u(v) - control_u(u.matrix() * v)).frobenius_norm());
  }
  checks.upper("interferometer_output", out_err, tol(1e-12));
  checks.upper("interferometer_path_residual", path_res, tol(1e-12));
  checks.upper("interferometer_operator_vs_control_u", op_err, tol(1e-12));
  checks.upper("blackbox_stage_vs_control_u", stage_err, 0.0);
  checks.upper("control_u_block_law", law_err, tol(1e-12));

  // Eigenstate-swap control on 1 (+) U and on random declared eigenpairs.
  double ext_overlap = 0.0, ext_aux = 0.0, ext_exact = 0.0, rnd_overlap = 0.0, rnd_aux = 0.0;
  for (std::size_t i = 0; i < cfg.samples; ++i) {
    Rng rng(derive_seed(cfg.seed, kVerifyStream + 1, i));
    const BlackboxGate u(random_unitary(d, rng));
    const auto ext = extend_gate(u, 1);
    const auto r = kitaev_control(ext);
    ext_overlap = std::max(ext_overlap, 1.0 - r.map_overlap);
    ext_aux = std::max(ext_aux, r.aux_residual);
    ext_exact = std::max(ext_exact, (r.induced - control_u(ext)).frobenius_norm());

    const auto eig = unitary_eigen(u.matrix());
    const std::size_t k = i % d;
    const BlackboxGate with_pair(u.matrix(), Eigenpair{PureState::normalized(eig.vectors.block(0, k, d, 1)), eig.values[k]});
    const auto rr = kitaev_control(with_pair);
    rnd_overlap = std::max(rnd_overlap, 1.0 - rr.map_overlap);
    rnd_aux = std::max(rnd_aux, rr.aux_residual);
  }
  checks.upper("kitaev_extended_map_defect", ext_overlap, tol(1e-10));
  checks.upper("kitaev_extended_aux_residual", ext_aux, tol(1e-10));
  checks.upper("kitaev_extended_vs_control_u", ext_exact, tol(1e-10));
  checks.upper("kitaev_random_eigenpair_map_defect", rnd_overlap, tol(1e-10));
  checks.upper("kitaev_random_eigenpair_aux_residual", rnd_aux, tol(1e-10));

  // Classical control: exhaustive contract on basis labels, and agreement of the unitary circuit.
  if (d <= 6) {
    double contract_mismatch = 0.0, quantum_mismatch = 0.0;
    for (const auto &perm : all_permutations(d)) {
      const auto u = PermutationGate::from_images(perm);
      const Matrix circuit = d <= 5 ? classical_control_circuit(u) : Matrix();
      for (unsigned c = 0; c < 2; ++c)
        for (std::size_t x = 0; x < d; ++x) {
          const auto o = classical_control(u, c, x);
          const std::size_t want = c == 0 ? x : u(x);
          if (o.out != want || o.garbage != u(x)) contract_mismatch += 1.0;
          if (d <= 5) {
            const std::size_t in = (c * d + x) * d + 0;
            const std::size_t expect = (c * d + o.garbage) * d + o.out;
            if (circuit(expect, in) != complex{1.0, 0.0}) quantum_mismatch += 1.0;
          }
        }
    }
    checks.upper("classical_control_contract_mismatches", contract_mismatch, 0.0);
    if (d <= 5) checks.upper("classical_circuit_basis_mismatches", quantum_mismatch, 0.0);
  }
  if (d >= 2) checks.strict_upper("no_cloning_witness_max_overlap", no_cloning_witness(d).max_overlap, 0.95);

  json config = {{"target_dim", d}, {"samples", cfg.samples}, {"tolerance", cfg.tolerance ? json(*cfg.tolerance) : json(nullptr)}};
  CommandResult res;
  res.report = envelope(cfg, std::move(config), checks.items(), seconds_since(t0));
  res.exit_code = checks.failed() ? kCheckFailure : kPass;
  return res;
}

// ---------------------------------------------------------------------------
// nogo
// ---------------------------------------------------------------------------

inline MinimizerConfig minimizer_config(const RunConfig &cfg) {
  MinimizerConfig m;
  m.restarts = cfg.restarts;
  m.max_iters = cfg.max_iters;
  m.seed = cfg.seed;
  m.workers = cfg.workers;
  return m;
}

inline json search_report_json(const SearchReport &r, bool omit_timing) {
  json restarts = json::array();
  for (const auto &o : r.restarts)
    restarts.push_back({{"value", o.value},
                        {"iterations", o.iterations},
                        {"evaluations", o.evaluations},
                        {"status", to_string(o.status)},
                        {"warm_start", o.warm_start}});
  json per_gate = json::array();
  for (const auto &g : r.per_gate) per_gate.push_back({{"gate", g.label}, {"fidelity", g.fidelity}});
  json j;
  j["best_value"] = r.best_value;
  j["best_params"] = r.best_params;
  j["per_gate"] = std::move(per_gate);
  j["restarts_summary"] = r.restarts_summary();
  j["restarts"] = std::move(restarts);
  j["seed"] = r.seed;
  j["wall_time_s"] = omit_timing ? json(nullptr) : json(r.wall_time);
  return j;
}

/// Landscape CSV: 1-D slices through the argmin, one block per coordinate.
inline std::string landscape_csv(const std::vector<double> &argmin, std::size_t points,
                                 const std::function<double(std::span<const double>)> &f) {
  std::string out = "param_index,sweep_value,residual\n";
  std::vector<double> x = argmin;
  for (std::size_t i = 0; i < argmin.size(); ++i) {
    for (std::size_t k = 0; k < points; ++k) {
      const double t = -std::numbers::pi + kTwoPi * static_cast<double>(k) / static_cast<double>(points - 1);
      x[i] = argmin[i] + t;
      out += std::to_string(i) + "," + format_number(x[i]) + "," + format_number(f(x)) + "\n";
    }
    x[i] = argmin[i];
  }
  return out;
}

inline CommandResult cmd_nogo_residual(const RunConfig &cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  ObstructionOptions opt;
  opt.projected = cfg.projected;
  opt.cap = cfg.cap.value_or(1.0);
  const auto report = minimize_obstruction(cfg.ancilla_dim, minimizer_config(cfg), opt);

  CheckList checks;
  checks.record("best_value", report.best_value);

  json config = {{"ancilla_dim", cfg.ancilla_dim}, {"projected", cfg.projected}, {"cap", opt.cap},
                 {"restarts", cfg.restarts},       {"max_iters", cfg.max_iters}, {"slice_points", cfg.slice_points}};
  CommandResult res;
  res.report = envelope(cfg, std::move(config), checks.items(), seconds_since(t0));
  res.report["report"] = search_report_json(report, cfg.omit_timing);
  if (!report.best_params.empty()) {
    const auto a = cfg.ancilla_dim;
    res.csv = landscape_csv(report.best_params, cfg.slice_points,
                            [a, opt](std::span<const double> v) { return obstruction_objective(v, a, opt); });
  }
  return res;
}

inline CommandResult cmd_nogo_search(const RunConfig &cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<BlackboxGate> gate_set;
  try {
    gate_set = gate_preset(cfg.gate_preset, cfg.target_dim, cfg.seed);
  } catch (const std::invalid_argument &e) {
    throw UsageError(e.what());
  }

  AdversarialOptions opt;
  opt.phase_mode = cfg.fixed_phase ? PhaseMode::Fixed : PhaseMode::PerGate;
  if (cfg.warm_start) opt.warm_starts = feasible_warm_starts(gate_set, cfg.ancilla_dim);
  const std::size_t n_feasible = opt.warm_starts.size();
  const auto ladder = adversarial_ladder(gate_set, cfg.ancilla_dim, cfg.target_dim, minimizer_config(cfg), opt);

  CheckList checks;
  json ladder_json = json::array();
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    const auto a = i + 1;
    checks.record("worst_case_fidelity[a=" + std::to_string(a) + "]", worst_case_fidelity(ladder[i].per_gate));
    json entry = search_report_json(ladder[i], cfg.omit_timing);
    entry["ancilla_dim"] = a;
    ladder_json.push_back(std::move(entry));
  }
  const auto &final_report = ladder.back();

  json gates = json::array();
  for (const auto &g : gate_set) gates.push_back(g.label());
  json config = {{"gates", cfg.gate_preset},         {"gate_labels", gates},
                 {"ancilla_dim", cfg.ancilla_dim},   {"target_dim", cfg.target_dim},
                 {"restarts", cfg.restarts},         {"max_iters", cfg.max_iters},
                 {"phase_mode", cfg.fixed_phase ? "fixed" : "per_gate"},
                 {"feasible_warm_starts", n_feasible}};
  CommandResult res;
  res.report = envelope(cfg, std::move(config), checks.items(), seconds_since(t0));
  json report = search_report_json(final_report, cfg.omit_timing);
  report["worst_case_fidelity"] = worst_case_fidelity(final_report.per_gate);
  report["ancilla_dim"] = cfg.ancilla_dim;
  report["ladder"] = std::move(ladder_json);
  res.report["report"] = std::move(report);
  return res;
}

// ---------------------------------------------------------------------------
// phase-demo
// ---------------------------------------------------------------------------

inline constexpr std::uint64_t kPhaseDemoStream = 0x5048415345ULL;  // "PHASE"

inline std::vector<double> phase_grid(const RunConfig &cfg) {
  if (!cfg.phi_grid.empty()) return cfg.phi_grid;
  std::vector<double> g(cfg.phi_points);
  if (cfg.phi_points == 1) return {0.0};
  for (std::size_t k = 0; k < cfg.phi_points; ++k)
    g[k] = kTwoPi * static_cast<double>(k) / static_cast<double>(cfg.phi_points - 1);
  return g;
}

/// CSV (phi, lhs_covariance_residual, rhs_trace_distance, sin_half_phi).
/// Exit 1 if lhs > 1e-12 or |rhs - sin_half_phi| > 1e-10 on any row.
inline CommandResult cmd_phase_demo(const RunConfig &cfg) {
  cfg.validate();
  Rng rng(derive_seed(cfg.seed, kPhaseDemoStream, 0));
  const auto n = cfg.ancilla_dim * 2 * cfg.target_dim;
  const CircuitSandwich s(cfg.ancilla_dim, cfg.target_dim, random_unitary(n, rng), random_unitary(n, rng));
  const BlackboxGate u(random_unitary(cfg.target_dim, rng));
  const double lhs_tol = cfg.tolerance.value_or(1e-12), rhs_tol = cfg.tolerance.value_or(1e-10);

  CommandResult res;
  res.csv = "phi,lhs_covariance_residual,rhs_trace_distance,sin_half_phi\n";
  for (double phi : phase_grid(cfg)) {
    const double lhs = phase_covariance_check(s, u, phi);
    const double rhs = control_phase_distinguishability(u, phi);
    const double closed = std::abs(std::sin(phi / 2.0));
    if (!(lhs <= lhs_tol) || !(std::abs(rhs - closed) <= rhs_tol)) res.exit_code = kCheckFailure;
    res.csv += format_number(phi) + "," + format_number(lhs) + "," + format_number(rhs) + "," + format_number(closed) + "\n";
  }
  return res;
}

inline CommandResult run(const RunConfig &cfg) {
  if (cfg.command == "verify") return cmd_verify(cfg);
  if (cfg.command == "nogo residual") return cmd_nogo_residual(cfg);
  if (cfg.command == "nogo search") return cmd_nogo_search(cfg);
  if (cfg.command == "phase-demo") return cmd_phase_demo(cfg);
  throw UsageError("unknown command '" + cfg.command + "'");
}

/// Structural check of a JSON report against the shipped schema
/// (schemas/report.schema.json). Returns an empty string when valid.
inline std::string validate_report(const json &j) {
  if (!j.is_object()) return "report is not an object";
  for (const char *key : {"command", "seed", "config", "results", "wall_time_s", "version"})
    if (!j.contains(key)) return std::string("missing key '") + key + "'";
  for (const auto &[key, _] : j.items())
    if (key != "command" && key != "seed" && key != "config" && key != "results" && key != "wall_time_s" &&
        key != "version" && key != "report")
      return "unexpected key '" + key + "'";
  if (!j["command"].is_string()) return "command must be a string";
  if (!j["seed"].is_number_unsigned()) return "seed must be an unsigned integer";
  if (!j["config"].is_object()) return "config must be an object";
  if (!j["version"].is_string()) return "version must be a string";
  if (!(j["wall_time_s"].is_number() || j["wall_time_s"].is_null())) return "wall_time_s must be a number or null";
  if (!j["results"].is_array()) return "results must be an array";
  for (const auto &r : j["results"]) {
    if (!r.is_object() || r.size() != 4) return "result entries need exactly name, value, threshold, pass";
    if (!r.contains("name") || !r["name"].is_string()) return "result name must be a string";
    if (!r.contains("value") || !(r["value"].is_number() || r["value"].is_null())) return "result value must be a number";
    if (!r.contains("threshold") || !(r["threshold"].is_number() || r["threshold"].is_null()))
      return "result threshold must be a number or null";
    if (!r.contains("pass") || !(r["pass"].is_boolean() || r["pass"].is_null())) return "result pass must be a boolean or null";
  }
  if (j.contains("report") && !j["report"].is_object()) return "report must be an object";
  return {};
}

}  // namespace qcontrol::cli

#endif  // QCONTROL_CLI_HPP
