// qcontrol: verification suites and no-go searches for controlling a blackbox unitary.
//
//   qcontrol verify [--target-dim D] [--tolerance EPS]
//   qcontrol nogo residual [--projected] [--cap C] [--ancilla-dim A] [--csv PATH]
//   qcontrol nogo search --gates PRESET [--ancilla-dim A] [--restarts N]
//   qcontrol phase-demo [--phi P ...] [--points N]
//
// Exit codes: 0 pass, 1 check failure, 2 usage error.

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "qcontrol/cli.hpp"

namespace {

using qcontrol::cli::RunConfig;

void add_common(CLI::App &app, RunConfig &cfg) {
  app.add_option("--seed", cfg.seed, "Master seed (default: $QCONTROL_SEED or 42)");
  app.add_option("--output,-o", cfg.output, "Write the report to this path instead of stdout");
  app.add_flag("--omit-timing", cfg.omit_timing, "Write wall-clock fields as null (byte-identical reruns)");
}

void add_dims(CLI::App &app, RunConfig &cfg) {
  app.add_option("--ancilla-dim", cfg.ancilla_dim, "Ancilla dimension a")->check(CLI::PositiveNumber);
  app.add_option("--target-dim", cfg.target_dim, "Target dimension d")->check(CLI::PositiveNumber);
}

void add_minimizer(CLI::App &app, RunConfig &cfg) {
  app.add_option("--restarts", cfg.restarts, "Multistart restarts")->check(CLI::PositiveNumber);
  app.add_option("--max-iters", cfg.max_iters, "Nelder-Mead iterations per restart")->check(CLI::PositiveNumber);
  app.add_option("--workers", cfg.workers, "Concurrent restarts (does not change results)")->check(CLI::PositiveNumber);
}

bool write_text(const std::string &path, const std::string &text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return static_cast<bool>(std::cout);
  }
  std::ofstream f(path, std::ios::binary);
  f << text;
  return static_cast<bool>(f);
}

}  // namespace

int main(int argc, char **argv) {
  RunConfig cfg;
  try {
    cfg.seed = qcontrol::cli::default_seed();
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return qcontrol::cli::kUsageError;
  }

  CLI::App app{"Control of blackbox unitaries: constructions, phase argument and no-go searches"};
  app.require_subcommand(1);
  app.set_version_flag("--version", qcontrol::cli::kVersion);

  std::optional<double> tolerance;

  auto *verify = app.add_subcommand("verify", "Run the construction invariant suite");
  add_common(*verify, cfg);
  verify->add_option("--target-dim", cfg.target_dim, "Target dimension d")->check(CLI::PositiveNumber);
  verify->add_option("--tolerance", tolerance, "Override every tolerance threshold");
  verify->add_option("--samples", cfg.samples, "Random instances per check")->check(CLI::PositiveNumber);

  auto *nogo = app.add_subcommand("nogo", "Obstruction residuals and adversarial search");
  nogo->require_subcommand(1);

  auto *residual = nogo->add_subcommand("residual", "Minimize the {X, Z, H} obstruction residual");
  add_common(*residual, cfg);
  add_minimizer(*residual, cfg);
  residual->add_option("--ancilla-dim", cfg.ancilla_dim, "Ancilla dimension a")->check(CLI::PositiveNumber);
  residual->add_flag("--projected", cfg.projected, "Use the projected (inner-product) form");
  std::optional<double> cap;
  residual->add_option("--cap", cap, "Modulus cap on the projected overlaps (requires --projected)");
  residual->add_option("--csv", cfg.csv, "Landscape CSV path (default: <output>.landscape.csv when --output is set)");
  residual->add_option("--slice-points", cfg.slice_points, "Points per 1-D landscape slice");

  auto *search = nogo->add_subcommand("search", "Adversarial search over circuit unitaries A, B");
  add_common(*search, cfg);
  add_minimizer(*search, cfg);
  add_dims(*search, cfg);
  search->add_option("--gates", cfg.gate_preset, "Gate preset: xzh | haar:<n> | diagonal | singleton:<name>");
  search->add_flag("--fixed-phase", cfg.fixed_phase, "Share one phase u across all gates");
  bool no_warm = false;
  search->add_flag("--no-warm-start", no_warm, "Do not seed the search with known feasible constructions");

  auto *phase = app.add_subcommand("phase-demo", "Phase covariance of circuits vs phase sensitivity of control-U");
  add_common(*phase, cfg);
  add_dims(*phase, cfg);
  phase->add_option("--phi", cfg.phi_grid, "Explicit phase grid");
  phase->add_option("--points", cfg.phi_points, "Evenly spaced points on [0, 2pi] when --phi is absent");
  phase->add_option("--tolerance", tolerance, "Override the row tolerances");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return qcontrol::cli::kUsageError;
  }

  cfg.tolerance = tolerance;
  cfg.cap = cap;
  cfg.warm_start = !no_warm;
  if (verify->parsed()) cfg.command = "verify";
  else if (residual->parsed()) cfg.command = "nogo residual";
  else if (search->parsed()) cfg.command = "nogo search";
  else if (phase->parsed()) cfg.command = "phase-demo";

  qcontrol::cli::CommandResult result;
  try {
    result = qcontrol::cli::run(cfg);
  } catch (const qcontrol::cli::UsageError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return qcontrol::cli::kUsageError;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return qcontrol::cli::kCheckFailure;
  }

  bool ok = true;
  if (cfg.command == "phase-demo") {
    ok = write_text(cfg.output, result.csv);
  } else {
    ok = write_text(cfg.output, result.report.dump(2) + "\n");
    if (cfg.command == "nogo residual" && !result.csv.empty()) {
      std::string csv_path = cfg.csv;
      if (csv_path.empty() && !cfg.output.empty() && cfg.output != "-") csv_path = cfg.output + ".landscape.csv";
      if (!csv_path.empty()) ok = write_text(csv_path, result.csv) && ok;
    }
  }
  if (!ok) {
    std::cerr << "error: failed to write output\n";
    return qcontrol::cli::kCheckFailure;
  }
  return result.exit_code;
}
