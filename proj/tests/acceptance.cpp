// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <thread>

#include "oracles.hpp"
#include "qcontrol/cli.hpp"
#include "qcontrol/nogo.hpp"

using namespace qcontrol;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string &what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

CircuitSandwich random_sandwich(std::size_t a, std::size_t d, Rng &rng) {
  const auto n = a * 2 * d;
  return CircuitSandwich(a, d, haar_unitary(n, rng), haar_unitary(n, rng));
}

Outcome interferometer() {
  Outcome o;
  Rng rng(1001);
  double out_err = 0.0, stage_err = 0.0;
  const std::size_t dims[] = {2, 3, 4, 8};
  for (int t = 0; t < 200; ++t) {
    const std::size_t d = dims[t % 4];
    const BlackboxGate u(haar_unitary(d, rng));
    const auto c = random_state(2, rng);
    const auto psi = random_state(d, rng);
    const auto out = interferometer_apply(u, c[0], c[1], psi);
    const Matrix want = kron(Matrix::column({c[0], 0.0}), psi.amplitudes()) +
                        kron(Matrix::column({0.0, c[1]}), u.matrix() * psi.amplitudes());
    out_err = std::max(out_err, max_abs_difference(out.amplitudes(), want));
    stage_err = std::max(stage_err, max_abs_difference(blackbox_stage_matrix(u), control_u(u)));
  }
  o.require(out_err <= 1e-12, "output error " + fmt(out_err));
  o.require(stage_err == 0.0, "stage error " + fmt(stage_err));
  o.detail = o.detail.empty() ? "max output error " + fmt(out_err) : o.detail;
  return o;
}

Outcome kitaev() {
  Outcome o;
  Rng rng(1002);
  double worst_overlap = 1.0, worst_aux = 0.0;
  for (int t = 0; t < 50; ++t) {
    const BlackboxGate u(haar_unitary(1 + t % 6, rng));
    const auto r = kitaev_control(extend_gate(u, 1));
    worst_overlap = std::min(worst_overlap, r.map_overlap);
    worst_aux = std::max(worst_aux, r.aux_residual);
  }
  o.require(worst_overlap >= 1.0 - 1e-10, "map overlap " + fmt(worst_overlap));
  o.require(worst_aux <= 1e-10, "aux residual " + fmt(worst_aux));
  if (o.pass) o.detail = "min overlap 1-" + fmt(1.0 - worst_overlap) + ", max aux " + fmt(worst_aux);
  return o;
}

Outcome classical() {
  Outcome o;
  std::size_t mismatches = 0, cases = 0;
  for (std::size_t d = 1; d <= 5; ++d)
    for (const auto &perm : cli::all_permutations(d)) {
      const auto u = PermutationGate::from_images(perm);
      const Matrix circuit = classical_control_circuit(u);
      for (unsigned c = 0; c < 2; ++c)
        for (std::size_t x = 0; x < d; ++x) {
          ++cases;
          const auto r = classical_control(u, c, x);
          if (r.out != (c == 0 ? x : perm[x])) ++mismatches;
          if (circuit((c * d + r.garbage) * d + r.out, (c * d + x) * d) != complex{1.0, 0.0}) ++mismatches;
        }
    }
  const double witness = no_cloning_witness(2).max_overlap;
  o.require(mismatches == 0, std::to_string(mismatches) + " mismatches");
  o.require(witness < 0.95, "witness overlap " + fmt(witness));
  if (o.pass) o.detail = std::to_string(cases) + " cases, witness overlap " + fmt(witness);
  return o;
}

Outcome phase_covariance() {
  Outcome o;
  Rng rng(1004);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const auto s = random_sandwich(1 + t % 3, 1 + t % 4, rng);
    const BlackboxGate u(haar_unitary(s.target_dim(), rng));
    for (int k = 0; k < 8; ++k) worst = std::max(worst, phase_covariance_check(s, u, kTwoPi * k / 8));
  }
  o.require(worst <= 1e-12, "residual " + fmt(worst));
  if (o.pass) o.detail = "max residual " + fmt(worst);
  return o;
}

Outcome phase_distinguishability() {
  Outcome o;
  Rng rng(1005);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const BlackboxGate u(haar_unitary(1 + t % 4, rng));
    for (int k = 0; k < 32; ++k) {
      const double phi = kTwoPi * k / 31;
      worst = std::max(worst, std::abs(control_phase_distinguishability(u, phi) - std::abs(std::sin(phi / 2))));
    }
  }
  o.require(worst <= 1e-10, "deviation " + fmt(worst));
  if (o.pass) o.detail = "max deviation " + fmt(worst);
  return o;
}

Outcome fidelity_calibration() {
  Outcome o;
  Rng rng(1006);
  double known = 0.0;
  for (std::size_t d : {1u, 2u, 3u, 4u}) {
    const BlackboxGate u(haar_unitary(d, rng));
    known = std::max(known, std::abs(phase_opt_process_fidelity(known_unitary_sandwich(u.matrix()), u) - 1.0));
  }
  const auto ident = CircuitSandwich::identity(1, 2);
  const BlackboxGate x(gates::X());
  const double closed = phase_opt_process_fidelity(ident, x);
  const double grid = phase_opt_process_fidelity_grid(ident, x, 1024);
  o.require(known <= 1e-10, "known-unitary defect " + fmt(known));
  o.require(std::abs(closed - 0.25) <= 1e-9, "unconditional X " + fmt(closed));
  o.require(std::abs(closed - grid) <= 1e-9, "closed vs grid " + fmt(std::abs(closed - grid)));
  if (o.pass) o.detail = "known-unitary defect " + fmt(known) + ", unconditional X " + fmt(closed);
  return o;
}

Outcome obstruction() {
  Outcome o;
  const MinimizerConfig cfg;  // defaults
  const auto free = minimize_obstruction(1, cfg);
  const double direct = obstruction_objective(free.best_params, 1, {});
  // Direct evaluation at the analytic degenerate point.
  const ObstructionPoint zero(PureState(Matrix::column({std::polar(1.0, std::numbers::pi / 4)})),
                              PureState(Matrix::column({std::polar(1.0, -std::numbers::pi / 4)})),
                              PureState::basis(1, 0), -std::numbers::pi / 4, std::numbers::pi / 4, 0.0);
  const double analytic = vector_obstruction_residual(zero);
  const ObstructionOptions capped{true, 0.9};
  const auto cap = minimize_obstruction(1, cfg, capped);
  const double grid = oracle::capped_projected_grid_min(0.9, 256);
  o.require(free.best_value <= 1e-6, "unconstrained min " + fmt(free.best_value));
  o.require(direct == free.best_value, "argmin re-evaluation differs");
  o.require(analytic <= 1e-12, "analytic point residual " + fmt(analytic));
  o.require(cap.best_value >= 0.05, "capped min " + fmt(cap.best_value));
  o.require(std::abs(cap.best_value - grid) <= 1e-3 && cap.best_value <= grid + 1e-9,
            "capped min " + fmt(cap.best_value) + " vs grid " + fmt(grid));
  if (o.pass) o.detail = "unconstrained " + fmt(free.best_value) + ", capped " + fmt(cap.best_value) + " (grid " + fmt(grid) + ")";
  return o;
}

bool same(const std::vector<SearchReport> &a, const std::vector<SearchReport> &b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].best_value != b[i].best_value || a[i].best_params != b[i].best_params) return false;
    if (a[i].restarts_summary() != b[i].restarts_summary()) return false;
  }
  return true;
}

Outcome adversarial() {
  Outcome o;
  MinimizerConfig cfg;
  const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());

  double singleton = 1.0;
  for (const char *name : {"singleton:X", "singleton:H", "singleton:T"}) {
    const auto set = gate_preset(name, 2, cfg.seed);
    AdversarialOptions opt;
    opt.warm_starts = feasible_warm_starts(set, 1);
    MinimizerConfig small = cfg;
    small.restarts = 4;
    singleton = std::min(singleton, worst_case_fidelity(adversarial_search(set, 1, 2, small, opt).per_gate));
  }

  const auto zst = gate_preset("diagonal", 2, cfg.seed);
  AdversarialOptions zst_opt;
  zst_opt.warm_starts = feasible_warm_starts(zst, 2);
  MinimizerConfig zst_cfg = cfg;
  zst_cfg.restarts = 4;
  zst_cfg.max_iters = 300;
  zst_cfg.workers = hw;
  const double zst_f = worst_case_fidelity(adversarial_search(zst, 2, 2, zst_cfg, zst_opt).per_gate);

  const auto xzh = gate_preset("xzh", 2, cfg.seed);
  cfg.workers = hw;
  const auto t0 = std::chrono::steady_clock::now();
  const auto first = adversarial_ladder(xzh, 2, 2, cfg);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  cfg.workers = 1 + hw / 2;
  const auto second = adversarial_ladder(xzh, 2, 2, cfg);

  o.require(singleton >= 1.0 - 1e-6, "singleton " + fmt(singleton));
  o.require(zst_f >= 1.0 - 1e-4, "{Z,S,T} a=2 " + fmt(zst_f));
  o.require(seconds < 300.0, "{X,Z,H} took " + fmt(seconds) + " s");
  o.require(same(first, second), "{X,Z,H} rerun differs");
  if (o.pass)
    o.detail = "singleton 1-" + fmt(1.0 - singleton) + ", {Z,S,T} 1-" + fmt(1.0 - zst_f) + ", {X,Z,H} a<=2 worst-case " +
               fmt(worst_case_fidelity(first.back().per_gate)) + " in " + fmt(seconds) + " s";
  return o;
}

Outcome determinism() {
  Outcome o;
  std::vector<cli::RunConfig> runs;
  cli::RunConfig base;
  base.omit_timing = true;
  base.restarts = 8;
  base.max_iters = 300;
  for (const char *cmd : {"verify", "nogo residual", "nogo search", "phase-demo"}) {
    auto c = base;
    c.command = cmd;
    runs.push_back(c);
  }
  runs.back().phi_points = 32;
  auto capped = runs[1];
  capped.projected = true;
  capped.cap = 0.9;
  runs.push_back(capped);
  auto ladder = runs[2];
  ladder.ancilla_dim = 2;
  runs.push_back(ladder);

  for (const auto &c : runs) {
    auto text = [](const cli::CommandResult &r) { return (r.report.is_null() ? "" : r.report.dump(2)) + r.csv; };
    const auto a = text(cli::run(c));
    const auto b = text(cli::run(c));
    auto par = c;
    par.workers = 4;
    const auto w = text(cli::run(par));
    o.require(a == b, c.command + " rerun differs");
    o.require(a == w, c.command + " differs under concurrent restarts");
  }
  if (o.pass) o.detail = std::to_string(runs.size()) + " report kinds identical across reruns and worker counts";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char *name;
    double limit_s;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {"interferometer equivalence", 5.0, interferometer},
      {"eigenstate-swap control", 10.0, kitaev},
      {"classical control and no-cloning witness", 5.0, classical},
      {"phase covariance of circuits", 5.0, phase_covariance},
      {"phase distinguishability of control-U", 2.0, phase_distinguishability},
      {"process fidelity calibration", 2.0, fidelity_calibration},
      {"obstruction landscape", 60.0, obstruction},
      {"adversarial search feasible points", 600.0, adversarial},
      {"CLI determinism", 600.0, determinism},
  };

  int failed = 0, index = 0;
  for (const auto &c : criteria) {
    ++index;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception &e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (s >= c.limit_s) o.require(false, "runtime " + fmt(s) + " s exceeds " + fmt(c.limit_s) + " s");
    if (!o.pass) ++failed;
    std::printf("[%s] %d. %s (%.2f s): %s\n", o.pass ? "PASS" : "FAIL", index, c.name, s, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", index - failed, index);
  return failed == 0 ? 0 : 1;
}
