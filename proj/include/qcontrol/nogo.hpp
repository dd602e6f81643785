#ifndef QCONTROL_NOGO_HPP
#define QCONTROL_NOGO_HPP

// Numerical probes of the impossibility of controlling an unknown unitary
// with a single-query circuit:
//   - exact-realization and obstruction residuals for the {X, Z, H} linearity argument,
//   - phase covariance of the sandwich vs phase sensitivity of control-U,
//   - a phase-optimized process fidelity against 1 (+) e^{iu} U,
//   - an adversarial multistart search over (A, B).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "qcontrol/circuit.hpp"
#include "qcontrol/constructions.hpp"
#include "qcontrol/optimize.hpp"
#include "qcontrol/random.hpp"
#include "qcontrol/tensor.hpp"

namespace qcontrol {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline double wrap_phase(double phi) {
  double w = std::fmod(phi, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;
  return w;
}

/// ||W(U) - chi x (1_d (+) e^{iu} U)||_F; zero iff the sandwich realizes control-U at (chi, u).
inline double exact_realization_residual(const CircuitSandwich &s, const BlackboxGate &u, const PureState &chi,
                                         double phase) {
  if (chi.dim() != s.ancilla_dim()) throw std::invalid_argument("exact_realization_residual: chi must have dimension a");
  const Matrix target = kron(chi.amplitudes(), control_u(u.matrix() * std::polar(1.0, phase)));
  return (sandwich_operator(s, u) - target).frobenius_norm();
}

// ---------------------------------------------------------------------------
// Obstruction residuals
// ---------------------------------------------------------------------------

/// Free parameters of the linearity obstruction: ancilla states |X>, |Z>, |H>
/// and phases x, z, h (stored wrapped into [0, 2pi)).
struct ObstructionPoint {
  PureState vec_x, vec_z, vec_h;
  double x, z, h;

  ObstructionPoint(PureState vx, PureState vz, PureState vh, double px, double pz, double ph)
      : vec_x(std::move(vx)), vec_z(std::move(vz)), vec_h(std::move(vh)), x(wrap_phase(px)), z(wrap_phase(pz)),
        h(wrap_phase(ph)) {
    if (vec_x.dim() != vec_z.dim() || vec_x.dim() != vec_h.dim())
      throw std::invalid_argument("ObstructionPoint: ancilla states must share a dimension");
  }

  std::size_t ancilla_dim() const noexcept { return vec_x.dim(); }
};

namespace detail {
inline Matrix phased_control(const Matrix &g, double phase) { return control_u(g * std::polar(1.0, phase)); }
}  // namespace detail

/// || |X>(1(+)e^{ix}X)/sqrt2 + |Z>(1(+)e^{iz}Z)/sqrt2 - |H>(1(+)e^{ih}H) ||_F
inline double vector_obstruction_residual(const ObstructionPoint &p) {
  const double r = 1.0 / std::numbers::sqrt2;
  Matrix m = kron(p.vec_x.amplitudes(), detail::phased_control(gates::X(), p.x)) * r;
  m += kron(p.vec_z.amplitudes(), detail::phased_control(gates::Z(), p.z)) * r;
  m -= kron(p.vec_h.amplitudes(), detail::phased_control(gates::H(), p.h));
  return m.frobenius_norm();
}

/// || (cX/sqrt2)(1(+)e^{ix}X) + (cZ/sqrt2)(1(+)e^{iz}Z) - (1(+)e^{ih}H) ||_F with |cX|, |cZ| <= 1.
inline double projected_obstruction_residual(complex c_x, complex c_z, double x, double z, double h) {
  constexpr double slack = 1e-12;
  if (std::abs(c_x) > 1.0 + slack || std::abs(c_z) > 1.0 + slack)
    throw std::invalid_argument("projected_obstruction_residual: overlaps must have modulus <= 1");
  const double r = 1.0 / std::numbers::sqrt2;
  Matrix m = detail::phased_control(gates::X(), x) * (c_x * r);
  m += detail::phased_control(gates::Z(), z) * (c_z * r);
  m -= detail::phased_control(gates::H(), h);
  return m.frobenius_norm();
}

/// Radial clamp of p + iq into the disk of radius cap.
inline complex clamp_to_disk(double p, double q, double cap) {
  const complex c{p, q};
  const double m = std::abs(c);
  return m > cap ? c * (cap / m) : c;
}

struct ObstructionOptions {
  bool projected = false;
  double cap = 1.0;  // modulus cap on cX, cZ (projected only)
};

/// Number of free real coordinates of the obstruction landscape.
inline std::size_t obstruction_dim(std::size_t ancilla_dim, const ObstructionOptions &opt) {
  return opt.projected ? 7 : 6 * ancilla_dim + 3;
}

/// The obstruction residual in unconstrained coordinates.
///
/// projected: (Re cX, Im cX, Re cZ, Im cZ, x, z, h), overlaps clamped into the cap disk.
/// vector:    (|X>, |Z>, |H> as re/im pairs, x, z, h), states normalized here.
inline double obstruction_objective(std::span<const double> v, std::size_t ancilla_dim, const ObstructionOptions &opt) {
  if (v.size() != obstruction_dim(ancilla_dim, opt)) throw std::invalid_argument("obstruction_objective: wrong size");
  if (opt.projected) {
    return projected_obstruction_residual(clamp_to_disk(v[0], v[1], opt.cap), clamp_to_disk(v[2], v[3], opt.cap), v[4],
                                          v[5], v[6]);
  }
  const std::size_t a = ancilla_dim;
  auto state = [&](std::size_t offset) -> std::optional<PureState> {
    Matrix m(a, 1);
    for (std::size_t k = 0; k < a; ++k) m(k, 0) = complex{v[offset + 2 * k], v[offset + 2 * k + 1]};
    const double n = m.frobenius_norm();
    if (!(n > 1e-300)) return std::nullopt;
    return PureState::normalized(m);
  };
  auto sx = state(0), sz = state(2 * a), sh = state(4 * a);
  if (!sx || !sz || !sh) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t ph = 6 * a;
  return vector_obstruction_residual(ObstructionPoint(*sx, *sz, *sh, v[ph], v[ph + 1], v[ph + 2]));
}

/// Minimizes the obstruction residual; the report records, not asserts, how close to zero it gets.
inline SearchReport minimize_obstruction(std::size_t ancilla_dim, const MinimizerConfig &cfg,
                                         const ObstructionOptions &opt = {}) {
  if (ancilla_dim == 0) throw std::invalid_argument("minimize_obstruction: ancilla dimension must be positive");
  if (!opt.projected && opt.cap != 1.0) throw std::invalid_argument("minimize_obstruction: cap requires the projected variant");
  if (!(opt.cap > 0.0 && opt.cap <= 1.0)) throw std::invalid_argument("minimize_obstruction: cap must lie in (0, 1]");
  const Objective f = [ancilla_dim, opt](std::span<const double> v) { return obstruction_objective(v, ancilla_dim, opt); };
  return multistart_minimize(f, obstruction_dim(ancilla_dim, opt), cfg);
}

// ---------------------------------------------------------------------------
// Phase argument
// ---------------------------------------------------------------------------

/// ||W(e^{i phi} U) - e^{i phi} W(U)||_F
inline double phase_covariance_check(const CircuitSandwich &s, const BlackboxGate &u, double phi) {
  const Matrix lhs = sandwich_operator(s, u.matrix() * std::polar(1.0, phi));
  const Matrix rhs = sandwich_operator(s, u.matrix()) * std::polar(1.0, phi);
  return (lhs - rhs).frobenius_norm();
}

/// Trace distance between control-U and control-(e^{i phi}U) applied to |+> x |lambda>,
/// with |lambda> an eigenvector of U. Equals |sin(phi/2)|.
inline double control_phase_distinguishability(const BlackboxGate &u, double phi) {
  const auto eig = unitary_eigen(u.matrix());
  const Matrix lambda = eig.vectors.block(0, 0, u.dim(), 1);
  const double h = 1.0 / std::numbers::sqrt2;
  const Matrix s = kron(Matrix::column({h, h}), lambda);
  const PureState a(control_u(u.matrix()) * s, Tolerance{1e-9});
  const PureState b(control_u(u.matrix() * std::polar(1.0, phi)) * s, Tolerance{1e-9});
  return trace_distance_pure(a, b);
}

// ---------------------------------------------------------------------------
// Process fidelity
// ---------------------------------------------------------------------------

/// Whether e^{iu} may depend on U (maximized per gate) or is a shared fixed phase.
enum class PhaseMode { PerGate, Fixed };

struct ProcessOverlaps {
  std::vector<complex> t0;  // Tr[Pi_0 W_k]
  std::vector<complex> t1;  // Tr[(0 (+) U)^dagger W_k]
  std::size_t d;
};

inline ProcessOverlaps process_overlaps(const CircuitSandwich &s, const BlackboxGate &u) {
  const auto d = s.target_dim();
  const auto kraus = reduced_channel_kraus(s, u);
  const Matrix u_dag = u.matrix().adjoint();
  ProcessOverlaps o{{}, {}, d};
  o.t0.reserve(kraus.size());
  o.t1.reserve(kraus.size());
  for (const auto &w : kraus) {
    complex t0{0.0, 0.0}, t1{0.0, 0.0};
    for (std::size_t i = 0; i < d; ++i) t0 += w(i, i);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) t1 += u_dag(i, j) * w(d + j, d + i);
    o.t0.push_back(t0);
    o.t1.push_back(t1);
  }
  return o;
}

/// (1/(2d)^2) sum_k |t0_k + e^{-iu} t1_k|^2
inline double process_fidelity_at(const ProcessOverlaps &o, double phase) {
  const complex ph = std::polar(1.0, -phase);
  double s = 0.0;
  for (std::size_t k = 0; k < o.t0.size(); ++k) s += std::norm(o.t0[k] + ph * o.t1[k]);
  const double norm = static_cast<double>(4 * o.d * o.d);
  return std::clamp(s / norm, 0.0, 1.0);
}

/// Closed-form max over u: (sum |t0|^2 + |t1|^2 + 2|sum conj(t1) t0|) / (2d)^2.
inline double process_fidelity_max(const ProcessOverlaps &o) {
  double diag = 0.0;
  complex cross{0.0, 0.0};
  for (std::size_t k = 0; k < o.t0.size(); ++k) {
    diag += std::norm(o.t0[k]) + std::norm(o.t1[k]);
    cross += std::conj(o.t1[k]) * o.t0[k];
  }
  const double norm = static_cast<double>(4 * o.d * o.d);
  return std::clamp((diag + 2.0 * std::abs(cross)) / norm, 0.0, 1.0);
}

/// Phase-optimized process fidelity of the reduced channel against 1_d (+) e^{iu} U.
inline double phase_opt_process_fidelity(const CircuitSandwich &s, const BlackboxGate &u) {
  return process_fidelity_max(process_overlaps(s, u));
}

/// Process fidelity at a fixed phase u, built from the explicit target G_u.
inline double process_fidelity_at_phase(const CircuitSandwich &s, const BlackboxGate &u, double phase) {
  const auto d = s.target_dim();
  const Matrix g_dag = control_u(u.matrix() * std::polar(1.0, phase)).adjoint();
  double sum = 0.0;
  for (const auto &w : reduced_channel_kraus(s, u)) sum += std::norm((g_dag * w).trace());
  return sum / static_cast<double>(4 * d * d);
}

/// Grid over u followed by golden-section refinement around the best grid cell.
inline double phase_opt_process_fidelity_grid(const CircuitSandwich &s, const BlackboxGate &u,
                                              std::size_t points = 1024) {
  if (points == 0) throw std::invalid_argument("phase_opt_process_fidelity_grid: need at least one point");
  const double step = kTwoPi / static_cast<double>(points);
  auto f = [&](double ph) { return process_fidelity_at_phase(s, u, ph); };
  double best_u = 0.0, best = f(0.0);
  for (std::size_t k = 1; k < points; ++k) {
    const double ph = step * static_cast<double>(k);
    const double v = f(ph);
    if (v > best) {
      best = v;
      best_u = ph;
    }
  }
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = best_u - step, hi = best_u + step;
  double c = hi - inv_phi * (hi - lo), dpt = lo + inv_phi * (hi - lo);
  double fc = f(c), fd = f(dpt);
  for (int it = 0; it < 80 && hi - lo > 1e-12; ++it) {
    if (fc > fd) {
      hi = dpt;
      dpt = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = dpt;
      fc = fd;
      dpt = lo + inv_phi * (hi - lo);
      fd = f(dpt);
    }
  }
  return std::max({best, fc, fd});
}

// ---------------------------------------------------------------------------
// Gate presets
// ---------------------------------------------------------------------------

inline BlackboxGate named_qubit_gate(const std::string &name) {
  const auto zero = PureState::basis(2, 0);
  if (name == "X") return BlackboxGate(gates::X(), std::nullopt, "X");
  if (name == "Y") return BlackboxGate(gates::Y(), std::nullopt, "Y");
  if (name == "Z") return BlackboxGate(gates::Z(), Eigenpair{zero, 1.0}, "Z");
  if (name == "H") return BlackboxGate(gates::H(), std::nullopt, "H");
  if (name == "S") return BlackboxGate(gates::S(), Eigenpair{zero, 1.0}, "S");
  if (name == "T") return BlackboxGate(gates::T(), Eigenpair{zero, 1.0}, "T");
  if (name == "I") return BlackboxGate(gates::identity(2), Eigenpair{zero, 1.0}, "I");
  throw std::invalid_argument("unknown gate name '" + name + "'");
}

inline constexpr std::uint64_t kHaarStream = 0x48414152ULL;  // "HAAR"

/// Gate-set presets: "xzh", "haar:<n>", "diagonal", "singleton:<name>".
///
/// "diagonal" is {diag(e^{i pi k / m})_k : m = 1, 2, 4}, i.e. {Z, S, T} for d = 2;
/// every member has the eigenpair (|0>, 1).
inline std::vector<BlackboxGate> gate_preset(const std::string &preset, std::size_t d, std::uint64_t seed) {
  if (d == 0) throw std::invalid_argument("gate_preset: target dimension must be positive");
  auto require_qubit = [&] {
    if (d != 2) throw std::invalid_argument("gate preset '" + preset + "' requires target dimension 2");
  };
  if (preset == "xzh") {
    require_qubit();
    return {named_qubit_gate("X"), named_qubit_gate("Z"), named_qubit_gate("H")};
  }
  if (preset == "diagonal") {
    if (d == 2) return {named_qubit_gate("Z"), named_qubit_gate("S"), named_qubit_gate("T")};
    std::vector<BlackboxGate> out;
    for (int m : {1, 2, 4}) {
      std::vector<complex> diag(d);
      for (std::size_t k = 0; k < d; ++k) diag[k] = std::polar(1.0, std::numbers::pi * static_cast<double>(k) / m);
      out.emplace_back(Matrix::diagonal(diag), Eigenpair{PureState::basis(d, 0), 1.0}, "diag" + std::to_string(m));
    }
    return out;
  }
  if (preset.rfind("haar:", 0) == 0) {
    const std::string count = preset.substr(5);
    std::size_t n = 0;
    try {
      std::size_t used = 0;
      n = std::stoul(count, &used);
      if (used != count.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception &) {
      throw std::invalid_argument("gate preset 'haar:<n>' needs a positive integer count");
    }
    if (n == 0) throw std::invalid_argument("gate preset 'haar:<n>' needs a positive integer count");
    std::vector<BlackboxGate> out;
    for (std::size_t i = 0; i < n; ++i) {
      Rng rng(derive_seed(seed, kHaarStream, i));
      out.emplace_back(haar_unitary(d, rng), std::nullopt, "haar" + std::to_string(i));
    }
    return out;
  }
  if (preset.rfind("singleton:", 0) == 0) {
    require_qubit();
    return {named_qubit_gate(preset.substr(10))};
  }
  throw std::invalid_argument("unknown gate preset '" + preset + "'");
}

// ---------------------------------------------------------------------------
// Adversarial search over (A, B)
// ---------------------------------------------------------------------------

struct WarmStart {
  CircuitSandwich sandwich;
  double phase = 0.0;  // shared phase, used in PhaseMode::Fixed only
};

struct AdversarialOptions {
  PhaseMode phase_mode = PhaseMode::PerGate;
  std::vector<WarmStart> warm_starts;
};

inline std::size_t adversarial_dim(std::size_t a, std::size_t d, PhaseMode mode) {
  const auto n = a * 2 * d;
  return 2 * n * n + (mode == PhaseMode::Fixed ? 1 : 0);
}

inline CircuitSandwich decode_sandwich(std::span<const double> v, std::size_t a, std::size_t d) {
  const auto n = a * 2 * d;
  return CircuitSandwich(a, d, params_to_unitary(n, v.subspan(0, n * n)), params_to_unitary(n, v.subspan(n * n, n * n)));
}

inline std::vector<double> encode_sandwich(const CircuitSandwich &s, PhaseMode mode, double phase = 0.0) {
  auto v = unitary_to_params(s.A()).theta;
  const auto b = unitary_to_params(s.B()).theta;
  v.insert(v.end(), b.begin(), b.end());
  if (mode == PhaseMode::Fixed) v.push_back(phase);
  return v;
}

/// Per-gate fidelities of a sandwich (per-gate or shared fixed phase).
inline std::vector<GateFidelity> gate_fidelities(const CircuitSandwich &s, const std::vector<BlackboxGate> &gate_set,
                                                 PhaseMode mode, double fixed_phase = 0.0) {
  std::vector<GateFidelity> out;
  out.reserve(gate_set.size());
  for (std::size_t i = 0; i < gate_set.size(); ++i) {
    const auto o = process_overlaps(s, gate_set[i]);
    const double f = mode == PhaseMode::PerGate ? process_fidelity_max(o) : process_fidelity_at(o, fixed_phase);
    out.push_back({gate_set[i].label().empty() ? "U" + std::to_string(i) : gate_set[i].label(), f});
  }
  return out;
}

inline double worst_case_fidelity(const std::vector<GateFidelity> &per_gate) {
  double m = 1.0;
  for (const auto &g : per_gate) m = std::min(m, g.fidelity);
  return m;
}

/// Maximizes min_U F(U) over (A, B) by minimizing 1 - min_U F(U).
/// The report's per_gate entries are evaluated at the argmin.
inline SearchReport adversarial_search(const std::vector<BlackboxGate> &gate_set, std::size_t a, std::size_t d,
                                       const MinimizerConfig &cfg, const AdversarialOptions &opt = {}) {
  if (gate_set.empty()) throw std::invalid_argument("adversarial_search: empty gate set");
  if (a == 0 || d == 0) throw std::invalid_argument("adversarial_search: dimensions must be positive");
  for (const auto &g : gate_set)
    if (g.dim() != d) throw std::invalid_argument("adversarial_search: every gate must have the target dimension");

  const auto mode = opt.phase_mode;
  const auto n = a * 2 * d;
  const Objective f = [&gate_set, a, d, n, mode](std::span<const double> v) {
    const auto s = decode_sandwich(v.subspan(0, 2 * n * n), a, d);
    const double phase = mode == PhaseMode::Fixed ? v[2 * n * n] : 0.0;
    return 1.0 - worst_case_fidelity(gate_fidelities(s, gate_set, mode, phase));
  };

  std::vector<std::vector<double>> warm;
  for (const auto &w : opt.warm_starts) {
    if (w.sandwich.target_dim() != d)
      throw std::invalid_argument("adversarial_search: warm start has the wrong target dimension");
    warm.push_back(encode_sandwich(embed_sandwich(w.sandwich, a), mode, w.phase));
  }

  auto report = multistart_minimize(f, adversarial_dim(a, d, mode), cfg, warm);
  if (!report.best_params.empty()) {
    const auto s = decode_sandwich(std::span<const double>(report.best_params).subspan(0, 2 * n * n), a, d);
    const double phase = mode == PhaseMode::Fixed ? report.best_params[2 * n * n] : 0.0;
    report.per_gate = gate_fidelities(s, gate_set, mode, phase);
  }
  return report;
}

/// Returns the first eigenpair of gate_set[0] that is an eigenpair of every gate.
inline std::optional<Eigenpair> common_eigenpair(const std::vector<BlackboxGate> &gate_set) {
  if (gate_set.empty()) return std::nullopt;
  const auto eig = unitary_eigen(gate_set.front().matrix());
  const auto d = gate_set.front().dim();
  for (std::size_t k = 0; k < d; ++k) {
    const Matrix e = eig.vectors.block(0, k, d, 1);
    bool shared = true;
    for (const auto &g : gate_set) {
      const Matrix ge = g.matrix() * e;
      const complex lam = (e.adjoint() * ge)(0, 0);
      if ((ge - e * lam).frobenius_norm() > 1e-9) {
        shared = false;
        break;
      }
    }
    if (shared) return Eigenpair{PureState::normalized(e), eig.values[k]};
  }
  return std::nullopt;
}

/// Known feasible sandwiches for a gate set, embedded at ancilla dimension a:
/// the known-unitary construction for a singleton, and eigenstate-swap control
/// when the set shares an eigenvector and a >= d.
inline std::vector<WarmStart> feasible_warm_starts(const std::vector<BlackboxGate> &gate_set, std::size_t a) {
  std::vector<WarmStart> out;
  if (gate_set.empty()) return out;
  const auto d = gate_set.front().dim();
  if (gate_set.size() == 1) out.push_back({embed_sandwich(known_unitary_sandwich(gate_set.front().matrix()), a)});
  if (a >= d) {
    if (auto e = common_eigenpair(gate_set)) out.push_back({kitaev_sandwich(*e, a)});
  }
  return out;
}

/// adversarial_search for a = 1..max_a; each run is warm-started with the
/// previous best sandwich embedded into the larger ancilla, so reported best
/// fidelities are non-decreasing in a (up to chart round-off).
inline std::vector<SearchReport> adversarial_ladder(const std::vector<BlackboxGate> &gate_set, std::size_t max_a,
                                                    std::size_t d, const MinimizerConfig &cfg,
                                                    const AdversarialOptions &opt = {}) {
  std::vector<SearchReport> reports;
  std::optional<WarmStart> previous;
  for (std::size_t a = 1; a <= max_a; ++a) {
    AdversarialOptions run_opt;
    run_opt.phase_mode = opt.phase_mode;
    for (const auto &w : opt.warm_starts)
      if (w.sandwich.ancilla_dim() <= a) run_opt.warm_starts.push_back(w);
    if (previous) run_opt.warm_starts.push_back(*previous);
    reports.push_back(adversarial_search(gate_set, a, d, cfg, run_opt));
    const auto &best = reports.back().best_params;
    if (!best.empty()) {
      const auto n = a * 2 * d;
      const double phase = opt.phase_mode == PhaseMode::Fixed ? best[2 * n * n] : 0.0;
      previous = WarmStart{decode_sandwich(std::span<const double>(best).subspan(0, 2 * n * n), a, d), phase};
    }
  }
  return reports;
}

}  // namespace qcontrol

#endif  // QCONTROL_NOGO_HPP
