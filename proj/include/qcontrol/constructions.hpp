#ifndef QCONTROL_CONSTRUCTIONS_HPP
#define QCONTROL_CONSTRUCTIONS_HPP

// Constructions that do control a blackbox:
//   - the polarization interferometer (blackbox on one arm, i.e. a subspace),
//   - the d'-dimensional direct-sum extension 1_{d'} (+) U,
//   - eigenstate-swap control for a gate with a known eigenpair,
//   - the classical (permutation) control circuit built from cloning gates,
//     and its failure on superposed inputs.

#include <cstddef>
#include <sstream>
#include <utility>
#include <vector>

#include "qcontrol/circuit.hpp"
#include "qcontrol/tensor.hpp"

namespace qcontrol {

// ---------------------------------------------------------------------------
// Interferometer
//
// Register order: polarization (|H>=0, |V>=1) x path (|r>=0 red/lower,
// |b>=1 blue/upper) x internal (d). The photon enters on |r>.
// ---------------------------------------------------------------------------

inline constexpr std::size_t kPolH = 0;
inline constexpr std::size_t kPolV = 1;
inline constexpr std::size_t kPathRed = 0;
inline constexpr std::size_t kPathBlue = 1;

/// Photon state on pol x path x internal.
class PhotonState {
public:
  PhotonState(std::size_t internal_dim, PureState amplitudes)
      : internal_dim_(internal_dim), amp_(std::move(amplitudes)) {
    if (amp_.dim() != 4 * internal_dim_) throw std::invalid_argument("PhotonState: amplitude dimension must be 4*d");
  }

  /// (alpha|H> + beta|V>) x |r> x psi
  static PhotonState prepare(complex alpha, complex beta, const PureState &psi) {
    const Matrix pol = Matrix::column({alpha, beta});
    const Matrix path = Matrix::column({1.0, 0.0});
    return PhotonState(psi.dim(), PureState(kron(kron(pol, path), psi.amplitudes()), Tolerance{1e-9}));
  }

  std::size_t internal_dim() const noexcept { return internal_dim_; }
  const PureState &amplitudes() const noexcept { return amp_; }

  static std::size_t index(std::size_t d, std::size_t pol, std::size_t path, std::size_t k) {
    return (pol * 2 + path) * d + k;
  }

private:
  std::size_t internal_dim_;
  PureState amp_;
};

/// Polarizing beam splitter as a polarization-controlled path flip: |V> flips the path.
inline Matrix pbs_matrix(std::size_t d) {
  return direct_sum(Matrix::identity(2 * d), kron(gates::X(), Matrix::identity(d)));
}

/// |r><r| x 1_d + |b><b| x U on path x internal.
inline Matrix blackbox_stage_matrix(const BlackboxGate &u) {
  const auto d = u.dim();
  Matrix stage(2 * d, 2 * d);
  stage.set_block(kPathRed * d, kPathRed * d, Matrix::identity(d));
  stage.set_block(kPathBlue * d, kPathBlue * d, u.matrix());
  return stage;
}

/// PBS . (1_pol x stage) . PBS on pol x path x internal.
inline Matrix interferometer_matrix(const BlackboxGate &u) {
  const Matrix pbs = pbs_matrix(u.dim());
  return pbs * (kron(Matrix::identity(2), blackbox_stage_matrix(u)) * pbs);
}

struct InterferometerRun {
  PureState output;      // pol x internal
  double path_residual;  // norm of the amplitude left on |b>
};

inline InterferometerRun run_interferometer(const BlackboxGate &u, complex alpha, complex beta, const PureState &psi) {
  if (std::abs(std::norm(alpha) + std::norm(beta) - 1.0) > 1e-10)
    throw std::invalid_argument("interferometer: |alpha|^2 + |beta|^2 must be 1");
  if (psi.dim() != u.dim()) throw std::invalid_argument("interferometer: state dimension does not match the gate");
  const auto d = u.dim();
  const auto in = PhotonState::prepare(alpha, beta, psi);
  const Matrix out = interferometer_matrix(u) * in.amplitudes().amplitudes();

  Matrix reduced(2 * d, 1);
  double leak = 0.0;
  for (std::size_t pol = 0; pol < 2; ++pol)
    for (std::size_t k = 0; k < d; ++k) {
      reduced(pol * d + k, 0) = out(PhotonState::index(d, pol, kPathRed, k), 0);
      leak += std::norm(out(PhotonState::index(d, pol, kPathBlue, k), 0));
    }
  return {PureState(reduced, Tolerance{1e-9}), std::sqrt(leak)};
}

/// Output of the interferometer on pol x internal: alpha|H>psi + beta|V>U psi.
/// Throws if the path register is not restored to |r>.
inline PureState interferometer_apply(const BlackboxGate &u, complex alpha, complex beta, const PureState &psi) {
  auto run = run_interferometer(u, alpha, beta, psi);
  if (run.path_residual > 1e-12) {
    std::ostringstream os;
    os << "interferometer: path register not restored (residual " << run.path_residual << ")";
    throw std::runtime_error(os.str());
  }
  return std::move(run.output);
}

/// Induced operator on pol x internal (the |r> -> |r> block of the full interferometer).
inline Matrix interferometer_operator(const BlackboxGate &u) {
  const auto d = u.dim();
  const Matrix full = interferometer_matrix(u);
  Matrix op(2 * d, 2 * d);
  for (std::size_t p = 0; p < 2; ++p)
    for (std::size_t k = 0; k < d; ++k)
      for (std::size_t q = 0; q < 2; ++q)
        for (std::size_t l = 0; l < d; ++l)
          op(p * d + k, q * d + l) = full(PhotonState::index(d, p, kPathRed, k), PhotonState::index(d, q, kPathRed, l));
  return op;
}

/// 1_{d'} (+) U; d' = 0 returns U.
inline Matrix extend(const BlackboxGate &u, std::size_t d_prime) {
  if (d_prime == 0) return u.matrix();
  return direct_sum(Matrix::identity(d_prime), u.matrix());
}

/// extend() as a gate carrying the eigenpair (|0_ext>, 1).
inline BlackboxGate extend_gate(const BlackboxGate &u, std::size_t d_prime) {
  if (d_prime == 0) return u;
  const auto m = extend(u, d_prime);
  return BlackboxGate(m, Eigenpair{PureState::basis(m.rows(), 0), complex{1.0, 0.0}}, u.label());
}

// ---------------------------------------------------------------------------
// Eigenstate-swap control
// ---------------------------------------------------------------------------

struct KitaevResult {
  Matrix circuit;        // full operator on control x main x aux (2*m*m)
  Matrix induced;        // operator on control x main with aux projected on |e>
  double aux_residual;   // Frobenius norm of everything not returning aux to |e>
  double map_overlap;    // |Tr(control_u(V)^dagger induced)| / (2m)
};

/// Controlled-SWAP of main and aux (both m-dimensional), active on control = 1.
inline Matrix controlled_swap(std::size_t m) { return direct_sum(Matrix::identity(m * m), gates::swap(m)); }

/// Register layout control x main x aux; V is queried once, on aux.
/// Circuit: cSWAP, 1 x 1 x V, cSWAP, then lambda* on the control = 0 sector.
inline KitaevResult kitaev_control(const BlackboxGate &v) {
  if (!v.known_eigenpair()) throw std::invalid_argument("kitaev_control: gate has no known eigenpair");
  const auto &[e, lambda] = *v.known_eigenpair();
  const auto m = v.dim();
  const Matrix cswap = controlled_swap(m);
  const Matrix query = kron(Matrix::identity(2 * m), v.matrix());
  const Matrix correction = direct_sum(Matrix::identity(m * m) * std::conj(lambda), Matrix::identity(m * m));
  Matrix circuit = correction * (cswap * (query * cswap));

  // Project the aux output on |e>, input aux fixed to |e>.
  const Matrix embed = kron(Matrix::identity(2 * m), e.amplitudes());  // (2m*m) x 2m
  const Matrix out = circuit * embed;
  const Matrix induced = embed.adjoint() * out;
  const double aux_residual = (out - embed * induced).frobenius_norm();
  const double overlap = std::abs((control_u(v).adjoint() * induced).trace()) / static_cast<double>(2 * m);
  if (aux_residual > 1e-10) {
    std::ostringstream os;
    os << "kitaev_control: aux register failed to disentangle (residual " << aux_residual << ")";
    throw std::runtime_error(os.str());
  }
  return {std::move(circuit), induced, aux_residual, overlap};
}

/// Unitary whose first column is v; the rest completed by Gram-Schmidt on the standard basis.
inline Matrix unitary_with_first_column(const PureState &v) {
  const auto n = v.dim();
  std::vector<Matrix> cols{v.amplitudes()};
  for (std::size_t k = 0; k < n && cols.size() < n; ++k) {
    Matrix c = PureState::basis(n, k).amplitudes();
    for (const auto &q : cols) c -= q * (q.adjoint() * c)(0, 0);
    const double norm = c.frobenius_norm();
    if (norm > 1e-6) cols.push_back(c * (1.0 / norm));
  }
  Matrix u(n, n);
  for (std::size_t j = 0; j < n; ++j) u.set_block(0, j, cols[j]);
  return u;
}

/// Eigenstate-swap control in sandwich form (requires a >= d).
///
/// A prepares |e> in the first d ancilla levels and swaps it into the target
/// slot on the control = 0 branch; B swaps back and removes lambda from that
/// branch. W(U) = |e>_a x control_u(U) for every U sharing the eigenpair.
inline CircuitSandwich kitaev_sandwich(const Eigenpair &eigenpair, std::size_t ancilla_dim) {
  const auto d = eigenpair.vector.dim();
  const auto a = ancilla_dim;
  if (a < d) throw std::invalid_argument("kitaev_sandwich: ancilla dimension must be >= target dimension");
  const auto n = a * 2 * d;
  auto idx = [&](std::size_t ia, std::size_t c, std::size_t t) { return (ia * 2 + c) * d + t; };

  Matrix cswap0(n, n);
  for (std::size_t ia = 0; ia < a; ++ia)
    for (std::size_t c = 0; c < 2; ++c)
      for (std::size_t t = 0; t < d; ++t) {
        const bool swapped = (c == 0 && ia < d);
        cswap0(swapped ? idx(t, c, ia) : idx(ia, c, t), idx(ia, c, t)) = 1.0;
      }

  Matrix e_embedded(a, 1);
  e_embedded.set_block(0, 0, eigenpair.vector.amplitudes());
  const Matrix prep = unitary_with_first_column(PureState(e_embedded, Tolerance{1e-9}));

  Matrix phase(n, n);
  for (std::size_t ia = 0; ia < a; ++ia)
    for (std::size_t c = 0; c < 2; ++c)
      for (std::size_t t = 0; t < d; ++t) phase(idx(ia, c, t), idx(ia, c, t)) = c == 0 ? std::conj(eigenpair.value) : 1.0;

  const Matrix A = cswap0 * kron(prep, Matrix::identity(2 * d));
  const Matrix B = phase * cswap0;
  return CircuitSandwich(a, d, A, B);
}

// ---------------------------------------------------------------------------
// Classical control
// ---------------------------------------------------------------------------

/// Permutation matrix: exactly one entry equal to 1 in each row and column, zeros elsewhere.
class PermutationGate {
public:
  explicit PermutationGate(Matrix m) : m_(std::move(m)) {
    if (!m_.is_square()) throw std::invalid_argument("PermutationGate: matrix must be square");
    const auto d = m_.rows();
    image_.assign(d, d);
    std::vector<int> row_hits(d, 0);
    for (std::size_t j = 0; j < d; ++j) {
      int col_hits = 0;
      for (std::size_t i = 0; i < d; ++i) {
        const complex z = m_(i, j);
        if (z == complex{1.0, 0.0}) {
          ++col_hits;
          ++row_hits[i];
          image_[j] = i;
        } else if (z != complex{0.0, 0.0}) {
          throw std::invalid_argument("PermutationGate: entries must be exactly 0 or 1");
        }
      }
      if (col_hits != 1) throw std::invalid_argument("PermutationGate: each column needs exactly one 1");
    }
    for (int h : row_hits)
      if (h != 1) throw std::invalid_argument("PermutationGate: each row needs exactly one 1");
  }

  /// From the image list: |x> -> |perm[x]>.
  static PermutationGate from_images(const std::vector<std::size_t> &perm) {
    Matrix m(perm.size(), perm.size());
    for (std::size_t x = 0; x < perm.size(); ++x) {
      if (perm[x] >= perm.size()) throw std::invalid_argument("PermutationGate: image out of range");
      m(perm[x], x) = 1.0;
    }
    return PermutationGate(std::move(m));
  }

  std::size_t dim() const noexcept { return m_.rows(); }
  const Matrix &matrix() const noexcept { return m_; }
  std::size_t operator()(std::size_t x) const { return image_.at(x); }

private:
  Matrix m_;
  std::vector<std::size_t> image_;
};

struct ClassicalOutcome {
  std::size_t out;      // bottom wire
  std::size_t garbage;  // middle wire
  friend bool operator==(const ClassicalOutcome &, const ClassicalOutcome &) = default;
};

/// Basis-state trace of the three-wire circuit (control, middle = x, bottom = 0):
/// clone middle -> bottom if c = 0; U_cl on middle; clone middle -> bottom if c = 1.
inline ClassicalOutcome classical_control(const PermutationGate &u, unsigned c, std::size_t x) {
  if (c > 1) throw std::invalid_argument("classical_control: control must be a bit");
  const auto d = u.dim();
  if (x >= d) throw std::invalid_argument("classical_control: basis index out of range");
  std::size_t middle = x, bottom = 0;
  if (c == 0) bottom = (bottom + middle) % d;
  middle = u(middle);
  if (c == 1) bottom = (bottom + middle) % d;
  return {bottom, middle};
}

/// |x, y> -> |x, y + x mod d>; the qubit case is CNOT.
inline Matrix cloning_gate(std::size_t d) {
  Matrix m(d * d, d * d);
  for (std::size_t x = 0; x < d; ++x)
    for (std::size_t y = 0; y < d; ++y) m(x * d + (y + x) % d, x * d + y) = 1.0;
  return m;
}

/// Full unitary of the classical control circuit on control x middle x bottom.
inline Matrix classical_control_circuit(const PermutationGate &u) {
  const auto d = u.dim();
  const Matrix clone = cloning_gate(d);
  const Matrix one = Matrix::identity(d * d);
  const Matrix clone_if0 = direct_sum(clone, one);
  const Matrix clone_if1 = direct_sum(one, clone);
  const Matrix apply_u = kron(Matrix::identity(2), kron(u.matrix(), Matrix::identity(d)));
  return clone_if1 * (apply_u * clone_if0);
}

inline PureState classical_control_quantum(const PermutationGate &u, const PureState &state) {
  const auto d = u.dim();
  if (state.dim() != 2 * d * d) throw std::invalid_argument("classical_control_quantum: state must have dimension 2*d*d");
  return PureState(classical_control_circuit(u) * state.amplitudes(), Tolerance{1e-9});
}

/// max over unit garbage states g of |<ideal x g | out>|, where ideal lives on
/// control x bottom and g on the middle wire. Equals the norm of the partial contraction.
inline double max_overlap_over_garbage(const PureState &out, const PureState &ideal, std::size_t d) {
  if (out.dim() != 2 * d * d || ideal.dim() != 2 * d)
    throw std::invalid_argument("max_overlap_over_garbage: dimension mismatch");
  double norm2 = 0.0;
  for (std::size_t m = 0; m < d; ++m) {
    complex s{0.0, 0.0};
    for (std::size_t c = 0; c < 2; ++c)
      for (std::size_t b = 0; b < d; ++b) s += std::conj(ideal[c * d + b]) * out[(c * d + m) * d + b];
    norm2 += std::norm(s);
  }
  return std::sqrt(norm2);
}

struct NoCloningWitness {
  PureState input;   // control x middle x bottom
  PureState output;
  PureState ideal;   // control_u(U) applied to control x psi
  double max_overlap;
};

/// Control (|0>+|1>)/sqrt2, psi = (|0>+|1>)/sqrt2, U = cyclic shift; for d = 2 this is U = X, psi = |+>.
inline NoCloningWitness no_cloning_witness(std::size_t d) {
  if (d < 2) throw std::invalid_argument("no_cloning_witness: need d >= 2");
  const auto u = PermutationGate(gates::shift(d));
  const double h = 1.0 / std::numbers::sqrt2;
  Matrix psi(d, 1);
  psi(0, 0) = h;
  psi(1, 0) = h;
  const Matrix control = Matrix::column({h, h});
  const PureState input(kron(kron(control, psi), PureState::basis(d, 0).amplitudes()), Tolerance{1e-9});
  const PureState ideal(control_u(u.matrix()) * kron(control, psi), Tolerance{1e-9});
  auto output = classical_control_quantum(u, input);
  const double ov = max_overlap_over_garbage(output, ideal, d);
  return {input, std::move(output), ideal, ov};
}

}  // namespace qcontrol

#endif  // QCONTROL_CONSTRUCTIONS_HPP
