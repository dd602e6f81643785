#ifndef QCONTROL_CIRCUIT_HPP
#define QCONTROL_CIRCUIT_HPP

// Circuit-model objects: the single-query sandwich B (1_a x 1_2 x U) A with
// the ancilla prepared in |0>, and the ideal control-U target 1_d (+) U.
//
// Composite basis ordering everywhere is ancilla x control x target, with
// the ancilla as the most significant index.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qcontrol/tensor.hpp"

namespace qcontrol {

struct Eigenpair {
  PureState vector;
  complex value;
};

/// A d x d unitary that may only be queried, with an optional declared eigenpair.
class BlackboxGate {
public:
  explicit BlackboxGate(Matrix u, std::optional<Eigenpair> eigenpair = std::nullopt, std::string label = {})
      : u_(std::move(u)), eigenpair_(std::move(eigenpair)), label_(std::move(label)) {
    if (!u_.is_square()) throw std::invalid_argument("BlackboxGate: matrix must be square");
    if (!is_unitary(u_, Tolerance{1e-10})) throw std::invalid_argument("BlackboxGate: matrix is not unitary");
    if (eigenpair_) {
      const auto &e = *eigenpair_;
      if (e.vector.dim() != u_.rows()) throw std::invalid_argument("BlackboxGate: eigenvector dimension mismatch");
      if (std::abs(std::abs(e.value) - 1.0) > 1e-10)
        throw std::invalid_argument("BlackboxGate: eigenvalue must have unit modulus");
      const double r = (u_ * e.vector.amplitudes() - e.vector.amplitudes() * e.value).frobenius_norm();
      if (r > 1e-8) throw std::invalid_argument("BlackboxGate: declared eigenpair is not an eigenpair");
    }
  }

  std::size_t dim() const noexcept { return u_.rows(); }
  const Matrix &matrix() const noexcept { return u_; }
  const std::optional<Eigenpair> &known_eigenpair() const noexcept { return eigenpair_; }
  const std::string &label() const noexcept { return label_; }

  /// e^{i phi} U; a declared eigenpair follows the phase.
  BlackboxGate with_phase(double phi) const {
    const complex ph = std::polar(1.0, phi);
    std::optional<Eigenpair> e;
    if (eigenpair_) e = Eigenpair{eigenpair_->vector, eigenpair_->value * ph};
    return BlackboxGate(u_ * ph, std::move(e), label_);
  }

private:
  Matrix u_;
  std::optional<Eigenpair> eigenpair_;
  std::string label_;
};

class CircuitSandwich {
public:
  CircuitSandwich(std::size_t ancilla_dim, std::size_t target_dim, Matrix a, Matrix b)
      : ancilla_dim_(ancilla_dim), target_dim_(target_dim), a_(std::move(a)), b_(std::move(b)) {
    if (ancilla_dim_ == 0 || target_dim_ == 0) throw std::invalid_argument("CircuitSandwich: dimensions must be positive");
    const auto n = composite_dim();
    if (a_.rows() != n || a_.cols() != n || b_.rows() != n || b_.cols() != n)
      throw std::invalid_argument("CircuitSandwich: A and B must be (a*2*d)-square");
    if (!is_unitary(a_, Tolerance{1e-10}) || !is_unitary(b_, Tolerance{1e-10}))
      throw std::invalid_argument("CircuitSandwich: A and B must be unitary");
  }

  /// A = B = 1.
  static CircuitSandwich identity(std::size_t ancilla_dim, std::size_t target_dim) {
    const auto n = ancilla_dim * 2 * target_dim;
    return CircuitSandwich(ancilla_dim, target_dim, Matrix::identity(n), Matrix::identity(n));
  }

  std::size_t ancilla_dim() const noexcept { return ancilla_dim_; }
  std::size_t target_dim() const noexcept { return target_dim_; }
  std::size_t composite_dim() const noexcept { return ancilla_dim_ * 2 * target_dim_; }
  const Matrix &A() const noexcept { return a_; }
  const Matrix &B() const noexcept { return b_; }

private:
  std::size_t ancilla_dim_;
  std::size_t target_dim_;
  Matrix a_;
  Matrix b_;
};

/// 1_d (+) U.
inline Matrix control_u(const Matrix &u) {
  u.require_square("control_u");
  return direct_sum(Matrix::identity(u.rows()), u);
}

inline Matrix control_u(const BlackboxGate &u) { return control_u(u.matrix()); }

/// W(U): the (a*2d) x (2d) isometry B (1_a x 1_2 x U) A restricted to ancilla input |0>.
inline Matrix sandwich_operator(const CircuitSandwich &s, const Matrix &u) {
  if (!u.is_square() || u.rows() != s.target_dim())
    throw std::invalid_argument("sandwich_operator: gate dimension does not match the sandwich target");
  const auto block = 2 * s.target_dim();
  const Matrix a_in = s.A().block(0, 0, s.composite_dim(), block);
  const Matrix slot = kron(Matrix::identity(s.ancilla_dim() * 2), u);
  return s.B() * (slot * a_in);
}

inline Matrix sandwich_operator(const CircuitSandwich &s, const BlackboxGate &u) {
  return sandwich_operator(s, u.matrix());
}

/// W_k = (<k|_a x 1_{2d}) W(U), k = 0..a-1.
inline std::vector<Matrix> reduced_channel_kraus(const CircuitSandwich &s, const Matrix &u) {
  const Matrix w = sandwich_operator(s, u);
  const auto block = 2 * s.target_dim();
  std::vector<Matrix> kraus;
  kraus.reserve(s.ancilla_dim());
  for (std::size_t k = 0; k < s.ancilla_dim(); ++k) kraus.push_back(w.block(k * block, 0, block, block));
  return kraus;
}

inline std::vector<Matrix> reduced_channel_kraus(const CircuitSandwich &s, const BlackboxGate &u) {
  return reduced_channel_kraus(s, u.matrix());
}

/// ||sum_k W_k^dagger W_k - 1||_F
inline double kraus_completeness_residual(const std::vector<Matrix> &kraus) {
  if (kraus.empty()) throw std::invalid_argument("kraus_completeness_residual: empty Kraus set");
  Matrix sum(kraus.front().cols(), kraus.front().cols());
  for (const auto &k : kraus) sum += k.adjoint() * k;
  return (sum - Matrix::identity(sum.rows())).frobenius_norm();
}

/// |<u|v>| >= 1 - eps
inline bool global_phase_equivalent(const PureState &u, const PureState &v, Tolerance tol = Tolerance{}) {
  return std::abs(state_overlap(u, v)) >= 1.0 - tol.eps;
}

/// Sandwich that controls a *known* unitary U0 with a = 1:
/// A = 1, B = control_u(U0) (1_2 x U0^dagger). Queried with U0 it yields control_u(U0).
inline CircuitSandwich known_unitary_sandwich(const Matrix &u0) {
  u0.require_square("known_unitary_sandwich");
  const auto d = u0.rows();
  const Matrix b = control_u(u0) * kron(Matrix::identity(2), u0.adjoint());
  return CircuitSandwich(1, d, Matrix::identity(2 * d), b);
}

/// Re-embeds a sandwich into a larger ancilla as A (+) 1, B (+) 1.
/// W(U) gains zero rows, so the reduced channel is unchanged.
inline CircuitSandwich embed_sandwich(const CircuitSandwich &s, std::size_t ancilla_dim) {
  if (ancilla_dim < s.ancilla_dim()) throw std::invalid_argument("embed_sandwich: cannot shrink the ancilla");
  if (ancilla_dim == s.ancilla_dim()) return s;
  const auto pad = (ancilla_dim - s.ancilla_dim()) * 2 * s.target_dim();
  const Matrix one = Matrix::identity(pad);
  return CircuitSandwich(ancilla_dim, s.target_dim(), direct_sum(s.A(), one), direct_sum(s.B(), one));
}

}  // namespace qcontrol

#endif  // QCONTROL_CIRCUIT_HPP
