#ifndef QCONTROL_TENSOR_HPP
#define QCONTROL_TENSOR_HPP

// Dense complex linear algebra for small operators (side <= 64).
//
// Storage is row-major. All residuals in this library are Frobenius norms.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qcontrol {

using complex = std::complex<double>;

inline constexpr complex I{0.0, 1.0};

/// Absolute tolerance used by the validation predicates.
struct Tolerance {
  double eps = 1e-10;

  explicit constexpr Tolerance(double e = 1e-10) : eps(e) {
    if (!(e >= 0.0)) throw std::invalid_argument("Tolerance: eps must be >= 0");
  }
};

class Matrix {
public:
  Matrix() = default;

  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, complex{0.0, 0.0}) {
    if (rows == 0 || cols == 0) throw std::invalid_argument("Matrix: dimensions must be positive");
  }

  Matrix(std::size_t rows, std::size_t cols, std::vector<complex> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (rows == 0 || cols == 0) throw std::invalid_argument("Matrix: dimensions must be positive");
    if (data_.size() != rows * cols) throw std::invalid_argument("Matrix: entry count != rows*cols");
    check_finite();
  }

  Matrix(std::initializer_list<std::initializer_list<complex>> rows) {
    rows_ = rows.size();
    cols_ = rows.size() ? rows.begin()->size() : 0;
    if (rows_ == 0 || cols_ == 0) throw std::invalid_argument("Matrix: dimensions must be positive");
    data_.reserve(rows_ * cols_);
    for (const auto &r : rows) {
      if (r.size() != cols_) throw std::invalid_argument("Matrix: ragged initializer");
      data_.insert(data_.end(), r.begin(), r.end());
    }
    check_finite();
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static Matrix zeros(std::size_t rows, std::size_t cols) { return Matrix(rows, cols); }

  static Matrix diagonal(const std::vector<complex> &d) {
    Matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  /// Column vector from amplitudes.
  static Matrix column(std::vector<complex> v) {
    const auto n = v.size();
    return Matrix(n, 1, std::move(v));
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool is_square() const noexcept { return rows_ == cols_; }

  complex &operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const complex &operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  const std::vector<complex> &data() const noexcept { return data_; }
  std::vector<complex> &data() noexcept { return data_; }

  bool all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(),
                       [](const complex &z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
  }

  Matrix adjoint() const {
    Matrix r(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) r(j, i) = std::conj((*this)(i, j));
    return r;
  }

  Matrix transpose() const {
    Matrix r(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
    return r;
  }

  complex trace() const {
    require_square("trace");
    complex t{0.0, 0.0};
    for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
    return t;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (const auto &z : data_) s += std::norm(z);
    return std::sqrt(s);
  }

  /// Contiguous sub-block copy.
  Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    if (r0 + nr > rows_ || c0 + nc > cols_) throw std::out_of_range("Matrix::block out of range");
    Matrix b(nr, nc);
    for (std::size_t i = 0; i < nr; ++i)
      for (std::size_t j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
    return b;
  }

  void set_block(std::size_t r0, std::size_t c0, const Matrix &b) {
    if (r0 + b.rows() > rows_ || c0 + b.cols() > cols_) throw std::out_of_range("Matrix::set_block out of range");
    for (std::size_t i = 0; i < b.rows(); ++i)
      for (std::size_t j = 0; j < b.cols(); ++j) (*this)(r0 + i, c0 + j) = b(i, j);
  }

  Matrix &operator+=(const Matrix &o) {
    require_same_shape(o, "+");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }

  Matrix &operator-=(const Matrix &o) {
    require_same_shape(o, "-");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }

  Matrix &operator*=(complex s) {
    for (auto &z : data_) z *= s;
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix &b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix &b) { return a -= b; }
  friend Matrix operator*(Matrix a, complex s) { return a *= s; }
  friend Matrix operator*(complex s, Matrix a) { return a *= s; }
  friend Matrix operator-(Matrix a) { return a *= -1.0; }

  friend Matrix operator*(const Matrix &a, const Matrix &b) {
    if (a.cols_ != b.rows_) {
      std::ostringstream os;
      os << "Matrix product shape mismatch: " << a.rows_ << "x" << a.cols_ << " * " << b.rows_ << "x" << b.cols_;
      throw std::invalid_argument(os.str());
    }
    Matrix r(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const complex aik = a(i, k);
        if (aik == complex{0.0, 0.0}) continue;
        const complex *brow = &b.data_[k * b.cols_];
        complex *rrow = &r.data_[i * r.cols_];
        for (std::size_t j = 0; j < b.cols_; ++j) rrow[j] += aik * brow[j];
      }
    }
    return r;
  }

  friend bool operator==(const Matrix &a, const Matrix &b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  void require_square(const char *what) const {
    if (!is_square()) throw std::invalid_argument(std::string(what) + ": matrix must be square");
  }

private:
  void require_same_shape(const Matrix &o, const char *op) const {
    if (rows_ != o.rows_ || cols_ != o.cols_)
      throw std::invalid_argument(std::string("Matrix shape mismatch in operator") + op);
  }

  void check_finite() const {
    if (!all_finite()) throw std::invalid_argument("Matrix: non-finite entry");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<complex> data_;
};

using ComplexMatrix = Matrix;

inline double frobenius_distance(const Matrix &a, const Matrix &b) { return (a - b).frobenius_norm(); }

inline double max_abs_difference(const Matrix &a, const Matrix &b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("max_abs_difference: shape mismatch");
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a.data()[k] - b.data()[k]));
  return m;
}

/// Kronecker product, index convention (iA*rB + iB, jA*cB + jB).
inline Matrix kron(const Matrix &a, const Matrix &b) {
  const auto rb = b.rows(), cb = b.cols();
  Matrix r(a.rows() * rb, a.cols() * cb);
  for (std::size_t ia = 0; ia < a.rows(); ++ia)
    for (std::size_t ja = 0; ja < a.cols(); ++ja) {
      const complex s = a(ia, ja);
      if (s == complex{0.0, 0.0}) continue;
      for (std::size_t ib = 0; ib < rb; ++ib)
        for (std::size_t jb = 0; jb < cb; ++jb) r(ia * rb + ib, ja * cb + jb) = s * b(ib, jb);
    }
  return r;
}

/// Block-diagonal A (upper-left) with B (lower-right).
inline Matrix direct_sum(const Matrix &a, const Matrix &b) {
  if (!a.is_square() || !b.is_square()) throw std::invalid_argument("direct_sum: inputs must be square");
  Matrix r(a.rows() + b.rows(), a.rows() + b.rows());
  r.set_block(0, 0, a);
  r.set_block(a.rows(), a.rows(), b);
  return r;
}

inline double hermiticity_residual(const Matrix &m) {
  m.require_square("hermiticity_residual");
  return (m - m.adjoint()).frobenius_norm();
}

inline double unitarity_residual(const Matrix &m) {
  m.require_square("unitarity_residual");
  return (m.adjoint() * m - Matrix::identity(m.rows())).frobenius_norm();
}

/// True iff ||M^dagger M - 1||_F <= tol.eps * dim.
inline bool is_unitary(const Matrix &m, Tolerance tol = Tolerance{}) {
  if (!m.is_square()) throw std::invalid_argument("is_unitary: matrix must be square");
  return unitarity_residual(m) <= tol.eps * static_cast<double>(m.rows());
}

/// Columns of M are orthonormal: ||M^dagger M - 1||_F <= tol.eps * cols.
inline bool is_isometry(const Matrix &m, Tolerance tol = Tolerance{}) {
  const auto r = (m.adjoint() * m - Matrix::identity(m.cols())).frobenius_norm();
  return r <= tol.eps * static_cast<double>(m.cols());
}

inline bool is_hermitian(const Matrix &m, Tolerance tol = Tolerance{}) {
  if (!m.is_square()) return false;
  return hermiticity_residual(m) <= tol.eps * static_cast<double>(m.rows());
}

struct HermitianEigen {
  std::vector<double> values;  // ascending
  Matrix vectors;              // columns are eigenvectors
};

/// Cyclic complex Jacobi eigensolver for Hermitian matrices.
///
/// Each rotation first removes the phase of the pivot with a diagonal unitary,
/// then applies a real Givens rotation. Sweeps stop once the off-diagonal
/// Frobenius norm drops to 1e-14 (relative to max(1, ||H||_F)).
inline HermitianEigen hermitian_eigen(const Matrix &h, Tolerance tol = Tolerance{}) {
  if (!h.is_square()) throw std::invalid_argument("hermitian_eigen: matrix must be square");
  if (!is_hermitian(h, tol)) {
    std::ostringstream os;
    os << "hermitian_eigen: input is not Hermitian (||H - H^dagger||_F = " << hermiticity_residual(h) << ")";
    throw std::invalid_argument(os.str());
  }
  const std::size_t n = h.rows();
  // Symmetrize so that tolerated asymmetry does not leak into the result.
  Matrix a = (h + h.adjoint()) * 0.5;
  Matrix v = Matrix::identity(n);

  auto off_norm = [&]() {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
  };

  const double threshold = 1e-14 * std::max(1.0, a.frobenius_norm());
  constexpr int max_sweeps = 100;
  for (int sweep = 0; sweep < max_sweeps && off_norm() > threshold; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const complex apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag < 1e-300) continue;
        const complex phase = apq / mag;  // e^{i alpha}
        const double app = a(p, p).real(), aqq = a(q, q).real();
        const double theta = 0.5 * std::atan2(2.0 * mag, aqq - app);
        const double c = std::cos(theta), s = std::sin(theta);
        const complex em = std::conj(phase);  // e^{-i alpha}
        // G = diag(1, e^{-i alpha}) * [[c, s], [-s, c]] on the (p, q) plane.
        const complex gpp = c, gpq = s, gqp = -s * em, gqq = c * em;
        for (std::size_t k = 0; k < n; ++k) {
          const complex akp = a(k, p), akq = a(k, q);
          a(k, p) = akp * gpp + akq * gqp;
          a(k, q) = akp * gpq + akq * gqq;
          const complex vkp = v(k, p), vkq = v(k, q);
          v(k, p) = vkp * gpp + vkq * gqp;
          v(k, q) = vkp * gpq + vkq * gqq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const complex apk = a(p, k), aqk = a(q, k);
          a(p, k) = std::conj(gpp) * apk + std::conj(gqp) * aqk;
          a(q, k) = std::conj(gpq) * apk + std::conj(gqq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
      }
    }
  }

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x).real() < a(y, y).real(); });
  HermitianEigen out{std::vector<double>(n), Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]).real();
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

/// exp(iH) for Hermitian H via eigendecomposition.
inline Matrix expi_hermitian(const Matrix &h, Tolerance tol = Tolerance{}) {
  const auto eig = hermitian_eigen(h, tol);
  const std::size_t n = h.rows();
  Matrix scaled = eig.vectors;
  for (std::size_t j = 0; j < n; ++j) {
    const complex ph = std::polar(1.0, eig.values[j]);
    for (std::size_t i = 0; i < n; ++i) scaled(i, j) *= ph;
  }
  return scaled * eig.vectors.adjoint();
}

struct UnitaryEigen {
  std::vector<complex> values;
  Matrix vectors;  // unitary, columns are eigenvectors
};

/// Spectral decomposition of a unitary (normal) matrix.
///
/// The Hermitian and anti-Hermitian parts commute, so a generic real
/// combination of them shares the eigenbasis of U. A few combinations are
/// tried in turn in case one of them is accidentally degenerate across
/// distinct eigenphases.
inline UnitaryEigen unitary_eigen(const Matrix &u, Tolerance tol = Tolerance{}) {
  if (!is_unitary(u, tol)) throw std::invalid_argument("unitary_eigen: matrix is not unitary");
  const std::size_t n = u.rows();
  const Matrix herm = (u + u.adjoint()) * 0.5;
  const Matrix anti = (u - u.adjoint()) * complex{0.0, -0.5};
  double best_residual = 0.0;
  for (double kappa : {0.6180339887498949, 1.3247179572447460, 0.2763932022500210, 2.4142135623730950}) {
    const auto eig = hermitian_eigen(herm + anti * kappa);
    const Matrix d = eig.vectors.adjoint() * u * eig.vectors;
    std::vector<complex> vals(n);
    for (std::size_t k = 0; k < n; ++k) vals[k] = d(k, k);
    const double residual = (d - Matrix::diagonal(vals)).frobenius_norm();
    if (residual <= 1e-10 * static_cast<double>(n)) {
      for (auto &z : vals) z /= std::abs(z);
      return {std::move(vals), eig.vectors};
    }
    best_residual = residual;
  }
  std::ostringstream os;
  os << "unitary_eigen: failed to diagonalize (residual " << best_residual << ")";
  throw std::runtime_error(os.str());
}

/// Hermitian G with exp(iG) = U and spectrum in (-pi, pi].
inline Matrix unitary_log(const Matrix &u, Tolerance tol = Tolerance{}) {
  const auto eig = unitary_eigen(u, tol);
  std::vector<complex> phases(eig.values.size());
  for (std::size_t k = 0; k < phases.size(); ++k) phases[k] = std::arg(eig.values[k]);
  return eig.vectors * Matrix::diagonal(phases) * eig.vectors.adjoint();
}

namespace gates {

inline Matrix identity(std::size_t d) { return Matrix::identity(d); }
inline Matrix X() { return Matrix{{0.0, 1.0}, {1.0, 0.0}}; }
inline Matrix Y() { return Matrix{{0.0, -I}, {I, 0.0}}; }
inline Matrix Z() { return Matrix{{1.0, 0.0}, {0.0, -1.0}}; }
inline Matrix H() { return (X() + Z()) * (1.0 / std::numbers::sqrt2); }
inline Matrix S() { return Matrix{{1.0, 0.0}, {0.0, I}}; }
inline Matrix T() { return Matrix{{1.0, 0.0}, {0.0, std::polar(1.0, std::numbers::pi / 4.0)}}; }

/// Cyclic shift |k> -> |k+1 mod d>.
inline Matrix shift(std::size_t d) {
  Matrix m(d, d);
  for (std::size_t k = 0; k < d; ++k) m((k + 1) % d, k) = 1.0;
  return m;
}

/// SWAP of two d-dimensional registers.
inline Matrix swap(std::size_t d) {
  Matrix m(d * d, d * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) m(j * d + i, i * d + j) = 1.0;
  return m;
}

}  // namespace gates

struct NamedGate {
  std::string name;
  Matrix matrix;
};

/// X, Z, H = (X+Z)/sqrt2 and the qubit identity.
inline std::vector<NamedGate> standard_gates() {
  return {{"I", gates::identity(2)}, {"X", gates::X()}, {"Z", gates::Z()}, {"H", gates::H()}};
}

/// Unit-norm column vector.
class PureState {
public:
  explicit PureState(Matrix amplitudes, Tolerance tol = Tolerance{}) : amp_(std::move(amplitudes)) {
    if (amp_.cols() != 1) throw std::invalid_argument("PureState: amplitudes must be a column");
    const double n = amp_.frobenius_norm();
    if (std::abs(n - 1.0) > tol.eps) {
      std::ostringstream os;
      os << "PureState: norm " << n << " deviates from 1";
      throw std::invalid_argument(os.str());
    }
  }

  PureState(std::initializer_list<complex> amps) : PureState(Matrix::column(std::vector<complex>(amps))) {}

  static PureState basis(std::size_t dim, std::size_t k) {
    if (k >= dim) throw std::invalid_argument("PureState::basis: index out of range");
    Matrix m(dim, 1);
    m(k, 0) = 1.0;
    return PureState(std::move(m));
  }

  /// Rescales a nonzero column to unit norm.
  static PureState normalized(const Matrix &v) {
    const double n = v.frobenius_norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw std::invalid_argument("PureState::normalized: zero or non-finite vector");
    return PureState(v * (1.0 / n));
  }

  std::size_t dim() const noexcept { return amp_.rows(); }
  const Matrix &amplitudes() const noexcept { return amp_; }
  const complex &operator[](std::size_t k) const { return amp_(k, 0); }

private:
  Matrix amp_;
};

inline PureState tensor(const PureState &a, const PureState &b) {
  return PureState(kron(a.amplitudes(), b.amplitudes()), Tolerance{1e-9});
}

/// <u|v>
inline complex state_overlap(const PureState &u, const PureState &v) {
  if (u.dim() != v.dim()) throw std::invalid_argument("state_overlap: dimension mismatch");
  complex s{0.0, 0.0};
  for (std::size_t k = 0; k < u.dim(); ++k) s += std::conj(u[k]) * v[k];
  return s;
}

/// sqrt(1 - |<u|v>|^2), evaluated through the Lagrange identity
/// ||u||^2 ||v||^2 - |<u|v>|^2 = 1/2 sum_ij |u_i v_j - u_j v_i|^2 to avoid
/// cancellation for nearly parallel states.
inline double trace_distance_pure(const PureState &u, const PureState &v) {
  if (u.dim() != v.dim()) throw std::invalid_argument("trace_distance_pure: dimension mismatch");
  double wedge = 0.0, nu = 0.0, nv = 0.0;
  for (std::size_t i = 0; i < u.dim(); ++i) {
    nu += std::norm(u[i]);
    nv += std::norm(v[i]);
    for (std::size_t j = i + 1; j < u.dim(); ++j) wedge += std::norm(u[i] * v[j] - u[j] * v[i]);
  }
  return std::sqrt(std::min(1.0, wedge / (nu * nv)));
}

}  // namespace qcontrol

#endif  // QCONTROL_TENSOR_HPP
