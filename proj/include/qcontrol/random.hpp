#ifndef QCONTROL_RANDOM_HPP
#define QCONTROL_RANDOM_HPP

#include <cstdint>
#include <random>

#include "qcontrol/tensor.hpp"

namespace qcontrol {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based child seed: depends only on (master, stream, index).
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index) noexcept {
  return mix64(mix64(master ^ mix64(stream)) + index);
}

using Rng = std::mt19937_64;

inline double gaussian(Rng &rng) { return std::normal_distribution<double>{0.0, 1.0}(rng); }

inline double uniform(Rng &rng, double lo, double hi) { return std::uniform_real_distribution<double>{lo, hi}(rng); }

inline complex complex_gaussian(Rng &rng) {
  const double re = gaussian(rng);
  const double im = gaussian(rng);
  return {re, im};
}

inline Matrix random_hermitian(std::size_t n, Rng &rng, double scale = 1.0) {
  Matrix g(n, n);
  for (auto &z : g.data()) z = complex_gaussian(rng);
  return (g + g.adjoint()) * (0.5 * scale);
}

/// exp(iG) for a Gaussian Hermitian generator G. Not Haar distributed.
inline Matrix random_unitary(std::size_t n, Rng &rng, double scale = 1.0) {
  return expi_hermitian(random_hermitian(n, rng, scale));
}

/// Haar-random unitary: Gram-Schmidt on a complex Ginibre matrix.
inline Matrix haar_unitary(std::size_t n, Rng &rng) {
  Matrix q(n, n);
  for (auto &z : q.data()) z = complex_gaussian(rng);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < j; ++k) {
      complex proj{0.0, 0.0};
      for (std::size_t i = 0; i < n; ++i) proj += std::conj(q(i, k)) * q(i, j);
      for (std::size_t i = 0; i < n; ++i) q(i, j) -= proj * q(i, k);
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) norm += std::norm(q(i, j));
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < n; ++i) q(i, j) /= norm;
  }
  return q;
}

inline PureState random_state(std::size_t n, Rng &rng) {
  Matrix v(n, 1);
  for (auto &z : v.data()) z = complex_gaussian(rng);
  return PureState::normalized(v);
}

}  // namespace qcontrol

#endif  // QCONTROL_RANDOM_HPP
