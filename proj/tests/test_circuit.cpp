#include <gtest/gtest.h>

#include <numbers>

#include "oracles.hpp"
#include "qcontrol/circuit.hpp"
#include "qcontrol/random.hpp"

using namespace qcontrol;

namespace {

CircuitSandwich random_sandwich(std::size_t a, std::size_t d, Rng &rng) {
  const auto n = a * 2 * d;
  return CircuitSandwich(a, d, haar_unitary(n, rng), haar_unitary(n, rng));
}

}  // namespace

TEST(BlackboxGate, Validation) {
  EXPECT_THROW(BlackboxGate(Matrix{{1.0, 1.0}, {0.0, 1.0}}), std::invalid_argument);
  EXPECT_THROW(BlackboxGate(gates::X(), Eigenpair{PureState::basis(2, 0), 1.0}), std::invalid_argument);
  EXPECT_THROW(BlackboxGate(gates::Z(), Eigenpair{PureState::basis(2, 1), 1.0}), std::invalid_argument);
  EXPECT_NO_THROW(BlackboxGate(gates::Z(), Eigenpair{PureState::basis(2, 1), -1.0}));
  const auto phased = BlackboxGate(gates::Z(), Eigenpair{PureState::basis(2, 0), 1.0}).with_phase(0.7);
  EXPECT_NEAR(std::arg(phased.known_eigenpair()->value), 0.7, 1e-15);
}

TEST(CircuitSandwich, Validation) {
  EXPECT_THROW(CircuitSandwich(1, 2, Matrix::identity(3), Matrix::identity(4)), std::invalid_argument);
  EXPECT_THROW(CircuitSandwich(1, 2, Matrix::identity(4), Matrix{{1.0, 1.0, 0.0, 0.0},
                                                                   {0.0, 1.0, 0.0, 0.0},
                                                                   {0.0, 0.0, 1.0, 0.0},
                                                                   {0.0, 0.0, 0.0, 1.0}}),
               std::invalid_argument);
  EXPECT_THROW(CircuitSandwich(0, 2, Matrix::identity(4), Matrix::identity(4)), std::invalid_argument);
}

TEST(ControlU, IntroTransformationWithX) {
  // (alpha|0> + beta|1>) x |0>  ->  alpha|0,0> + beta|1,1>
  const complex alpha{0.6, 0.0}, beta{0.0, 0.8};
  const Matrix in = kron(Matrix::column({alpha, beta}), Matrix::column({1.0, 0.0}));
  const Matrix out = control_u(gates::X()) * in;
  EXPECT_EQ(out, Matrix::column({alpha, 0.0, 0.0, beta}));
  EXPECT_EQ(control_u(gates::X()) * Matrix::column({0.0, 0.0, 1.0, 0.0}), Matrix::column({0.0, 0.0, 0.0, 1.0}));
  EXPECT_EQ(control_u(Matrix::identity(3)), Matrix::identity(6));
}

TEST(ControlU, GeneralStateAction) {
  Rng rng(41);
  for (std::size_t d : {1u, 2u, 3u, 6u}) {
    const auto u = haar_unitary(d, rng);
    const auto c = random_state(2, rng);
    const auto psi = random_state(d, rng);
    const Matrix in = kron(c.amplitudes(), psi.amplitudes());
    const Matrix expected =
        kron(Matrix::column({c[0], 0.0}), psi.amplitudes()) + kron(Matrix::column({0.0, c[1]}), u * psi.amplitudes());
    EXPECT_LE(frobenius_distance(control_u(u) * in, expected), 1e-14);
  }
}

TEST(ControlU, BlockLaws) {
  Rng rng(43);
  for (int t = 0; t < 50; ++t) {
    const std::size_t d = 1 + t % 8;
    const auto u = haar_unitary(d, rng), v = haar_unitary(d, rng);
    EXPECT_LE(frobenius_distance(control_u(u) * control_u(v), control_u(u * v)), 1e-12);
    EXPECT_LE(frobenius_distance(control_u(u).adjoint(), control_u(u.adjoint())), 1e-12);
  }
}

TEST(SandwichOperator, IdentitySandwichAppliesUUnconditionally) {
  Rng rng(47);
  const auto u = haar_unitary(3, rng);
  const auto w = sandwich_operator(CircuitSandwich::identity(1, 3), BlackboxGate(u));
  EXPECT_LE(frobenius_distance(w, kron(Matrix::identity(2), u)), 1e-15);
}

TEST(SandwichOperator, KnownUnitaryConstruction) {
  Rng rng(53);
  for (std::size_t d : {1u, 2u, 3u, 4u}) {
    const auto u0 = haar_unitary(d, rng);
    const auto s = known_unitary_sandwich(u0);
    // Oracle: explicit product B (1_2 x U0) with A = 1.
    const Matrix expected = control_u(u0) * kron(Matrix::identity(2), u0.adjoint()) * kron(Matrix::identity(2), u0);
    EXPECT_LE(frobenius_distance(sandwich_operator(s, BlackboxGate(u0)), expected), 1e-12);
    EXPECT_LE(frobenius_distance(sandwich_operator(s, BlackboxGate(u0)), control_u(u0)), 1e-12);
  }
}

TEST(SandwichOperator, DimensionMismatchRejected) {
  EXPECT_THROW(sandwich_operator(CircuitSandwich::identity(1, 2), BlackboxGate(Matrix::identity(3))),
               std::invalid_argument);
}

TEST(SandwichOperator, IsometryAndPhaseCovariance) {
  Rng rng(59);
  for (int t = 0; t < 50; ++t) {
    const std::size_t a = 1 + t % 3, d = 1 + t % 3;
    const auto s = random_sandwich(a, d, rng);
    const BlackboxGate u(haar_unitary(d, rng));
    const auto w = sandwich_operator(s, u);
    EXPECT_EQ(w.rows(), a * 2 * d);
    EXPECT_EQ(w.cols(), 2 * d);
    EXPECT_TRUE(is_isometry(w, Tolerance{1e-10}));
    const auto in = random_state(2 * d, rng);
    EXPECT_NEAR((w * in.amplitudes()).frobenius_norm(), 1.0, 1e-10);
    for (double phi : {0.1, 1.0, std::numbers::pi, 5.0}) {
      const auto wp = sandwich_operator(s, u.with_phase(phi));
      EXPECT_LE(frobenius_distance(wp, w * std::polar(1.0, phi)), 1e-12);
    }
  }
}

TEST(ReducedChannel, KrausExamples) {
  const auto single = reduced_channel_kraus(CircuitSandwich::identity(1, 2), BlackboxGate(gates::X()));
  ASSERT_EQ(single.size(), 1u);
  EXPECT_EQ(single[0], direct_sum(gates::X(), gates::X()));
  Rng rng(61);
  const auto s = random_sandwich(1, 2, rng);
  const BlackboxGate u(haar_unitary(2, rng));
  EXPECT_LE(frobenius_distance(reduced_channel_kraus(s, u)[0], sandwich_operator(s, u)), 0.0);
}

TEST(ReducedChannel, CompletenessOnRandomInstances) {
  Rng rng(67);
  for (int t = 0; t < 50; ++t) {
    const std::size_t a = 1 + t % 4, d = 1 + t % 3;
    const auto s = random_sandwich(a, d, rng);
    const auto kraus = reduced_channel_kraus(s, BlackboxGate(haar_unitary(d, rng)));
    EXPECT_EQ(kraus.size(), a);
    EXPECT_LE(kraus_completeness_residual(kraus), 1e-10);
  }
}

TEST(ReducedChannel, EmbeddingPreservesKraus) {
  Rng rng(71);
  const auto s = random_sandwich(1, 2, rng);
  const BlackboxGate u(haar_unitary(2, rng));
  const auto big = embed_sandwich(s, 3);
  const auto k = reduced_channel_kraus(big, u);
  ASSERT_EQ(k.size(), 3u);
  EXPECT_LE(frobenius_distance(k[0], reduced_channel_kraus(s, u)[0]), 1e-15);
  EXPECT_LE(k[1].frobenius_norm() + k[2].frobenius_norm(), 0.0);
  EXPECT_THROW(embed_sandwich(big, 2), std::invalid_argument);
}

TEST(GlobalPhaseEquivalent, Examples) {
  Rng rng(73);
  const auto psi = random_state(4, rng);
  for (double phi : {0.0, 0.3, 2.0, -4.0})
    EXPECT_TRUE(global_phase_equivalent(psi, PureState(psi.amplitudes() * std::polar(1.0, phi))));
  EXPECT_FALSE(global_phase_equivalent(PureState::basis(2, 0), PureState::basis(2, 1)));

  // delta orthogonal to psi with norm 0.1: |<psi|psi+delta>|/||psi+delta|| = 1/sqrt(1.01).
  const PureState e0 = PureState::basis(3, 0);
  const Matrix delta = PureState::basis(3, 1).amplitudes() * 0.1;
  const auto perturbed = PureState::normalized(e0.amplitudes() + delta);
  EXPECT_NEAR(std::abs(state_overlap(e0, perturbed)), 1.0 / std::sqrt(1.01), 1e-15);
  EXPECT_FALSE(global_phase_equivalent(e0, perturbed, Tolerance{1e-10}));
}
