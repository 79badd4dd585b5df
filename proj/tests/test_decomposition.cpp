#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "setobs/decomposition.hpp"

using namespace setobs;

namespace {

ModeModel with_H(const Matrix& H, Index n = 2) {
  const Index l = H.rows(), p = H.cols();
  return make_mode(Linear{Matrix::Identity(n, n)}, Matrix::Zero(n, 1), Matrix::Ones(n, p),
                   Matrix::Ones(l, n), Matrix::Zero(l, 1), H, Matrix::Identity(n, n));
}

void expect_invariants(const ModeModel& mode, const ModeDecomposition& d) {
  const Index l = mode.l(), p = mode.p();
  Matrix U(l, l);
  U << d.U1, d.U2;
  Matrix V(p, p);
  V << d.V1, d.V2;
  EXPECT_LE((U.transpose() * U - Matrix::Identity(l, l)).norm(), 1e-10);
  EXPECT_LE((V.transpose() * V - Matrix::Identity(p, p)).norm(), 1e-10);
  EXPECT_LE((d.T2 * mode.H).norm(), 1e-10);
  EXPECT_LE((d.H1 - mode.H * d.V1).norm(), 1e-10);
  EXPECT_LE((d.U1 * d.Sigma * d.V1.transpose() - mode.H).norm(), 1e-10);
  for (Index i = 0; i < d.Sigma.rows(); ++i) EXPECT_GT(d.Sigma(i, i), 0.0);
  std::mt19937_64 gen(8);
  for (int t = 0; t < 50; ++t) {
    const Vector y = fixtures::random_matrix(gen, l, 1);
    const auto [z1, z2] = split_output(d, y);
    EXPECT_NEAR(z1.squaredNorm() + z2.squaredNorm(), y.squaredNorm(), 1e-10);
    EXPECT_LE((d.U1 * z1 + d.U2 * z2 - y).norm(), 1e-10 * std::max(1.0, y.norm()));
    const Vector dd = fixtures::random_matrix(gen, p, 1);
    EXPECT_LE((d.V1 * (d.V1.transpose() * dd) + d.V2 * (d.V2.transpose() * dd) - dd).norm(), 1e-12);
  }
  EXPECT_EQ(d.C1, d.T1 * mode.C);
  EXPECT_EQ(d.C2, d.T2 * mode.C);
  EXPECT_EQ(d.G1, mode.G * d.V1);
  EXPECT_EQ(d.G2, mode.G * d.V2);
}

}  // namespace

TEST(Decompose, ZeroFeedthroughUsesIdentity) {
  const ModeModel m = with_H(Matrix::Zero(2, 1));
  const ModeDecomposition d = decompose(m);
  EXPECT_EQ(d.p_H, 0);
  EXPECT_EQ(d.Sigma.size(), 0);
  EXPECT_EQ(d.T2, Matrix::Identity(2, 2));
  EXPECT_EQ(d.T1.rows(), 0);
  EXPECT_EQ(d.V2, Matrix::Identity(1, 1));
  expect_invariants(m, d);
}

TEST(Decompose, FullFeedthrough) {
  const ModeModel m = with_H(Matrix::Identity(2, 2));
  const ModeDecomposition d = decompose(m);
  EXPECT_EQ(d.p_H, 2);
  EXPECT_EQ(d.T2.rows(), 0);
  EXPECT_EQ(d.Sigma, Matrix::Identity(2, 2));
  EXPECT_LE((d.U1 - Matrix::Identity(2, 2)).norm(), 1e-15);
  EXPECT_EQ(d.G2.cols(), 0);
  expect_invariants(m, d);
}

TEST(Decompose, ScenarioModeOneFeedthrough) {
  Matrix H(2, 1);
  H << 0.5, 0.5;
  const ModeModel m = with_H(H);
  const ModeDecomposition d = decompose(m);
  EXPECT_EQ(d.p_H, 1);
  EXPECT_NEAR(d.Sigma(0, 0), 1.0 / std::sqrt(2.0), 1e-15);
  // T2 is the unit vector orthogonal to (1,1), sign fixed by the convention.
  EXPECT_NEAR(std::abs(d.T2(0, 0)), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(d.T2(0, 0), -d.T2(0, 1), 1e-15);
  EXPECT_LE((d.T2 * H).norm(), 1e-15);
  expect_invariants(m, d);
}

TEST(Decompose, RandomFeedthroughs) {
  std::mt19937_64 gen(12);
  for (int t = 0; t < 100; ++t) {
    const Index l = 1 + t % 4, p = 1 + (t / 4) % 3;
    Matrix H = fixtures::random_matrix(gen, l, p);
    if (t % 5 == 0 && p > 1) H.col(p - 1) = 2.0 * H.col(0);
    const ModeModel m = with_H(H);
    const ModeDecomposition d = decompose(m);
    EXPECT_EQ(d.p_H, rank(H));
    expect_invariants(m, d);
  }
}

TEST(Decompose, EveryBundledScenarioMode) {
  for (const char* name : {"scenario1", "scenario2", "test_system_a", "duplicate_modes"}) {
    const auto cfg = fixtures::scenario(name);
    for (const auto& m : cfg.system.modes) {
      SCOPED_TRACE(name);
      expect_invariants(m, decompose(m));
    }
  }
}

TEST(SplitOutput, ZeroAndEmpty) {
  const ModeDecomposition d = decompose(with_H(Matrix::Zero(2, 1)));
  const auto [z1, z2] = split_output(d, Vector::Zero(2));
  EXPECT_EQ(z1.size(), 0);
  EXPECT_EQ(z2, Vector::Zero(2));
  Vector y(2);
  y << 3.0, -4.0;
  EXPECT_DOUBLE_EQ(split_output(d, y).second.norm(), 5.0);
  EXPECT_THROW(split_output(d, Vector::Zero(3)), ConfigError);
}

TEST(Decompose, Deterministic) {
  const auto cfg = fixtures::scenario("scenario1");
  for (const auto& m : cfg.system.modes) {
    const ModeDecomposition a = decompose(m), b = decompose(m);
    EXPECT_EQ(a.T2, b.T2);
    EXPECT_EQ(a.V1, b.V1);
  }
}
