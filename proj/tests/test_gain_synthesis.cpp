#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "setobs/gain_synthesis.hpp"

using namespace setobs;

namespace {

// Stacked noise vector in the column order of R: v_{k-1}/sqrt2, w_{k-1}, v_k/sqrt2.
Vector noise_stack(const Vector& v_prev, const Vector& w, const Vector& v_k) {
  Vector out(v_prev.size() + w.size() + v_k.size());
  out << v_prev / std::sqrt(2.0), w, v_k / std::sqrt(2.0);
  return out;
}

}  // namespace

TEST(RankCondition, UnobservableFreeInputRejected) {
  Matrix G(2, 1), C(1, 2);
  G << 1, 0;
  C << 0, 1;
  const ModeModel m = make_mode(Linear{Matrix::Identity(2, 2)}, Matrix::Zero(2, 1), G, C,
                                Matrix::Zero(1, 1), Matrix::Zero(1, 1), Matrix::Identity(2, 2));
  const ModeDecomposition d = decompose(m);
  EXPECT_FALSE(check_rank_condition(d));
  EXPECT_THROW(synthesize_gains(m, d, 0.1, 0.1), SynthesisError);
}

TEST(RankCondition, EveryBundledModePasses) {
  for (const char* name : {"scenario1", "test_system_a"}) {
    for (const auto& m : fixtures::scenario(name).system.modes) EXPECT_TRUE(check_rank_condition(decompose(m)));
  }
}

TEST(Synthesis, StructuralIdentities) {
  std::mt19937_64 gen(21);
  for (int t = 0; t < 30; ++t) {
    const ModeModel m = fixtures::random_linear_mode(gen);
    const ModeDecomposition d = decompose(m);
    const ObserverGains g = synthesize_gains(m, d, 0.1, 0.05);
    EXPECT_LE((g.M1 * d.Sigma - Matrix::Identity(d.p_H, d.p_H)).norm(), 1e-12);
    // M2 is a left inverse of C2 G2, so Phi annihilates G2 after C2.
    EXPECT_LE((g.M2 * d.C2 * d.G2 - Matrix::Identity(d.G2.cols(), d.G2.cols())).norm(), 1e-9);
    EXPECT_LE((d.C2 * g.Phi * d.G2).norm(), 1e-9);
    const Matrix C2Phi = d.C2 * g.Phi;
    const Matrix X = pinv(C2Phi);
    EXPECT_LE((C2Phi * X * C2Phi - C2Phi).norm(), 1e-9);
    EXPECT_LE((X * C2Phi * X - X).norm(), 1e-9);
    EXPECT_LE((g.E - (Matrix::Identity(3, 3) - g.L_tilde * d.C2) * g.Phi).norm(), 1e-14);
    EXPECT_LE((g.Y_cal - (d.C2 * g.R_mat - g.Q_mat)).norm(), 1e-14);
    EXPECT_NEAR(g.theta, (m.lipschitz + spectral_norm(g.Psi)) * spectral_norm(g.E), 1e-12);
    EXPECT_EQ(g.certified, g.theta < 1.0);
  }
}

TEST(Synthesis, HeuristicGainMinimizesFrobeniusNorm) {
  std::mt19937_64 gen(22);
  for (int t = 0; t < 10; ++t) {
    const ModeModel m = fixtures::random_linear_mode(gen);
    const ModeDecomposition d = decompose(m);
    const ObserverGains g = synthesize_gains(m, d, 0.1, 0.1);
    const double best = g.E.norm();
    for (int s = 0; s < 100; ++s) {
      const Matrix L = g.L_tilde + fixtures::random_matrix(gen, 3, d.residual_dim(), 0.5);
      ASSERT_GE(((Matrix::Identity(3, 3) - L * d.C2) * g.Phi).norm(), best - 1e-12);
    }
  }
}

TEST(Synthesis, SquareResidualGivesZeroErrorMap) {
  // test_system_a has l - p_H = n, so the heuristic gain inverts C2 on the range of Phi.
  const auto cfg = fixtures::scenario("test_system_a");
  for (std::size_t q = 1; q <= 2; ++q) {
    const ModeModel& m = cfg.system.mode(q);
    const ModeDecomposition d = decompose(m);
    const ObserverGains g = synthesize_gains(m, d, 0.02, 0.02);
    EXPECT_LE(g.E.norm(), 1e-12);
    EXPECT_LE(g.theta, 1e-12);
    EXPECT_TRUE(g.certified);
    const auto [dx, dd] = steady_state_radii(g);
    EXPECT_NEAR(dx, g.eta_bar, 1e-12);
    EXPECT_NEAR(dd, g.beta * dx + g.alpha_bar, 1e-12);
  }
}

TEST(Synthesis, ScenarioOneModesAreUncertified) {
  // l - p_H = 1 < n = 2 leaves a direction of E with unit gain.
  const auto cfg = fixtures::scenario("scenario1");
  for (const auto& m : cfg.system.modes) {
    const ModeDecomposition d = decompose(m);
    const ObserverGains g = synthesize_gains(m, d, 0.02, 0.02);
    EXPECT_GE(g.theta_plain, 1.0 - 1e-12);
    EXPECT_GE(g.theta, m.lipschitz * (1.0 - 1e-12));
    EXPECT_FALSE(g.certified);
    EXPECT_THROW(steady_state_radii(g), DivergentRadius);
  }
}

TEST(Synthesis, UserGainEchoed) {
  std::mt19937_64 gen(23);
  const ModeModel m = fixtures::random_linear_mode(gen);
  const ModeDecomposition d = decompose(m);
  const Matrix L = fixtures::random_matrix(gen, 3, d.residual_dim());
  const ObserverGains g = synthesize_gains(m, d, 0.1, 0.1, L);
  EXPECT_EQ(g.L_tilde, L);
  EXPECT_THROW(synthesize_gains(m, d, 0.1, 0.1, Matrix(Matrix::Zero(2, d.residual_dim()))), ConfigError);
  Matrix bad = L;
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(synthesize_gains(m, d, 0.1, 0.1, bad), ConfigError);
}

TEST(Synthesis, ZeroNoiseZeroConstants) {
  std::mt19937_64 gen(24);
  const ModeModel m = fixtures::random_linear_mode(gen);
  const ObserverGains g = synthesize_gains(m, decompose(m), 0.0, 0.0);
  EXPECT_EQ(g.eta_bar, 0.0);
  EXPECT_EQ(g.alpha_bar, 0.0);
  EXPECT_EQ(g.eta_bar_appendix, 0.0);
}

TEST(Synthesis, NoiseBoundsAreSound) {
  std::mt19937_64 gen(25);
  Rng rng(25, 0);
  for (int t = 0; t < 10; ++t) {
    const ModeModel m = fixtures::random_linear_mode(gen);
    const ModeDecomposition d = decompose(m);
    const double ew = 0.3, ev = 0.2;
    const ObserverGains g = synthesize_gains(m, d, ew, ev);
    const Matrix V2M2C2 = d.V2 * g.M2 * d.C2;
    const Matrix aw = V2M2C2 * m.W;
    const Matrix av1 = (V2M2C2 * d.G1 - d.V1) * g.M1 * d.T1;
    const Matrix av2 = d.V2 * g.M2 * d.T2;
    double worst = 0.0, worst_d = 0.0;
    for (int s = 0; s < 5000; ++s) {
      // Boundary draws are where the maxima live.
      const Vector vp = rng.direction(m.l()) * ev, w = rng.direction(m.n()) * ew, vk = rng.direction(m.l()) * ev;
      worst = std::max(worst, (g.W_cal * noise_stack(vp, w, vk)).norm());
      worst_d = std::max(worst_d, (aw * w + av1 * vp + av2 * vk).norm());
    }
    EXPECT_LE(worst, g.eta_bar * (1 + 1e-12));
    EXPECT_GT(worst, 0.3 * g.eta_bar);
    EXPECT_LE(worst_d, g.alpha_bar * (1 + 1e-12));
  }
}

TEST(Certificate, Cases) {
  const auto cfg = fixtures::scenario("test_system_a");
  const ModeModel& m = cfg.system.mode(1);
  const ModeDecomposition d = decompose(m);
  const ObserverGains g = synthesize_gains(m, d, 0.02, 0.02);
  const Matrix I = Matrix::Identity(2, 2);

  const CertificateReport both = verify_certificate(g, I, 0.5);
  EXPECT_EQ(both.which, CertificateCase::Both);
  EXPECT_DOUBLE_EQ(both.theta1, 0.0);
  EXPECT_NEAR(both.delta_inf_1, 0.5 * std::sqrt(2 * 0.02 * 0.02), 1e-15);
  EXPECT_DOUBLE_EQ(both.delta_x_inf, std::min(both.delta_inf_1, both.delta_inf_2));
  EXPECT_DOUBLE_EQ(both.delta_d_inf, g.beta * both.delta_x_inf + g.alpha_bar);

  // lambda spread too wide for the Lyapunov branch.
  const CertificateReport contraction = verify_certificate(g, 5.0 * I, 0.5);
  EXPECT_NEAR(contraction.theta1, 0.8, 1e-15);
  EXPECT_EQ(contraction.which, CertificateCase::Both);
  const CertificateReport c2 = verify_certificate(g, 0.5 * I, 0.5);
  EXPECT_NEAR(c2.theta1, 1.0, 1e-15);
  EXPECT_EQ(c2.which, CertificateCase::Contraction);

  Matrix nonsym = I;
  nonsym(0, 1) = 0.3;
  EXPECT_THROW(verify_certificate(g, nonsym, 0.5), ConfigError);
  EXPECT_THROW(verify_certificate(g, -I, 0.5), CertificateInvalid);
  EXPECT_THROW(verify_certificate(g, Matrix::Identity(3, 3), 0.5), ConfigError);
}

TEST(Certificate, LyapunovOnlyForUncertifiedGains) {
  const auto cfg = fixtures::scenario("scenario1");
  const ModeModel& m = cfg.system.mode(1);
  const ObserverGains g = synthesize_gains(m, decompose(m), 0.02, 0.02);
  const CertificateReport r = verify_certificate(g, Matrix::Identity(2, 2), 1.0);
  EXPECT_EQ(r.which, CertificateCase::Lyapunov);
  EXPECT_DOUBLE_EQ(r.delta_x_inf, r.delta_inf_1);
  const CertificateReport none = verify_certificate(g, 0.4 * Matrix::Identity(2, 2), 1.0);
  EXPECT_EQ(none.which, CertificateCase::Neither);
  EXPECT_TRUE(std::isinf(none.delta_x_inf));
}
