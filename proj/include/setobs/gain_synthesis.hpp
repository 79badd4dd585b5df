#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include <Eigen/Eigenvalues>

#include "setobs/decomposition.hpp"
#include "setobs/errors.hpp"
#include "setobs/numeric.hpp"
#include "setobs/system_model.hpp"

namespace setobs {

/// Observer gains for one mode plus every constant the radius recursion and
/// the residual thresholds need. Noise enters through
/// wbar_k = [v_k / sqrt2; w_k; v_{k+1} / sqrt2].
struct ObserverGains {
  Matrix M1;       // p_H x p_H
  Matrix M2;       // (p - p_H) x (l - p_H)
  Matrix L_tilde;  // n x (l - p_H)
  Matrix Phi;      // I - G2 M2 C2
  Matrix Psi;      // G1 M1 C1
  Matrix E;        // (I - L C2) Phi
  Matrix R_mat;    // n x (2l + n)
  Matrix Q_mat;    // (l - p_H) x (2l + n)
  Matrix W_cal;    // (I - L C2) R + L Q
  Matrix Y_cal;    // C2 R - Q, the noise map of the residual
  double lipschitz = 0.0;
  double eta_w = 0.0;
  double eta_v = 0.0;
  double theta = 0.0;         // (L_f + |Psi|) |E|, used by the radius recursion
  double theta_plain = 0.0;   // |E| alone; cannot drop below 1 when l - p_H < n
  double eta_bar = 0.0;
  double eta_bar_appendix = 0.0;
  double beta = 0.0;
  double alpha_bar = 0.0;
  double alpha_bar_appendix = 0.0;
  bool certified = false;

  Index n() const { return Phi.rows(); }
};

inline bool check_rank_condition(const ModeDecomposition& dec) {
  const Index p_free = dec.G2.cols();
  if (p_free == 0) return true;
  return rank(dec.C2 * dec.G2) == p_free;
}

/// Gain that minimizes |(I - L C2) Phi|_F: L = Phi pinv(C2 Phi).
inline Matrix heuristic_gain(const Matrix& Phi, const Matrix& C2) {
  return Phi * pinv(C2 * Phi);
}

/// Fills in every quantity that depends on L_tilde.
inline void complete_gains(ObserverGains& g, const ModeModel& mode, const ModeDecomposition& dec) {
  const Index n = mode.n();
  const Index l = mode.l();
  const Index r = dec.residual_dim();
  const double s2 = std::sqrt(2.0);
  const Matrix I = Matrix::Identity(n, n);
  const Matrix ILC = I - g.L_tilde * dec.C2;
  g.E = ILC * g.Phi;

  const Matrix G1M1T1 = dec.G1 * g.M1 * dec.T1;  // n x l
  const Matrix G2M2T2 = dec.G2 * g.M2 * dec.T2;  // n x l
  g.R_mat.resize(n, 2 * l + n);
  g.R_mat << -s2 * g.Phi * G1M1T1, g.Phi * mode.W, -s2 * G2M2T2;
  g.Q_mat = Matrix::Zero(r, 2 * l + n);
  g.Q_mat.rightCols(l) = -s2 * dec.T2;
  g.W_cal = ILC * g.R_mat + g.L_tilde * g.Q_mat;
  g.Y_cal = dec.C2 * g.R_mat - g.Q_mat;

  const double nE = spectral_norm(g.E);
  const double nPsi = spectral_norm(g.Psi);
  g.theta_plain = nE;
  g.theta = (g.lipschitz + nPsi) * nE;

  // Two bounds on |W_cal wbar|: split by noise source, or the whole block.
  const double split = spectral_norm(g.E * G1M1T1) * g.eta_v +
                       spectral_norm(g.E * mode.W) * g.eta_w +
                       spectral_norm((ILC * dec.G2 * g.M2 + g.L_tilde) * dec.T2) * g.eta_v;
  const double whole =
      spectral_norm(g.W_cal) * std::sqrt(g.eta_w * g.eta_w + g.eta_v * g.eta_v);
  g.eta_bar = std::min(split, whole);
  const Matrix re = -(g.Psi * g.Phi * G1M1T1 + g.Psi * G2M2T2 + g.L_tilde * dec.T2);
  g.eta_bar_appendix =
      spectral_norm(re) * g.eta_v + spectral_norm(g.Psi * g.Phi * mode.W) * g.eta_w;

  const Matrix V2M2C2 = dec.V2 * g.M2 * dec.C2;
  g.beta = spectral_norm(dec.V1 * g.M1 * dec.C1 - V2M2C2 * g.Psi) +
           g.lipschitz * spectral_norm(V2M2C2);
  const double v_part = spectral_norm((V2M2C2 * dec.G1 - dec.V1) * g.M1 * dec.T1) +
                        spectral_norm(dec.V2 * g.M2 * dec.T2);
  g.alpha_bar = spectral_norm(V2M2C2 * mode.W) * g.eta_w + v_part * g.eta_v;
  g.alpha_bar_appendix = spectral_norm(V2M2C2) * g.eta_w + v_part * g.eta_v;
  g.certified = g.theta < 1.0;
}

inline ObserverGains synthesize_gains(const ModeModel& mode, const ModeDecomposition& dec,
                                      double eta_w, double eta_v,
                                      const std::optional<Matrix>& user_L = std::nullopt) {
  if (!check_rank_condition(dec)) {
    throw SynthesisError("rank(C2 G2) != p - p_H; the free input component is not observable");
  }
  const Index n = mode.n();
  ObserverGains g;
  g.lipschitz = mode.lipschitz;
  g.eta_w = eta_w;
  g.eta_v = eta_v;
  g.M1 = dec.Sigma.diagonal().cwiseInverse().asDiagonal();
  g.M2 = pinv(dec.C2 * dec.G2);
  g.Phi = Matrix::Identity(n, n) - dec.G2 * g.M2 * dec.C2;
  g.Psi = dec.G1 * g.M1 * dec.C1;
  if (user_L) {
    if (user_L->rows() != n || user_L->cols() != dec.residual_dim()) {
      throw ConfigError("L_tilde must be " + std::to_string(n) + " x " +
                        std::to_string(dec.residual_dim()));
    }
    if (!all_finite(*user_L)) throw ConfigError("L_tilde has a non-finite entry");
    g.L_tilde = *user_L;
  } else {
    g.L_tilde = heuristic_gain(g.Phi, dec.C2);
  }
  complete_gains(g, mode, dec);
  return g;
}

enum class CertificateCase { Lyapunov, Contraction, Both, Neither };

inline const char* to_string(CertificateCase c) {
  switch (c) {
    case CertificateCase::Lyapunov: return "theta1";
    case CertificateCase::Contraction: return "theta2";
    case CertificateCase::Both: return "min";
    case CertificateCase::Neither: return "none";
  }
  return "none";
}

struct CertificateReport {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double theta1 = 0.0;
  double theta2 = 0.0;
  double delta_inf_1 = std::numeric_limits<double>::infinity();
  double delta_inf_2 = std::numeric_limits<double>::infinity();
  CertificateCase which = CertificateCase::Neither;
  double delta_x_inf = std::numeric_limits<double>::infinity();
  double delta_d_inf = std::numeric_limits<double>::infinity();
};

/// Steady-state radii implied by an externally solved (P, rho) pair.
inline CertificateReport verify_certificate(const ObserverGains& g, const Matrix& P, double rho) {
  if (P.rows() != P.cols() || P.rows() != g.n()) throw ConfigError("P must be n x n");
  if (!all_finite(P)) throw CertificateInvalid("P has a non-finite entry");
  if ((P - P.transpose()).cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, P.cwiseAbs().maxCoeff())) {
    throw ConfigError("P must be symmetric");
  }
  if (!(rho >= 0.0)) throw ConfigError("rho must be nonnegative");
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (P + P.transpose()));
  CertificateReport rep;
  rep.lambda_min = es.eigenvalues().minCoeff();
  rep.lambda_max = es.eigenvalues().maxCoeff();
  if (!(rep.lambda_min > 0.0)) throw CertificateInvalid("P is not positive definite");
  rep.theta1 = std::abs(rep.lambda_max - 1.0) / rep.lambda_min;
  rep.theta2 = g.theta;
  const bool ok1 = rep.theta1 < 1.0;
  const bool ok2 = rep.theta2 < 1.0;
  if (ok1) {
    rep.delta_inf_1 = rho * std::sqrt((g.eta_w * g.eta_w + g.eta_v * g.eta_v) /
                                      (rep.lambda_min * (1.0 - rep.theta1)));
  }
  if (ok2) rep.delta_inf_2 = g.eta_bar / (1.0 - rep.theta2);
  if (ok1 && ok2) {
    rep.which = CertificateCase::Both;
    rep.delta_x_inf = std::min(rep.delta_inf_1, rep.delta_inf_2);
  } else if (ok1) {
    rep.which = CertificateCase::Lyapunov;
    rep.delta_x_inf = rep.delta_inf_1;
  } else if (ok2) {
    rep.which = CertificateCase::Contraction;
    rep.delta_x_inf = rep.delta_inf_2;
  }
  if (rep.which != CertificateCase::Neither) {
    rep.delta_d_inf = g.beta * rep.delta_x_inf + g.alpha_bar;
  }
  return rep;
}

}  // namespace setobs
