#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "setobs/decomposition.hpp"
#include "setobs/errors.hpp"
#include "setobs/gain_synthesis.hpp"
#include "setobs/numeric.hpp"
#include "setobs/system_model.hpp"

namespace setobs {

struct BallEstimate {
  Vector center;
  double radius = 0.0;
};

/// Mode-matched observer state after step k. Input estimates lag by one
/// step: after step k the newest full input estimate is for d_{k-1}.
struct ObserverState {
  long k = 0;
  Vector x_hat;        // x_{k|k}
  Vector x_pred;       // x_{k|k-1}
  Vector x_star;       // x*_{k|k}
  Vector d1_hat;       // d1_{k}, feeds the next time update
  Vector d1_hat_prev;  // d1_{k-1}
  Vector d2_hat_prev;  // d2_{k-1}
  Vector d_hat_prev;   // d_{k-1}
  double delta_x = 0.0;
  double delta_d_prev = std::numeric_limits<double>::quiet_NaN();  // undefined before step 1

  BallEstimate state_ball() const { return {x_hat, delta_x}; }
  BallEstimate input_ball() const { return {d_hat_prev, delta_d_prev}; }
};

inline ObserverState init(const SwitchedSystem& sys, std::size_t q, const ObserverGains& gains,
                          bool allow_uncertified) {
  if (!gains.certified && !allow_uncertified) {
    throw UncertifiedGains("mode " + std::to_string(q) + ": gains are not certified (theta = " +
                         std::to_string(gains.theta) + " >= 1) and allow_uncertified is off");
  }
  const ModeModel& mode = sys.mode(q);
  ObserverState s;
  s.k = 0;
  s.x_hat = sys.x_hat0;
  s.x_pred = sys.x_hat0;
  s.x_star = sys.x_hat0;
  s.d1_hat = Vector::Zero(gains.M1.rows());
  s.d1_hat_prev = Vector::Zero(gains.M1.rows());
  s.d2_hat_prev = Vector::Zero(gains.M2.rows());
  s.d_hat_prev = Vector::Zero(mode.p());
  s.delta_x = sys.delta_x0;
  return s;
}

/// d1_0 needs y_0; the first time update uses it.
inline void absorb_initial_measurement(ObserverState& s, const ModeDecomposition& dec,
                                       const ObserverGains& gains, const Vector& y0,
                                       const Vector& u0) {
  const auto [z1, z2] = split_output(dec, y0);
  (void)z2;
  s.d1_hat = gains.M1 * (z1 - dec.C1 * s.x_hat - dec.D1 * u0);
}

namespace detail {
inline void require_finite(const Vector& v, const char* what, long k) {
  if (!v.allFinite()) throw NumericalFailure(std::string("observer: non-finite ") + what, k);
}
}  // namespace detail

/// One observer step: input estimation, time update, measurement update,
/// radius update.
inline ObserverState step(const ObserverState& prev, const ModeModel& mode,
                          const ModeDecomposition& dec, const ObserverGains& g,
                          const Vector& u_k, const Vector& u_prev, const Vector& y_k) {
  ObserverState s;
  s.k = prev.k + 1;
  const auto [z1, z2] = split_output(dec, y_k);
  s.x_pred = eval_field(mode.f, prev.x_hat) + mode.B * u_prev + dec.G1 * prev.d1_hat;
  detail::require_finite(s.x_pred, "time update", s.k);
  s.d2_hat_prev = g.M2 * (z2 - dec.C2 * s.x_pred - dec.D2 * u_k);
  s.x_star = s.x_pred + dec.G2 * s.d2_hat_prev;
  s.x_hat = s.x_star + g.L_tilde * (z2 - dec.C2 * s.x_star - dec.D2 * u_k);
  detail::require_finite(s.x_hat, "measurement update", s.k);
  s.d1_hat = g.M1 * (z1 - dec.C1 * s.x_hat - dec.D1 * u_k);
  s.d1_hat_prev = prev.d1_hat;
  s.d_hat_prev = dec.V1 * s.d1_hat_prev + dec.V2 * s.d2_hat_prev;
  detail::require_finite(s.d_hat_prev, "input estimate", s.k);
  s.delta_d_prev = bound_product(g.beta, prev.delta_x) + g.alpha_bar;
  s.delta_x = bound_product(g.theta, prev.delta_x) + g.eta_bar;
  return s;
}

/// A-priori radii delta_0..delta_K from the incremental recursion.
inline std::vector<double> radius_sequence(const ObserverGains& g, double delta0, long K) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(K + 1));
  out.push_back(delta0);
  for (long j = 1; j <= K; ++j) out.push_back(bound_product(g.theta, out.back()) + g.eta_bar);
  return out;
}

/// delta0 theta^k + eta (1 - theta^k) / (1 - theta).
inline double radius_closed_form(double delta0, double theta, double eta, long k) {
  if (theta == 1.0) return delta0 + static_cast<double>(k) * eta;
  const double tk = std::pow(theta, static_cast<double>(k));
  return bound_product(delta0, tk) + eta * (1.0 - tk) / (1.0 - theta);
}

inline std::pair<double, double> steady_state_radii(const ObserverGains& g) {
  if (!(g.theta < 1.0)) {
    throw DivergentRadius("steady state radius undefined: theta = " + std::to_string(g.theta) + " >= 1");
  }
  const double dx = g.eta_bar / (1.0 - g.theta);
  return {dx, g.beta * dx + g.alpha_bar};
}

}  // namespace setobs
