#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "setobs/decomposition.hpp"
#include "setobs/gain_synthesis.hpp"
#include "setobs/numeric.hpp"
#include "setobs/residual_thresholds.hpp"
#include "setobs/system_model.hpp"

namespace setobs {

inline constexpr double kT2DistinctTol = 1e-9;

/// [(C2 - C2') (T2 - T2') -I I D2 -D2'], identity blocks of the residual size.
inline Matrix separation_matrix(const ModeDecomposition& a, const ModeDecomposition& b) {
  const Index r = a.residual_dim();
  if (b.residual_dim() != r) throw ConfigError("separation_matrix: residual sizes differ");
  const Index n = a.C2.cols();
  const Index l = a.T2.cols();
  const Index m = a.D2.cols();
  Matrix W(r, n + l + 2 * r + 2 * m);
  W << a.C2 - b.C2, a.T2 - b.T2, -Matrix::Identity(r, r), Matrix::Identity(r, r), a.D2, -b.D2;
  return W;
}

struct PairConditionI {
  std::size_t q = 0;
  std::size_t q2 = 0;
  bool applicable = true;
  std::string note;
  double sigma_min_W = 0.0;
  double R_z = 0.0;
  double rhs = 0.0;
  bool passes = false;
};

struct ConditionIReport {
  bool applicable = false;
  std::string note;
  std::vector<PairConditionI> pairs;
  bool all_pass() const {
    if (!applicable || pairs.empty()) return false;
    for (const auto& p : pairs) {
      if (!p.passes) return false;
    }
    return true;
  }
};

/// sigma_min(W) > (tri_q + tri_q' + R_z) / sqrt(R_x^2 + eta_v^2) for every
/// unordered pair. steady_tri[q-1] is the limit of the triangle bound.
inline ConditionIReport check_condition_i(const SwitchedSystem& sys,
                                          const std::vector<ModeDecomposition>& decs,
                                          const std::vector<double>& steady_tri) {
  ConditionIReport rep;
  if (!sys.bounds) {
    rep.note = "state and measurement bounds R_x, R_y not given";
    return rep;
  }
  rep.applicable = true;
  const double Rx = sys.bounds->R_x;
  const double Ry = sys.bounds->R_y;
  const std::size_t Q = sys.num_modes();
  for (std::size_t q = 1; q <= Q; ++q) {
    for (std::size_t q2 = q + 1; q2 <= Q; ++q2) {
      PairConditionI p;
      p.q = q;
      p.q2 = q2;
      const auto& a = decs[q - 1];
      const auto& b = decs[q2 - 1];
      if (a.residual_dim() != b.residual_dim()) {
        p.applicable = false;
        p.note = "residual sizes differ";
        rep.pairs.push_back(p);
        continue;
      }
      const Matrix W = separation_matrix(a, b);
      try {
        p.sigma_min_W = sigma_min(W);
      } catch (const UndefinedSigmaMin&) {
        p.sigma_min_W = 0.0;
      }
      p.R_z = bound_product(Ry, spectral_norm(a.T2 - b.T2));
      // Noise bound of the pair: the larger of the two modes' eta_v.
      const double ev = std::max(sys.eta_v[q - 1], sys.eta_v[q2 - 1]);
      const double denom = std::sqrt(Rx * Rx + ev * ev);
      const double num = steady_tri[q - 1] + steady_tri[q2 - 1] + p.R_z;
      p.rhs = denom > 0.0 ? num / denom : std::numeric_limits<double>::infinity();
      p.passes = p.sigma_min_W > p.rhs;
      rep.pairs.push_back(p);
    }
  }
  return rep;
}

struct ModeConditionII {
  std::size_t q = 0;
  double jacobian_norm = 0.0;
  bool jacobian_ok = false;
  double hessian_bound = 0.0;
  bool hessian_bounded = false;
};

struct PairDistinct {
  std::size_t q = 0;
  std::size_t q2 = 0;
  double t2_distance = 0.0;
  bool distinct = false;
};

struct ConditionIIReport {
  std::vector<PairDistinct> pairs;
  std::vector<ModeConditionII> modes;
  /// The input must have unlimited energy; nothing offline can confirm it.
  bool requires_unlimited_energy = true;

  bool t2_all_distinct() const {
    for (const auto& p : pairs) {
      if (!p.distinct) return false;
    }
    return true;
  }
  /// The theorem needs the Jacobian condition for the (unknown) true mode,
  /// so every mode must satisfy it.
  bool structural_pass() const {
    if (!t2_all_distinct()) return false;
    for (const auto& m : modes) {
      if (!m.jacobian_ok || !m.hessian_bounded) return false;
    }
    return true;
  }
};

inline double t2_distance(const ModeDecomposition& a, const ModeDecomposition& b) {
  if (a.T2.rows() != b.T2.rows()) return std::numeric_limits<double>::infinity();
  return spectral_norm(a.T2 - b.T2);
}

inline ConditionIIReport check_condition_ii(const SwitchedSystem& sys,
                                            const std::vector<ModeDecomposition>& decs) {
  ConditionIIReport rep;
  const std::size_t Q = sys.num_modes();
  for (std::size_t q = 1; q <= Q; ++q) {
    for (std::size_t q2 = q + 1; q2 <= Q; ++q2) {
      PairDistinct p;
      p.q = q;
      p.q2 = q2;
      p.t2_distance = t2_distance(decs[q - 1], decs[q2 - 1]);
      p.distinct = p.t2_distance > kT2DistinctTol;
      rep.pairs.push_back(p);
    }
  }
  for (std::size_t q = 1; q <= Q; ++q) {
    const JacobianHessian jh = jacobian_hessian_data(sys.mode(q).f);
    ModeConditionII m;
    m.q = q;
    m.jacobian_norm = spectral_norm(jh.J0);
    m.jacobian_ok = m.jacobian_norm < 1.0;
    m.hessian_bound = jh.hessian_bound;
    m.hessian_bounded = std::isfinite(jh.hessian_bound);
    rep.modes.push_back(m);
  }
  return rep;
}

enum class Verdict { Pass, Conditional, Fail };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Conditional: return "conditional";
    case Verdict::Fail: return "fail";
  }
  return "fail";
}

struct DetectabilityReport {
  ConditionIReport condition_i;
  ConditionIIReport condition_ii;
  std::vector<double> steady_tri;
  Verdict overall = Verdict::Fail;
};

inline DetectabilityReport check_detectability(const SwitchedSystem& sys,
                                               const std::vector<ModeDecomposition>& decs,
                                               const std::vector<ObserverGains>& gains) {
  DetectabilityReport rep;
  for (std::size_t q = 1; q <= sys.num_modes(); ++q) {
    rep.steady_tri.push_back(
        steady_delta_tri(gains[q - 1], decs[q - 1], sys.mode(q), residual_bounds(sys, q)));
  }
  rep.condition_i = check_condition_i(sys, decs, rep.steady_tri);
  rep.condition_ii = check_condition_ii(sys, decs);
  if (sys.num_modes() == 1 || rep.condition_i.all_pass()) {
    rep.overall = Verdict::Pass;
  } else if (rep.condition_ii.structural_pass()) {
    rep.overall = Verdict::Conditional;
  }
  return rep;
}

/// Data one surviving mode contributes to the separation test at step k.
struct SeparationData {
  Vector C2_xstar;  // C2 x*_{k|k}
  Vector D2_u;      // D2 u_k
  double threshold = 0.0;
};

/// True iff |C2 x* - C2' x*' + D2 u - D2' u|_2 > delta + delta' + R_z, in
/// which case at least one of the two modes is eliminated at this step.
inline bool pairwise_separation(const SeparationData& a, const SeparationData& b, double R_z) {
  if (a.C2_xstar.size() != b.C2_xstar.size()) return false;
  const double lhs = (a.C2_xstar - b.C2_xstar + a.D2_u - b.D2_u).norm();
  return lhs > a.threshold + b.threshold + R_z;
}

}  // namespace setobs
