#pragma once

#include <optional>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "setobs/errors.hpp"
#include "setobs/numeric.hpp"

namespace setobs {

/// f(x) = A_hat x + A_tilde * gamma(x), gamma(x) = 0.5 * (sin x_1, ..., sin x_n).
struct LinearSinusoidal {
  Matrix A_hat;
  Matrix A_tilde;
};

/// f(x) = A x.
struct Linear {
  Matrix A;
};

/// Closed family of vector fields. Both variants satisfy f(0) = 0, and their
/// Lipschitz, Jacobian and Hessian data are computed rather than supplied.
using FieldDescriptor = std::variant<LinearSinusoidal, Linear>;

inline Index field_dim(const FieldDescriptor& f) {
  return std::visit(
      [](const auto& v) -> Index {
        if constexpr (std::is_same_v<std::decay_t<decltype(v)>, Linear>) {
          return v.A.rows();
        } else {
          return v.A_hat.rows();
        }
      },
      f);
}

inline void validate_field(const FieldDescriptor& f) {
  std::visit(
      [](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Linear>) {
          if (v.A.rows() != v.A.cols()) throw ConfigError("Linear field: A must be square");
          if (!all_finite(v.A)) throw ConfigError("Linear field: non-finite entry");
        } else {
          if (v.A_hat.rows() != v.A_hat.cols() || v.A_tilde.rows() != v.A_tilde.cols() ||
              v.A_hat.rows() != v.A_tilde.rows()) {
            throw ConfigError("LinearSinusoidal field: A_hat and A_tilde must be square and equal-sized");
          }
          if (!all_finite(v.A_hat) || !all_finite(v.A_tilde)) {
            throw ConfigError("LinearSinusoidal field: non-finite entry");
          }
        }
      },
      f);
}

inline Vector eval_field(const FieldDescriptor& f, const Vector& x) {
  if (x.size() != field_dim(f)) {
    throw ConfigError("eval_field: state has length " + std::to_string(x.size()) +
                      ", field expects " + std::to_string(field_dim(f)));
  }
  return std::visit(
      [&x](const auto& v) -> Vector {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Linear>) {
          return v.A * x;
        } else {
          const Vector gamma = 0.5 * x.array().sin().matrix();
          return v.A_hat * x + v.A_tilde * gamma;
        }
      },
      f);
}

/// Global Lipschitz constant in the 2-norm. gamma has Jacobian
/// diag(0.5 cos x_i), whose norm never exceeds 1/2.
inline double lipschitz_constant(const FieldDescriptor& f) {
  return std::visit(
      [](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Linear>) {
          return spectral_norm(v.A);
        } else {
          return spectral_norm(v.A_hat) + 0.5 * spectral_norm(v.A_tilde);
        }
      },
      f);
}

struct JacobianHessian {
  Matrix J0;            // Jacobian at the origin
  double hessian_bound;  // sup of the Hessian norm over the state space
};

inline JacobianHessian jacobian_hessian_data(const FieldDescriptor& f) {
  return std::visit(
      [](const auto& v) -> JacobianHessian {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Linear>) {
          return {v.A, 0.0};
        } else {
          return {v.A_hat + 0.5 * v.A_tilde, 0.5 * spectral_norm(v.A_tilde)};
        }
      },
      f);
}

/// One hypothesis of the switched system:
///   x+ = f(x) + B u + G d + W w,   y = C x + D u + H d + v.
struct ModeModel {
  FieldDescriptor f;
  Matrix B;  // n x m
  Matrix G;  // n x p
  Matrix C;  // l x n
  Matrix D;  // l x m
  Matrix H;  // l x p
  Matrix W;  // n x n
  double lipschitz = 0.0;

  Index n() const { return field_dim(f); }
  Index m() const { return B.cols(); }
  Index p() const { return G.cols(); }
  Index l() const { return C.rows(); }
};

/// Validates dimensions and fills in the Lipschitz constant. A supplied
/// constant must not undercut the computed one.
inline ModeModel make_mode(FieldDescriptor f, Matrix B, Matrix G, Matrix C, Matrix D,
                           Matrix H, Matrix W, std::optional<double> lipschitz = std::nullopt) {
  validate_field(f);
  const Index n = field_dim(f);
  auto check = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("mode: ") + what);
  };
  check(B.rows() == n, "B must have n rows");
  check(G.rows() == n, "G must have n rows");
  check(C.cols() == n, "C must have n columns");
  check(D.rows() == C.rows() && D.cols() == B.cols(), "D must be l x m");
  check(H.rows() == C.rows() && H.cols() == G.cols(), "H must be l x p");
  check(W.rows() == n && W.cols() == n, "W must be n x n");
  for (const Matrix* mat : {&B, &G, &C, &D, &H, &W}) check(all_finite(*mat), "non-finite matrix entry");
  const double computed = lipschitz_constant(f);
  double lf = computed;
  if (lipschitz) {
    check(*lipschitz >= computed - 1e-9, "supplied Lipschitz constant is below the computed bound");
    lf = *lipschitz;
  }
  // The constant must be positive; a zero field still gets a tiny slope.
  if (lf <= 0.0) lf = std::numeric_limits<double>::min();
  return ModeModel{std::move(f), std::move(B), std::move(G), std::move(C), std::move(D),
                   std::move(H), std::move(W), lf};
}

/// Known bounds on the whole measurement and state spaces.
struct SpaceBounds {
  double R_x = 0.0;
  double R_y = 0.0;
};

struct SwitchedSystem {
  std::vector<ModeModel> modes;  // mode q is modes[q - 1]
  std::vector<double> eta_w;     // per-mode process-noise bound
  std::vector<double> eta_v;     // per-mode measurement-noise bound
  double delta_x0 = 0.0;
  Vector x_hat0;
  std::optional<SpaceBounds> bounds;

  std::size_t num_modes() const { return modes.size(); }
  const ModeModel& mode(std::size_t q) const { return modes.at(q - 1); }
};

inline void validate(const SwitchedSystem& sys) {
  if (sys.modes.empty()) throw ConfigError("system: at least one mode is required");
  const Index n = sys.modes.front().n();
  const Index l = sys.modes.front().l();
  const Index m = sys.modes.front().m();
  for (const auto& mode : sys.modes) {
    if (mode.n() != n || mode.l() != l || mode.m() != m) {
      throw ConfigError("system: all modes must share n, l and m");
    }
  }
  if (sys.eta_w.size() != sys.modes.size() || sys.eta_v.size() != sys.modes.size()) {
    throw ConfigError("system: one noise bound per mode is required");
  }
  for (std::size_t q = 0; q < sys.modes.size(); ++q) {
    if (!(sys.eta_w[q] >= 0.0) || !(sys.eta_v[q] >= 0.0)) {
      throw ConfigError("system: noise bounds must be nonnegative");
    }
  }
  if (!(sys.delta_x0 >= 0.0)) throw ConfigError("system: delta_x0 must be nonnegative");
  if (sys.x_hat0.size() != n || !all_finite(sys.x_hat0)) {
    throw ConfigError("system: x_hat0 must be a finite n-vector");
  }
  if (sys.bounds && (!(sys.bounds->R_x >= 0.0) || !(sys.bounds->R_y >= 0.0))) {
    throw ConfigError("system: R_x and R_y must be nonnegative");
  }
}

}  // namespace setobs
