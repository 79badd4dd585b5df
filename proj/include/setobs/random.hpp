#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "setobs/numeric.hpp"

namespace setobs {

/// Seeded stream with a portable uniform/normal conversion, so the same
/// seed gives the same draws under every standard library.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    engine_.seed(seq);
  }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 == 0.0);
    const double u2 = uniform();
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * M_PI * u2;
    spare_ = rad * std::sin(ang);
    has_spare_ = true;
    return rad * std::cos(ang);
  }

  /// Uniform draw from the closed l2 ball of the given radius.
  Vector in_ball(Index dim, double radius) {
    Vector out = Vector::Zero(dim);
    if (dim == 0 || radius == 0.0) return out;
    double norm = 0.0;
    do {
      for (Index i = 0; i < dim; ++i) out(i) = normal();
      norm = out.norm();
    } while (norm == 0.0);
    const double scale = radius * std::pow(uniform(), 1.0 / static_cast<double>(dim));
    out *= scale / norm;
    // Rounding may leave the draw one ulp outside the ball.
    while (out.norm() > radius) out *= 1.0 - 0x1.0p-52;
    return out;
  }

  /// Uniformly random unit vector.
  Vector direction(Index dim) {
    Vector out = Vector::Zero(dim);
    if (dim == 0) return out;
    double norm = 0.0;
    do {
      for (Index i = 0; i < dim; ++i) out(i) = normal();
      norm = out.norm();
    } while (norm == 0.0);
    return out / norm;
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace setobs
