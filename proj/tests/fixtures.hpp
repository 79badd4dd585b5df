#pragma once

#include <random>
#include <string>

#include "setobs/scenario.hpp"

namespace fixtures {

using namespace setobs;

inline std::string scenario_path(const std::string& name) {
  return std::string(SETOBS_SCENARIO_DIR) + "/" + name + ".json";
}

inline ScenarioConfig scenario(const std::string& name) { return load_config(scenario_path(name)); }

inline Matrix random_matrix(std::mt19937_64& gen, Index r, Index c, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Matrix m(r, c);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < c; ++j) m(i, j) = u(gen);
  return m;
}

/// Random linear mode with n = 3, l = 3, p = 2 and a rank-one H, so both
/// G1 and G2 are non-empty. Retries until rk(C2 G2) = p - p_H.
inline ModeModel random_linear_mode(std::mt19937_64& gen) {
  for (;;) {
    Matrix A = random_matrix(gen, 3, 3, 0.5);
    Matrix B = random_matrix(gen, 3, 1, 0.5);
    Matrix G = random_matrix(gen, 3, 2);
    Matrix C = random_matrix(gen, 3, 3);
    Matrix D = random_matrix(gen, 3, 1, 0.2);
    Matrix H = random_matrix(gen, 3, 1) * random_matrix(gen, 1, 2);
    Matrix W = random_matrix(gen, 3, 3, 0.7);
    ModeModel m = make_mode(Linear{A}, B, G, C, D, H, W);
    const ModeDecomposition dec = decompose(m);
    if (dec.p_H == 1 && check_rank_condition(dec)) return m;
  }
}

}  // namespace fixtures
