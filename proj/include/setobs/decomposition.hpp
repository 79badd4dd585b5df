#pragma once

#include <string>
#include <utility>

#include "setobs/errors.hpp"
#include "setobs/numeric.hpp"
#include "setobs/system_model.hpp"

namespace setobs {

/// SVD split of the feedthrough H = [U1 U2] [Sigma 0; 0 0] [V1 V2]^T and the
/// output/input coordinates it induces. T2 annihilates H, so z2 = T2 y is
/// free of the unknown input.
struct ModeDecomposition {
  Index p_H = 0;
  Matrix Sigma;  // p_H x p_H
  Matrix U1, U2;
  Matrix V1, V2;
  Matrix T1, T2;
  Matrix C1, C2;
  Matrix D1, D2;
  Matrix G1, G2;
  Matrix H1;  // U1 * Sigma

  Index residual_dim() const { return T2.rows(); }
};

inline ModeDecomposition decompose(const ModeModel& mode) {
  const Matrix& H = mode.H;
  const Index l = H.rows();
  const Index p = H.cols();
  ModeDecomposition dec;
  const SvdResult s = svd(H);
  dec.p_H = rank(H);
  const Index r = dec.p_H;
  Matrix U = s.U;
  Matrix V = s.V;
  if (r == 0) {
    // Any unitary works here; identity keeps T2 reproducible.
    U = Matrix::Identity(l, l);
    V = Matrix::Identity(p, p);
  }
  dec.Sigma = s.singular_values.head(r).asDiagonal();
  dec.U1 = U.leftCols(r);
  dec.U2 = U.rightCols(l - r);
  dec.V1 = V.leftCols(r);
  dec.V2 = V.rightCols(p - r);
  dec.T1 = dec.U1.transpose();
  dec.T2 = dec.U2.transpose();
  dec.C1 = dec.T1 * mode.C;
  dec.C2 = dec.T2 * mode.C;
  dec.D1 = dec.T1 * mode.D;
  dec.D2 = dec.T2 * mode.D;
  dec.G1 = mode.G * dec.V1;
  dec.G2 = mode.G * dec.V2;
  dec.H1 = dec.U1 * dec.Sigma;
  return dec;
}

/// z1 = T1 y, z2 = T2 y.
inline std::pair<Vector, Vector> split_output(const ModeDecomposition& dec, const Vector& y) {
  const Index l = dec.U1.rows();
  if (y.size() != l) {
    throw ConfigError("split_output: measurement has length " + std::to_string(y.size()) +
                      ", expected " + std::to_string(l));
  }
  return {dec.T1 * y, dec.T2 * y};
}

}  // namespace setobs
