#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <thread>
#include <vector>

#include "setobs/decomposition.hpp"
#include "setobs/errors.hpp"
#include "setobs/gain_synthesis.hpp"
#include "setobs/numeric.hpp"
#include "setobs/observer_bank.hpp"
#include "setobs/system_model.hpp"

namespace setobs {

inline Vector compute_residual(const ModeDecomposition& dec, const ObserverState& s,
                               const Vector& u_k, const Vector& y_k) {
  return dec.T2 * y_k - dec.C2 * s.x_star - dec.D2 * u_k;
}

/// Noise and mismatch radii of one mode, used to size the hypercube.
struct ResidualBounds {
  double delta0 = 0.0;
  double eta_w = 0.0;
  double eta_v = 0.0;
  double lipschitz = 0.0;
};

inline ResidualBounds residual_bounds(const SwitchedSystem& sys, std::size_t q) {
  return {sys.delta_x0, sys.eta_w.at(q - 1), sys.eta_v.at(q - 1), sys.mode(q).lipschitz};
}

/// Residual as a linear map of the stacked disturbance history
///   t_k = [x0err; v_0..v_k; w_0..w_{k-1}; df_0..df_{k-1}].
/// With S_1 = -C2 Phi Psi, S_{i+1} = -S_i E Psi:
///   A_k = S_k, F_0 = C2 Phi, F_i = S_i E, J_0 = Y_cal, J_i = S_i W_cal,
///   r_k = A_k x0err + sum_i F_i df_{k-1-i} + J_i wbar_{k-1-i}.
struct ResidualMatrixCache {
  long k = 0;
  Index n = 0;
  Index l = 0;
  Matrix A_k;
  std::vector<Matrix> F_blocks;
  std::vector<Matrix> J_blocks;
  Matrix assembled;

  Index col_x0() const { return 0; }
  Index col_v(long j) const { return n + l * j; }
  Index col_w(long j) const { return n + l * (k + 1) + n * j; }
  Index col_df(long j) const { return n + l * (k + 1) + n * k + n * j; }
  Index dim() const { return n + l * (k + 1) + 2 * n * k; }
};

/// Blocks S_1..S_K; a block that overflows stays non-finite from then on.
class ResidualBlocks {
 public:
  ResidualBlocks(const ObserverGains& g, const ModeDecomposition& dec)
      : F0_(dec.C2 * g.Phi), J0_(g.Y_cal), E_(g.E), W_cal_(g.W_cal), K_(g.E * g.Psi) {
    S_.push_back(Matrix());  // index 0 unused
    S_.push_back(-dec.C2 * g.Phi * g.Psi);
  }

  const Matrix& S(long i) {
    while (static_cast<long>(S_.size()) <= i) {
      const Matrix& last = S_.back();
      S_.push_back(last.allFinite() ? Matrix(-last * K_) : last);
    }
    return S_[static_cast<std::size_t>(i)];
  }
  Matrix F(long i) { return i == 0 ? F0_ : Matrix(S(i) * E_); }
  Matrix J(long i) { return i == 0 ? J0_ : Matrix(S(i) * W_cal_); }

 private:
  Matrix F0_, J0_, E_, W_cal_, K_;
  std::vector<Matrix> S_;
};

inline ResidualMatrixCache build_residual_matrix(const ObserverGains& g,
                                                 const ModeDecomposition& dec,
                                                 const ModeModel& mode, long k) {
  if (k < 1) throw ConfigError("residual matrix needs k >= 1");
  ResidualBlocks blocks(g, dec);
  ResidualMatrixCache c;
  c.k = k;
  c.n = mode.n();
  c.l = mode.l();
  const Index n = c.n;
  const Index l = c.l;
  const double s2 = std::sqrt(2.0);
  c.A_k = blocks.S(k);
  c.assembled = Matrix::Zero(dec.residual_dim(), c.dim());
  c.assembled.middleCols(c.col_x0(), n) += c.A_k;
  for (long i = 0; i < k; ++i) {
    c.F_blocks.push_back(blocks.F(i));
    c.J_blocks.push_back(blocks.J(i));
    const Matrix& J = c.J_blocks.back();
    const long j = k - 1 - i;
    c.assembled.middleCols(c.col_v(j), l) += J.leftCols(l) / s2;
    c.assembled.middleCols(c.col_w(j), n) += J.middleCols(l, n);
    c.assembled.middleCols(c.col_v(j + 1), l) += J.rightCols(l) / s2;
    c.assembled.middleCols(c.col_df(j), n) += c.F_blocks.back();
  }
  return c;
}

/// Per-coordinate half-widths of the disturbance hypercube.
/// radius_seq[j] is the a-priori state radius at step j.
inline Vector box_radii(const ResidualMatrixCache& c, const ResidualBounds& b,
                        const std::vector<double>& radius_seq) {
  if (static_cast<long>(radius_seq.size()) < c.k) throw ConfigError("radius sequence too short");
  Vector r(c.dim());
  r.segment(c.col_x0(), c.n).setConstant(b.delta0);
  r.segment(c.col_v(0), c.l * (c.k + 1)).setConstant(b.eta_v);
  r.segment(c.col_w(0), c.n * c.k).setConstant(b.eta_w);
  for (long j = 0; j < c.k; ++j) {
    r.segment(c.col_df(j), c.n).setConstant(bound_product(b.lipschitz, radius_seq[j]));
  }
  return r;
}

/// Norms of the blocks, which is all the triangle-inequality bound needs.
struct BlockNorms {
  std::vector<double> a;      // |S_k|, index k (0 unused)
  std::vector<double> f;      // |F_i|
  std::vector<double> noise;  // eta_v/sqrt2 (|J_i^va| + |J_i^vb|) + eta_w |J_i^w|
};

inline BlockNorms block_norms(const ObserverGains& g, const ModeDecomposition& dec,
                              const ModeModel& mode, const ResidualBounds& b, long K) {
  ResidualBlocks blocks(g, dec);
  const Index n = mode.n();
  const Index l = mode.l();
  const double s2 = std::sqrt(2.0);
  BlockNorms out;
  out.a.push_back(0.0);
  for (long i = 0; i <= K; ++i) {
    if (i >= 1) out.a.push_back(spectral_norm(blocks.S(i)));
    if (i == K) break;
    const Matrix F = blocks.F(i);
    const Matrix J = blocks.J(i);
    out.f.push_back(spectral_norm(F));
    const double va = spectral_norm(J.leftCols(l));
    const double vb = spectral_norm(J.rightCols(l));
    const double w = spectral_norm(J.middleCols(l, n));
    out.noise.push_back(bound_product(b.eta_v / s2, va + vb) + bound_product(b.eta_w, w));
  }
  return out;
}

/// Triangle-inequality bound on |r_k| from precomputed block norms.
inline double delta_tri(const BlockNorms& bn, const ResidualBounds& b,
                        const std::vector<double>& radius_seq, long k) {
  if (k < 1) throw ConfigError("delta_tri needs k >= 1");
  if (static_cast<long>(bn.f.size()) < k || static_cast<long>(radius_seq.size()) < k) {
    throw ConfigError("delta_tri: block norms or radii do not cover k");
  }
  double val = bound_product(bn.a[static_cast<std::size_t>(k)], b.delta0);
  for (long i = 0; i < k; ++i) {
    const double df = bound_product(b.lipschitz, radius_seq[static_cast<std::size_t>(k - 1 - i)]);
    val += bound_product(bn.f[static_cast<std::size_t>(i)], df) + bn.noise[static_cast<std::size_t>(i)];
  }
  return val;
}

inline double delta_tri(const ObserverGains& g, const ModeDecomposition& dec, const ModeModel& mode,
                        const ResidualBounds& b, long k, const std::vector<double>& radius_seq) {
  return delta_tri(block_norms(g, dec, mode, b, k), b, radius_seq, k);
}

struct VertexMax {
  double value = 0.0;  // +inf when capped
  std::uint64_t vertices = 0;
  bool capped = false;
  int effective_dim = 0;
};

/// max over sign vectors s of |B s|_2 where B = A diag(radii). Columns whose
/// contribution is below 1e-13 of the total are bounded separately by the
/// triangle inequality; one sign is fixed since the objective is even.
inline VertexMax vertex_maximum(const Matrix& A, const Vector& radii, std::uint64_t max_vertices,
                                unsigned threads = 0) {
  if (max_vertices < 2) throw ConfigError("max_vertices must be at least 2");
  if (A.cols() != radii.size()) throw ConfigError("vertex_maximum: radii size mismatch");
  VertexMax out;
  if (A.rows() == 0 || A.cols() == 0) return out;
  if (!A.allFinite() || !radii.allFinite()) {
    out.value = std::numeric_limits<double>::infinity();
    out.capped = true;
    return out;
  }
  std::vector<Vector> cols;
  std::vector<double> norms;
  double total = 0.0;
  for (Index j = 0; j < A.cols(); ++j) {
    const double nj = bound_product(A.col(j).norm(), radii(j));
    norms.push_back(nj);
    total += nj;
  }
  double slack = 0.0;
  for (Index j = 0; j < A.cols(); ++j) {
    if (norms[j] == 0.0) continue;
    if (norms[j] <= 1e-13 * total) {
      slack += norms[j];
    } else {
      cols.push_back(A.col(j) * radii(j));
    }
  }
  const int m = static_cast<int>(cols.size());
  out.effective_dim = m;
  if (m == 0) {
    out.value = slack;
    return out;
  }
  const int free_bits = m - 1;
  if (free_bits >= 63 || (std::uint64_t{1} << free_bits) > max_vertices) {
    out.value = std::numeric_limits<double>::infinity();
    out.capped = true;
    return out;
  }
  const std::uint64_t count = std::uint64_t{1} << free_bits;
  out.vertices = count;
  // Low bits are walked in Gray-code order inside a chunk; the chunk base is
  // recomputed from scratch so rounding does not accumulate across chunks.
  const int low_bits = std::min(free_bits, 12);
  const int high_bits = free_bits - low_bits;
  const std::uint64_t chunks = std::uint64_t{1} << high_bits;
  auto chunk_max = [&](std::uint64_t chunk) {
    Vector v = cols[static_cast<std::size_t>(m - 1)];
    for (int b = 0; b < low_bits; ++b) v -= cols[static_cast<std::size_t>(b)];
    for (int b = 0; b < high_bits; ++b) {
      const auto& c = cols[static_cast<std::size_t>(low_bits + b)];
      if ((chunk >> b) & 1U) {
        v += c;
      } else {
        v -= c;
      }
    }
    double best = v.squaredNorm();
    std::uint64_t gray = 0;
    const std::uint64_t steps = std::uint64_t{1} << low_bits;
    for (std::uint64_t t = 1; t < steps; ++t) {
      const int bit = __builtin_ctzll(t);
      gray ^= std::uint64_t{1} << bit;
      const auto& c = cols[static_cast<std::size_t>(bit)];
      if ((gray >> bit) & 1U) {
        v.noalias() += 2.0 * c;
      } else {
        v.noalias() -= 2.0 * c;
      }
      best = std::max(best, v.squaredNorm());
    }
    return best;
  };
  unsigned nthreads = threads ? threads : std::max(1U, std::thread::hardware_concurrency());
  nthreads = static_cast<unsigned>(std::min<std::uint64_t>(nthreads, chunks));
  double best = 0.0;
  if (nthreads <= 1) {
    for (std::uint64_t c = 0; c < chunks; ++c) best = std::max(best, chunk_max(c));
  } else {
    std::atomic<std::uint64_t> next{0};
    std::vector<double> partial(nthreads, 0.0);
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nthreads; ++t) {
      pool.emplace_back([&, t] {
        double local = 0.0;
        for (std::uint64_t c = next++; c < chunks; c = next++) local = std::max(local, chunk_max(c));
        partial[t] = local;
      });
    }
    for (auto& th : pool) th.join();
    for (double p : partial) best = std::max(best, p);
  }
  out.value = std::sqrt(best) + slack;
  return out;
}

inline VertexMax delta_inf(const ResidualMatrixCache& c, const Vector& radii,
                           std::uint64_t max_vertices, unsigned threads = 0) {
  return vertex_maximum(c.assembled, radii, max_vertices, threads);
}

/// Norm shared by every vertex of the disturbance hypercube.
inline double eta_t(const ResidualBounds& b, Index n, Index l, long k,
                    const std::vector<double>& radius_seq) {
  if (k < 1) throw ConfigError("eta_t needs k >= 1");
  const double L2 = b.lipschitz * b.lipschitz;
  double tail = 0.0;
  for (long j = 1; j <= k - 1; ++j) tail += radius_seq.at(static_cast<std::size_t>(j)) * radius_seq.at(static_cast<std::size_t>(j));
  const double nn = static_cast<double>(n);
  const double ll = static_cast<double>(l);
  const double kk = static_cast<double>(k);
  return std::sqrt(nn * ((1.0 + L2) * b.delta0 * b.delta0 + kk * b.eta_w * b.eta_w + L2 * tail) +
                   ll * (kk + 1.0) * b.eta_v * b.eta_v);
}

struct ThresholdReport {
  long k = 0;
  double delta_tri = 0.0;
  double delta_inf = std::numeric_limits<double>::infinity();
  double delta_hat = 0.0;
  std::uint64_t vertices_enumerated = 0;
  bool capped = false;
};

struct ThresholdPolicy {
  std::uint64_t max_vertices = std::uint64_t{1} << 20;
  unsigned threads = 0;  // 0: hardware concurrency
};

/// Thresholds for k = 1..K from the a-priori radius sequence. Once the
/// enumeration is capped it stays capped, since the dimension only grows.
inline std::vector<ThresholdReport> tabulate_thresholds(const ObserverGains& g,
                                                        const ModeDecomposition& dec,
                                                        const ModeModel& mode,
                                                        const ResidualBounds& b, long K,
                                                        const ThresholdPolicy& policy = {}) {
  const std::vector<double> radii = radius_sequence(g, b.delta0, K);
  const BlockNorms bn = block_norms(g, dec, mode, b, K);
  std::vector<ThresholdReport> out;
  bool capped = false;
  for (long k = 1; k <= K; ++k) {
    ThresholdReport rep;
    rep.k = k;
    rep.delta_tri = delta_tri(bn, b, radii, k);
    if (!capped) {
      const ResidualMatrixCache c = build_residual_matrix(g, dec, mode, k);
      const VertexMax vm = delta_inf(c, box_radii(c, b, radii), policy.max_vertices, policy.threads);
      capped = vm.capped;
      rep.delta_inf = vm.value;
      rep.vertices_enumerated = vm.vertices;
    }
    rep.capped = capped;
    rep.delta_hat = std::min(rep.delta_tri, rep.delta_inf);
    out.push_back(rep);
  }
  return out;
}

inline ThresholdReport threshold(const ObserverGains& g, const ModeDecomposition& dec,
                                 const ModeModel& mode, const ResidualBounds& b, long k,
                                 const ThresholdPolicy& policy = {}) {
  const std::vector<double> radii = radius_sequence(g, b.delta0, k);
  ThresholdReport rep;
  rep.k = k;
  rep.delta_tri = delta_tri(g, dec, mode, b, k, radii);
  const ResidualMatrixCache c = build_residual_matrix(g, dec, mode, k);
  const VertexMax vm = delta_inf(c, box_radii(c, b, radii), policy.max_vertices, policy.threads);
  rep.delta_inf = vm.value;
  rep.capped = vm.capped;
  rep.vertices_enumerated = vm.vertices;
  rep.delta_hat = std::min(rep.delta_tri, rep.delta_inf);
  return rep;
}

/// Limit of the triangle bound, iterated until the relative change drops
/// below rel_tol. Returns +inf if that does not happen within max_steps.
inline double steady_delta_tri(const ObserverGains& g, const ModeDecomposition& dec,
                               const ModeModel& mode, const ResidualBounds& b,
                               double rel_tol = 1e-8, long max_steps = 4000) {
  if (!(g.theta < 1.0)) return std::numeric_limits<double>::infinity();
  const std::vector<double> radii = radius_sequence(g, b.delta0, max_steps);
  const BlockNorms bn = block_norms(g, dec, mode, b, max_steps);
  double prev = delta_tri(bn, b, radii, 1);
  for (long k = 2; k <= max_steps; ++k) {
    const double cur = delta_tri(bn, b, radii, k);
    if (!std::isfinite(cur)) return std::numeric_limits<double>::infinity();
    if (std::abs(cur - prev) <= rel_tol * std::max(std::abs(cur), std::numeric_limits<double>::min())) {
      return cur;
    }
    prev = cur;
  }
  return std::numeric_limits<double>::infinity();
}

}  // namespace setobs
