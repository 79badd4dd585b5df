#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "setobs/decomposition.hpp"
#include "setobs/errors.hpp"
#include "setobs/gain_synthesis.hpp"
#include "setobs/numeric.hpp"
#include "setobs/system_model.hpp"

namespace setobs {

/// Matrix-valued affine function of the decision vector:
/// constant + sum_i x_i * coeff[i].
struct AffineMatrix {
  Matrix constant;
  std::map<int, Matrix> coeff;

  AffineMatrix() = default;
  explicit AffineMatrix(Matrix c) : constant(std::move(c)) {}
  static AffineMatrix zero(Index r, Index c) { return AffineMatrix(Matrix::Zero(r, c)); }

  Index rows() const { return constant.rows(); }
  Index cols() const { return constant.cols(); }
};

inline AffineMatrix operator+(const AffineMatrix& a, const AffineMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error("AffineMatrix: size mismatch in sum");
  }
  AffineMatrix out(a.constant + b.constant);
  out.coeff = a.coeff;
  for (const auto& [v, m] : b.coeff) {
    auto it = out.coeff.find(v);
    if (it == out.coeff.end()) {
      out.coeff.emplace(v, m);
    } else {
      it->second += m;
    }
  }
  return out;
}

inline AffineMatrix operator*(double s, const AffineMatrix& a) {
  AffineMatrix out(s * a.constant);
  for (const auto& [v, m] : a.coeff) out.coeff.emplace(v, s * m);
  return out;
}

inline AffineMatrix operator-(const AffineMatrix& a) { return -1.0 * a; }
inline AffineMatrix operator-(const AffineMatrix& a, const AffineMatrix& b) { return a + (-b); }
inline AffineMatrix operator+(const AffineMatrix& a, const Matrix& b) { return a + AffineMatrix(b); }
inline AffineMatrix operator-(const AffineMatrix& a, const Matrix& b) { return a + AffineMatrix(-b); }
inline AffineMatrix operator+(const Matrix& a, const AffineMatrix& b) { return AffineMatrix(a) + b; }
inline AffineMatrix operator-(const Matrix& a, const AffineMatrix& b) { return AffineMatrix(a) - b; }

inline AffineMatrix operator*(const Matrix& l, const AffineMatrix& a) {
  AffineMatrix out(l * a.constant);
  for (const auto& [v, m] : a.coeff) out.coeff.emplace(v, l * m);
  return out;
}

inline AffineMatrix operator*(const AffineMatrix& a, const Matrix& r) {
  AffineMatrix out(a.constant * r);
  for (const auto& [v, m] : a.coeff) out.coeff.emplace(v, m * r);
  return out;
}

inline AffineMatrix transpose(const AffineMatrix& a) {
  AffineMatrix out(a.constant.transpose());
  for (const auto& [v, m] : a.coeff) out.coeff.emplace(v, m.transpose());
  return out;
}

/// Block matrix from a grid of affine pieces; row heights and column widths
/// must agree across the grid.
inline AffineMatrix assemble_blocks(const std::vector<std::vector<AffineMatrix>>& grid) {
  std::vector<Index> heights, widths;
  for (const auto& row : grid) heights.push_back(row.front().rows());
  for (const auto& cell : grid.front()) widths.push_back(cell.cols());
  Index total_r = 0, total_c = 0;
  for (Index h : heights) total_r += h;
  for (Index w : widths) total_c += w;
  AffineMatrix out = AffineMatrix::zero(total_r, total_c);
  Index r0 = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i].size() != widths.size()) throw Error("assemble_blocks: ragged grid");
    Index c0 = 0;
    for (std::size_t j = 0; j < grid[i].size(); ++j) {
      const AffineMatrix& cell = grid[i][j];
      if (cell.rows() != heights[i] || cell.cols() != widths[j]) {
        throw Error("assemble_blocks: block size mismatch");
      }
      out.constant.block(r0, c0, heights[i], widths[j]) = cell.constant;
      for (const auto& [v, m] : cell.coeff) {
        auto it = out.coeff.find(v);
        if (it == out.coeff.end()) {
          it = out.coeff.emplace(v, Matrix::Zero(total_r, total_c)).first;
        }
        it->second.block(r0, c0, heights[i], widths[j]) += m;
      }
      c0 += widths[j];
    }
    r0 += heights[i];
  }
  return out;
}

/// Decision variables, flattened to the SDPA vector x_1..x_m.
class VariableSet {
 public:
  /// Symmetric n x n variable, basis E_ii and E_ij + E_ji.
  AffineMatrix add_symmetric(const std::string& name, Index n) {
    AffineMatrix out = AffineMatrix::zero(n, n);
    for (Index i = 0; i < n; ++i) {
      for (Index j = i; j < n; ++j) {
        Matrix b = Matrix::Zero(n, n);
        b(i, j) = 1.0;
        b(j, i) = 1.0;
        out.coeff.emplace(push(name + "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")"), b);
      }
    }
    return out;
  }

  AffineMatrix add_full(const std::string& name, Index r, Index c) {
    AffineMatrix out = AffineMatrix::zero(r, c);
    for (Index i = 0; i < r; ++i) {
      for (Index j = 0; j < c; ++j) {
        Matrix b = Matrix::Zero(r, c);
        b(i, j) = 1.0;
        out.coeff.emplace(push(name + "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")"), b);
      }
    }
    return out;
  }

  /// Scalar variable; returns its index.
  int add_scalar(const std::string& name) { return push(name); }

  int count() const { return static_cast<int>(labels_.size()); }
  const std::vector<std::string>& labels() const { return labels_; }

 private:
  int push(std::string label) {
    labels_.push_back(std::move(label));
    return count() - 1;
  }
  std::vector<std::string> labels_;
};

/// s * I_n as an affine matrix in scalar variable `var`.
inline AffineMatrix scaled_identity(int var, Index n, double s = 1.0) {
  AffineMatrix out = AffineMatrix::zero(n, n);
  out.coeff.emplace(var, s * Matrix::Identity(n, n));
  return out;
}

enum class SdpBranch { A, B };

inline const char* to_string(SdpBranch b) { return b == SdpBranch::A ? "branch_A" : "branch_B"; }

/// alpha, eps1 and eps2 multiply other decision variables in the original
/// problem. They are fixed here so each branch is a plain SDP.
struct SdpParameters {
  double alpha = 0.5;
  double eps1 = 1.0;
  double eps2 = 1.0;
  double margin = 1e-6;  // strict inequalities become >= margin
};

struct SdpBlock {
  std::string label;
  int group = 0;          // 1..8 for the stability LMIs, 0 for domain/bounds
  bool diagonal = false;  // LP block
  AffineMatrix expr;      // constraint expr >= 0
};

struct SdpExport {
  SdpBranch branch = SdpBranch::A;
  SdpParameters params;
  int num_vars = 0;
  std::vector<std::string> var_labels;
  Vector objective;
  std::vector<SdpBlock> blocks;  // zero-size blocks already dropped
  std::vector<std::string> notes;
};

namespace detail {

inline void require_symmetric(const SdpBlock& b) {
  auto sym = [](const Matrix& m) {
    return (m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff());
  };
  if (b.expr.rows() != b.expr.cols()) throw Error("sdp block " + b.label + " is not square");
  if (b.expr.rows() == 0) return;
  bool ok = sym(b.expr.constant);
  for (const auto& [v, m] : b.expr.coeff) ok = ok && sym(m);
  if (!ok) throw Error("sdp block " + b.label + " is not symmetric");
}

inline AffineMatrix lp_diagonal(const std::vector<AffineMatrix>& scalars) {
  const Index k = static_cast<Index>(scalars.size());
  AffineMatrix out = AffineMatrix::zero(k, k);
  for (Index i = 0; i < k; ++i) {
    out.constant(i, i) = scalars[i].constant(0, 0);
    for (const auto& [v, m] : scalars[i].coeff) {
      auto it = out.coeff.find(v);
      if (it == out.coeff.end()) it = out.coeff.emplace(v, Matrix::Zero(k, k)).first;
      it->second(i, i) += m(0, 0);
    }
  }
  return out;
}

inline AffineMatrix scalar_expr(int var, double coef, double c) {
  AffineMatrix out(Matrix::Constant(1, 1, c));
  out.coeff.emplace(var, Matrix::Constant(1, 1, coef));
  return out;
}

}  // namespace detail

inline SdpExport assemble_branch(const ModeModel& mode, const ModeDecomposition& dec,
                                 const ObserverGains& g, SdpBranch branch,
                                 const SdpParameters& prm) {
  if (!(prm.alpha >= 0.0 && prm.alpha <= 1.0)) throw ConfigError("sdp: alpha must lie in [0, 1]");
  if (!(prm.eps1 > 0.0) || !(prm.eps2 > 0.0)) throw ConfigError("sdp: eps1, eps2 must be positive");
  if (!(prm.margin > 0.0)) throw ConfigError("sdp: margin must be positive");
  const Index n = mode.n();
  const Index r = dec.residual_dim();
  const Index nw = g.R_mat.cols();
  const Matrix In = Matrix::Identity(n, n);
  const Matrix Ir = Matrix::Identity(r, r);
  const Matrix& Phi = g.Phi;
  const Matrix& Psi = g.Psi;
  const Matrix& R = g.R_mat;
  const Matrix& Om = g.Y_cal;
  const Matrix& C2 = dec.C2;
  const double Lf2 = mode.lipschitz * mode.lipschitz;

  VariableSet vars;
  const AffineMatrix P = vars.add_symmetric("P", n);
  const AffineMatrix Gam = vars.add_symmetric("Gamma", r);
  const AffineMatrix GamT = vars.add_symmetric("Gamma_tilde", n);
  const AffineMatrix Qb = vars.add_symmetric("Q_breve", n);
  const AffineMatrix Zb = vars.add_symmetric("Z_breve", n);
  const AffineMatrix Y = vars.add_full("Y", n, r);
  const int rho2 = vars.add_scalar("rho^2");
  const int kap = vars.add_scalar("kappa");
  const int kap1 = vars.add_scalar("kappa1");
  const int kap2 = vars.add_scalar("kappa2");

  const AffineMatrix PYC = P - Y * C2;
  const AffineMatrix Yt1 = PYC * Phi;
  const AffineMatrix Yt2 = -(PYC * Matrix(Phi * Psi));
  const AffineMatrix Mt1 = -scaled_identity(kap, n) - Qb;
  const AffineMatrix Mt2 = scaled_identity(kap, n, -Lf2) + (1.0 - prm.alpha) * P - GamT;
  const AffineMatrix Mt3 = scaled_identity(kap, n);

  const AffineMatrix YOm = Y * Om;
  const AffineMatrix RtYOm = Matrix(R.transpose()) * YOm;
  const AffineMatrix PR = P * R;
  const AffineMatrix C2tYtR = Matrix(C2.transpose()) * transpose(Y) * R;
  const double inv_eps = 1.0 / prm.eps1 + 1.0 / prm.eps2;
  const AffineMatrix N11 = scaled_identity(rho2, nw) + RtYOm + transpose(RtYOm) -
                           Matrix(R.transpose()) * PR -
                           Matrix(Om.transpose()) * (Gam + Matrix(inv_eps * Ir)) * Om;
  const AffineMatrix N21 = Matrix(Psi.transpose() * Phi.transpose()) * (PR - YOm - C2tYtR);
  const AffineMatrix N31 = Matrix(Phi.transpose()) * (YOm + C2tYtR - PR);
  const Matrix C2PhiPsi = C2 * Phi * Psi;
  const Matrix C2Phi = C2 * Phi;
  const AffineMatrix N22 = Matrix(-(1.0 + Lf2) * In) + prm.alpha * P -
                           AffineMatrix(prm.eps1 * C2PhiPsi.transpose() * C2PhiPsi);
  const AffineMatrix N33 = AffineMatrix(Matrix(In - prm.eps2 * C2Phi.transpose() * C2Phi));
  const AffineMatrix Znn = AffineMatrix::zero(n, n);

  SdpExport out;
  out.branch = branch;
  out.params = prm;
  auto add = [&out](std::string label, int group, AffineMatrix e, bool diag = false) {
    SdpBlock b{std::move(label), group, diag, std::move(e)};
    if (b.expr.rows() == 0) {
      out.notes.push_back("block " + b.label + " has size 0 and is omitted");
      return;
    }
    detail::require_symmetric(b);
    out.blocks.push_back(std::move(b));
  };

  add("lmi1", 1, assemble_blocks({{P, Yt1}, {transpose(Yt1), Mt1}}));
  add("lmi2", 2, assemble_blocks({{P, Yt2}, {transpose(Yt2), Mt2}}));
  add("lmi3", 3, assemble_blocks({{P, Yt1}, {transpose(Yt1), Mt3}}));
  add("lmi4", 4, assemble_blocks({{P, Yt2}, {transpose(Yt2), Zb}}));
  add("lmi5", 5, assemble_blocks({{GamT, Zb}, {transpose(Zb), Matrix(Psi.transpose()) * Qb * Psi}}));
  add("lmi6", 6,
      assemble_blocks({{Ir - Gam, AffineMatrix::zero(r, n), AffineMatrix::zero(r, r)},
                       {AffineMatrix::zero(n, r), P, Y},
                       {AffineMatrix::zero(r, r), transpose(Y), AffineMatrix(Ir)}}));
  add("lmi7", 7,
      assemble_blocks({{N11, transpose(N21), transpose(N31)},
                       {N21, N22, Znn},
                       {N31, Znn, N33}}));
  add("lmi8_lower", 8, P - scaled_identity(kap1, n));
  add("lmi8_upper", 8, scaled_identity(kap2, n) - P);
  add("P_pos", 0, P - Matrix(prm.margin * In));
  add("Gamma_pos", 0, Gam - Matrix(prm.margin * Ir));
  add("Gamma_tilde_psd", 0, GamT);
  add("Q_breve_psd", 0, Qb);

  const double m = prm.margin;
  std::vector<AffineMatrix> lp = {
      detail::scalar_expr(rho2, 1.0, -m),
      detail::scalar_expr(kap, 1.0, -m),
      detail::scalar_expr(kap1, 1.0, -m),
      detail::scalar_expr(kap2, 1.0, -m),
  };
  if (branch == SdpBranch::A) {
    lp.push_back(detail::scalar_expr(kap1, 1.0, -1.0));                          // kappa1 >= 1
    lp.push_back(detail::scalar_expr(kap2, -1.0, 1.0 - m) + detail::scalar_expr(kap1, 1.0, 0.0));  // kappa2 - kappa1 < 1
  } else {
    lp.push_back(detail::scalar_expr(kap2, -1.0, 1.0));                          // kappa2 <= 1
    lp.push_back(detail::scalar_expr(kap1, 1.0, -0.5 - m));                      // kappa1 > 0.5
  }
  add("bounds", 0, detail::lp_diagonal(lp), true);

  out.num_vars = vars.count();
  out.var_labels = vars.labels();
  out.objective = Vector::Zero(out.num_vars);
  out.objective(rho2) = 1.0;
  return out;
}

inline std::array<SdpExport, 2> assemble_sdp(const ModeModel& mode, const ModeDecomposition& dec,
                                             const SdpParameters& prm = {}) {
  // R, Q, Omega, Phi and Psi do not depend on L_tilde or on the noise bounds.
  const ObserverGains g = synthesize_gains(mode, dec, 0.0, 0.0);
  return {assemble_branch(mode, dec, g, SdpBranch::A, prm),
          assemble_branch(mode, dec, g, SdpBranch::B, prm)};
}

/// Flat SDPA sparse problem: maximize nothing, minimize c^T x subject to
/// sum_i x_i F_i - F_0 >= 0.
struct SdpaEntry {
  int matno;
  int block;
  int i;
  int j;
  double value;
  bool operator==(const SdpaEntry&) const = default;
};

struct SdpaProblem {
  int m = 0;
  std::vector<int> block_struct;  // negative size marks a diagonal block
  std::vector<double> c;
  std::vector<SdpaEntry> entries;
};

inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline SdpaProblem to_sdpa(const SdpExport& ex) {
  SdpaProblem p;
  p.m = ex.num_vars;
  for (const auto& b : ex.blocks) {
    const int s = static_cast<int>(b.expr.rows());
    p.block_struct.push_back(b.diagonal ? -s : s);
  }
  p.c.assign(ex.objective.data(), ex.objective.data() + ex.objective.size());
  auto emit = [&p](int matno, int blk, const Matrix& m, bool diag) {
    for (Index i = 0; i < m.rows(); ++i) {
      for (Index j = i; j < (diag ? i + 1 : m.cols()); ++j) {
        if (m(i, j) != 0.0) {
          p.entries.push_back({matno, blk, static_cast<int>(i + 1), static_cast<int>(j + 1), m(i, j)});
        }
      }
    }
  };
  for (std::size_t b = 0; b < ex.blocks.size(); ++b) {
    emit(0, static_cast<int>(b + 1), -ex.blocks[b].expr.constant, ex.blocks[b].diagonal);
  }
  for (int v = 0; v < ex.num_vars; ++v) {
    for (std::size_t b = 0; b < ex.blocks.size(); ++b) {
      auto it = ex.blocks[b].expr.coeff.find(v);
      if (it != ex.blocks[b].expr.coeff.end()) {
        emit(v + 1, static_cast<int>(b + 1), it->second, ex.blocks[b].diagonal);
      }
    }
  }
  return p;
}

inline void write_sdpa(const SdpExport& ex, std::ostream& os) {
  const SdpaProblem p = to_sdpa(ex);
  os << "\"setobs observer-gain SDP, " << to_string(ex.branch) << "\n";
  os << "* fixed parameters: alpha=" << format_double(ex.params.alpha)
     << " eps1=" << format_double(ex.params.eps1) << " eps2=" << format_double(ex.params.eps2)
     << " margin=" << format_double(ex.params.margin) << "\n";
  os << "* L_tilde = P^{-1} Y from the solution\n";
  for (std::size_t b = 0; b < ex.blocks.size(); ++b) {
    os << "* block " << b + 1 << ": " << ex.blocks[b].label << "\n";
  }
  for (const auto& note : ex.notes) os << "* " << note << "\n";
  for (int v = 0; v < ex.num_vars; ++v) os << "* x" << v + 1 << " = " << ex.var_labels[v] << "\n";
  os << p.m << "\n" << p.block_struct.size() << "\n";
  for (std::size_t b = 0; b < p.block_struct.size(); ++b) {
    os << (b ? " " : "") << p.block_struct[b];
  }
  os << "\n";
  for (std::size_t i = 0; i < p.c.size(); ++i) os << (i ? " " : "") << format_double(p.c[i]);
  os << "\n";
  for (const auto& e : p.entries) {
    os << e.matno << " " << e.block << " " << e.i << " " << e.j << " " << format_double(e.value) << "\n";
  }
}

/// Parser for the subset of SDPA sparse format that write_sdpa emits, plus
/// the usual "{}(),"-punctuated header variants.
inline SdpaProblem read_sdpa(std::istream& is) {
  std::vector<std::string> tokens;
  std::string line;
  bool in_header = true;
  while (std::getline(is, line)) {
    if (in_header && (line.empty() || line[0] == '"' || line[0] == '*')) continue;
    in_header = false;
    for (char& ch : line) {
      if (ch == ',' || ch == '{' || ch == '}' || ch == '(' || ch == ')') ch = ' ';
    }
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) tokens.push_back(tok);
  }
  std::size_t pos = 0;
  auto next = [&]() -> const std::string& {
    if (pos >= tokens.size()) throw ConfigError("sdpa: unexpected end of input");
    return tokens[pos++];
  };
  auto to_int = [](const std::string& s) {
    int v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw ConfigError("sdpa: bad integer '" + s + "'");
    return v;
  };
  auto to_dbl = [](const std::string& s) {
    double v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw ConfigError("sdpa: bad number '" + s + "'");
    return v;
  };
  SdpaProblem p;
  p.m = to_int(next());
  const int nb = to_int(next());
  for (int b = 0; b < nb; ++b) p.block_struct.push_back(to_int(next()));
  for (int i = 0; i < p.m; ++i) p.c.push_back(to_dbl(next()));
  while (pos < tokens.size()) {
    SdpaEntry e{};
    e.matno = to_int(next());
    e.block = to_int(next());
    e.i = to_int(next());
    e.j = to_int(next());
    e.value = to_dbl(next());
    if (e.matno < 0 || e.matno > p.m || e.block < 1 || e.block > nb) {
      throw ConfigError("sdpa: entry index out of range");
    }
    p.entries.push_back(e);
  }
  return p;
}

}  // namespace setobs
