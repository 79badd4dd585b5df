#include <charconv>
#include <cstring>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "setobs/sdp_export.hpp"

using namespace setobs;

namespace {

Matrix evaluate(const AffineMatrix& e, const Vector& x) {
  Matrix out = e.constant;
  for (const auto& [v, m] : e.coeff) out += x(v) * m;
  return out;
}

const SdpBlock& block(const SdpExport& ex, const std::string& label) {
  for (const auto& b : ex.blocks) {
    if (b.label == label) return b;
  }
  throw std::runtime_error("no block " + label);
}

// Decision variables rebuilt from the label map, independent of the assembly.
struct Decision {
  std::map<std::string, Matrix> mats;
  std::map<std::string, double> scalars;
};

Decision decode(const SdpExport& ex, const Vector& x, Index n, Index r) {
  Decision d;
  d.mats["P"] = Matrix::Zero(n, n);
  d.mats["Gamma"] = Matrix::Zero(r, r);
  d.mats["Gamma_tilde"] = Matrix::Zero(n, n);
  d.mats["Q_breve"] = Matrix::Zero(n, n);
  d.mats["Z_breve"] = Matrix::Zero(n, n);
  d.mats["Y"] = Matrix::Zero(n, r);
  for (int v = 0; v < ex.num_vars; ++v) {
    const std::string& lab = ex.var_labels[static_cast<std::size_t>(v)];
    const auto paren = lab.find('(');
    if (paren == std::string::npos) {
      d.scalars[lab] = x(v);
      continue;
    }
    const std::string name = lab.substr(0, paren);
    const auto comma = lab.find(',', paren);
    const int i = std::stoi(lab.substr(paren + 1, comma - paren - 1)) - 1;
    const int j = std::stoi(lab.substr(comma + 1)) - 1;
    Matrix& M = d.mats.at(name);
    M(i, j) = x(v);
    if (name != "Y") M(j, i) = x(v);
  }
  return d;
}

struct Fixture {
  ModeModel mode;
  ModeDecomposition dec;
  ObserverGains g;
};

Fixture scenario_mode(std::size_t q) {
  const auto cfg = fixtures::scenario("scenario1");
  Fixture f{cfg.system.mode(q), {}, {}};
  f.dec = decompose(f.mode);
  f.g = synthesize_gains(f.mode, f.dec, 0.0, 0.0);
  return f;
}

}  // namespace

TEST(Affine, Algebra) {
  VariableSet vs;
  const AffineMatrix P = vs.add_symmetric("P", 2);
  const int s = vs.add_scalar("s");
  EXPECT_EQ(vs.count(), 4);
  Vector x(4);
  x << 1, 2, 3, 4;
  Matrix Pv(2, 2);
  Pv << 1, 2, 2, 3;
  EXPECT_EQ(evaluate(P, x), Pv);
  Matrix A(2, 3);
  A << 1, 2, 3, 4, 5, 6;
  EXPECT_EQ(evaluate(P * A, x), Pv * A);
  EXPECT_EQ(evaluate(transpose(P * A), x), (Pv * A).transpose());
  EXPECT_EQ(evaluate(2.0 * P - scaled_identity(s, 2, 3.0), x), 2.0 * Pv - 12.0 * Matrix::Identity(2, 2));
  const AffineMatrix grid = assemble_blocks({{P, P * A}, {transpose(P * A), AffineMatrix::zero(3, 3)}});
  EXPECT_EQ(grid.rows(), 5);
  EXPECT_EQ(evaluate(grid, x).topRightCorner(2, 3), Pv * A);
  EXPECT_THROW(P + AffineMatrix::zero(3, 3), Error);
}

TEST(SdpAssembly, BlocksMatchDirectFormulas) {
  std::mt19937_64 gen(61);
  std::normal_distribution<double> nd;
  for (std::size_t q : {1, 3}) {
    const Fixture f = scenario_mode(q);
    SdpParameters prm;
    prm.alpha = 0.3;
    prm.eps1 = 2.0;
    prm.eps2 = 0.5;
    const auto both = assemble_sdp(f.mode, f.dec, prm);
    for (const SdpExport& ex : both) {
      Vector x(ex.num_vars);
      for (int v = 0; v < ex.num_vars; ++v) x(v) = nd(gen);
      const Index n = f.mode.n(), r = f.dec.residual_dim();
      const Decision d = decode(ex, x, n, r);
      const Matrix& P = d.mats.at("P");
      const Matrix& Y = d.mats.at("Y");
      const Matrix& Gam = d.mats.at("Gamma");
      const Matrix& Qb = d.mats.at("Q_breve");
      const double kap = d.scalars.at("kappa"), rho2 = d.scalars.at("rho^2");
      const Matrix I = Matrix::Identity(n, n);
      const Matrix& Phi = f.g.Phi;
      const Matrix& Psi = f.g.Psi;
      const Matrix& C2 = f.dec.C2;
      const Matrix& R = f.g.R_mat;
      const Matrix& Om = f.g.Y_cal;
      const double Lf = f.mode.lipschitz;

      Matrix lmi1(2 * n, 2 * n);
      const Matrix top = (P - Y * C2) * Phi;
      lmi1 << P, top, top.transpose(), -kap * I - Qb;
      EXPECT_LE((evaluate(block(ex, "lmi1").expr, x) - lmi1).norm(), 1e-12 * (1 + lmi1.norm()));

      const Index nw = R.cols();
      const Matrix Ir = Matrix::Identity(r, r);
      const Matrix N11 = rho2 * Matrix::Identity(nw, nw) + R.transpose() * Y * Om + Om.transpose() * Y.transpose() * R -
                         R.transpose() * P * R - Om.transpose() * (Gam + (1 / prm.eps1 + 1 / prm.eps2) * Ir) * Om;
      const Matrix N21 = (Phi * Psi).transpose() * (P * R - Y * Om - C2.transpose() * Y.transpose() * R);
      const Matrix N31 = Phi.transpose() * (Y * Om + C2.transpose() * Y.transpose() * R - P * R);
      const Matrix N22 = -(1 + Lf * Lf) * I + prm.alpha * P - prm.eps1 * (C2 * Phi * Psi).transpose() * (C2 * Phi * Psi);
      const Matrix N33 = I - prm.eps2 * (C2 * Phi).transpose() * (C2 * Phi);
      Matrix lmi7 = Matrix::Zero(nw + 2 * n, nw + 2 * n);
      lmi7.topLeftCorner(nw, nw) = N11;
      lmi7.block(nw, 0, n, nw) = N21;
      lmi7.block(nw + n, 0, n, nw) = N31;
      lmi7.block(0, nw, nw, n) = N21.transpose();
      lmi7.block(0, nw + n, nw, n) = N31.transpose();
      lmi7.block(nw, nw, n, n) = N22;
      lmi7.block(nw + n, nw + n, n, n) = N33;
      EXPECT_LE((evaluate(block(ex, "lmi7").expr, x) - lmi7).norm(), 1e-12 * (1 + lmi7.norm()));

      for (const auto& b : ex.blocks) {
        const Matrix M = evaluate(b.expr, x);
        EXPECT_LE((M - M.transpose()).norm(), 1e-12 * (1 + M.norm())) << b.label;
        if (b.diagonal) {
          EXPECT_EQ(M, Matrix(M.diagonal().asDiagonal()));
        }
      }
    }
  }
}

TEST(SdpAssembly, EveryGroupPresentInBothBranches) {
  const Fixture f = scenario_mode(2);
  for (const SdpExport& ex : assemble_sdp(f.mode, f.dec)) {
    std::set<int> groups;
    for (const auto& b : ex.blocks) groups.insert(b.group);
    for (int gid = 1; gid <= 8; ++gid) EXPECT_TRUE(groups.count(gid)) << gid;
    EXPECT_EQ(ex.objective(std::find(ex.var_labels.begin(), ex.var_labels.end(), "rho^2") - ex.var_labels.begin()), 1.0);
    EXPECT_DOUBLE_EQ(ex.objective.sum(), 1.0);
    const Index n = 2, r = 1;
    EXPECT_EQ(ex.num_vars, 4 * n * (n + 1) / 2 + r * (r + 1) / 2 + n * r + 4);
  }
}

TEST(SdpAssembly, BranchConstraints) {
  const Fixture f = scenario_mode(1);
  const auto both = assemble_sdp(f.mode, f.dec);
  EXPECT_EQ(both[0].branch, SdpBranch::A);
  EXPECT_EQ(both[1].branch, SdpBranch::B);
  // A: kappa1 >= 1 and kappa2 - kappa1 < 1.  B: kappa2 <= 1 and kappa1 > 1/2.
  auto bounds_ok = [](const SdpExport& ex, double k1, double k2) {
    Vector x = Vector::Constant(ex.num_vars, 1.0);
    for (int v = 0; v < ex.num_vars; ++v) {
      if (ex.var_labels[v] == "kappa1") x(v) = k1;
      if (ex.var_labels[v] == "kappa2") x(v) = k2;
    }
    return evaluate(block(ex, "bounds").expr, x).diagonal().minCoeff() >= 0.0;
  };
  EXPECT_TRUE(bounds_ok(both[0], 1.2, 2.0));
  EXPECT_FALSE(bounds_ok(both[1], 1.2, 2.0));
  EXPECT_FALSE(bounds_ok(both[0], 0.8, 0.9));
  EXPECT_TRUE(bounds_ok(both[1], 0.8, 0.9));
  EXPECT_FALSE(bounds_ok(both[0], 1.0, 2.5));
  EXPECT_FALSE(bounds_ok(both[1], 0.5, 0.9));
}

TEST(SdpAssembly, FullFeedthroughDropsEmptyBlocks) {
  const Matrix I2 = Matrix::Identity(2, 2);
  const ModeModel m = make_mode(Linear{0.5 * I2}, Matrix::Zero(2, 1), I2, I2, Matrix::Zero(2, 1), I2, I2);
  const ModeDecomposition d = decompose(m);
  ASSERT_EQ(d.residual_dim(), 0);
  const auto both = assemble_sdp(m, d);
  EXPECT_FALSE(both[0].notes.empty());
  for (const auto& b : both[0].blocks) EXPECT_GT(b.expr.rows(), 0);
  std::ostringstream os;
  EXPECT_NO_THROW(write_sdpa(both[0], os));
}

TEST(SdpAssembly, ParameterValidation) {
  const Fixture f = scenario_mode(1);
  SdpParameters p;
  p.alpha = 1.5;
  EXPECT_THROW(assemble_sdp(f.mode, f.dec, p), ConfigError);
  p = {};
  p.eps1 = 0.0;
  EXPECT_THROW(assemble_sdp(f.mode, f.dec, p), ConfigError);
  p = {};
  p.margin = 0.0;
  EXPECT_THROW(assemble_sdp(f.mode, f.dec, p), ConfigError);
}

TEST(Sdpa, ConstantEntersWithFlippedSign) {
  const Fixture f = scenario_mode(1);
  const SdpExport ex = assemble_sdp(f.mode, f.dec)[0];
  const SdpaProblem p = to_sdpa(ex);
  std::mt19937_64 gen(62);
  std::normal_distribution<double> nd;
  Vector x(ex.num_vars);
  for (int v = 0; v < ex.num_vars; ++v) x(v) = nd(gen);
  // Rebuild sum_i x_i F_i - F_0 block by block from the sparse entries.
  std::vector<Matrix> blocks;
  for (int s : p.block_struct) blocks.push_back(Matrix::Zero(std::abs(s), std::abs(s)));
  for (const auto& e : p.entries) {
    const double w = e.matno == 0 ? -1.0 : x(e.matno - 1);
    Matrix& B = blocks[static_cast<std::size_t>(e.block - 1)];
    B(e.i - 1, e.j - 1) += w * e.value;
    if (e.i != e.j) B(e.j - 1, e.i - 1) += w * e.value;
    EXPECT_LE(e.i, e.j);
  }
  for (std::size_t b = 0; b < ex.blocks.size(); ++b) {
    const Matrix expect = evaluate(ex.blocks[b].expr, x);
    EXPECT_LE((blocks[b] - expect).norm(), 1e-12 * (1 + expect.norm())) << ex.blocks[b].label;
  }
  EXPECT_LT(p.block_struct.back(), 0);
}

TEST(Sdpa, RoundTripIsBitIdentical) {
  for (std::size_t q = 1; q <= 5; ++q) {
    const Fixture f = scenario_mode(q);
    for (const SdpExport& ex : assemble_sdp(f.mode, f.dec)) {
      std::stringstream ss;
      write_sdpa(ex, ss);
      const SdpaProblem back = read_sdpa(ss);
      const SdpaProblem orig = to_sdpa(ex);
      EXPECT_EQ(back.m, orig.m);
      EXPECT_EQ(back.block_struct, orig.block_struct);
      EXPECT_EQ(back.c, orig.c);
      EXPECT_EQ(back.entries, orig.entries);
    }
  }
}

TEST(Sdpa, FormatDoubleRoundTrips) {
  std::mt19937_64 gen(63);
  for (int i = 0; i < 10000; ++i) {
    const std::uint64_t bits = gen();
    double v;
    std::memcpy(&v, &bits, sizeof v);
    if (!std::isfinite(v)) continue;
    const std::string s = format_double(v);
    double back = 0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    ASSERT_EQ(std::memcmp(&back, &v, sizeof v), 0) << s;
  }
}

TEST(Sdpa, ReaderAcceptsPunctuatedHeaderAndRejectsGarbage) {
  std::istringstream ok("\"title\n2\n2\n{2, -1}\n(1.0, 0.0)\n0 1 1 1 -1.5\n2 2 1 1 1\n");
  const SdpaProblem p = read_sdpa(ok);
  EXPECT_EQ(p.m, 2);
  EXPECT_EQ(p.block_struct, (std::vector<int>{2, -1}));
  EXPECT_EQ(p.entries.size(), 2u);
  std::istringstream annotated("2 =mDIM\n1\n2\n1 0\n");
  EXPECT_THROW(read_sdpa(annotated), ConfigError);
  std::istringstream bad("2\n1\n2\n1 0\n3 1 1 1 1\n");
  EXPECT_THROW(read_sdpa(bad), ConfigError);
  std::istringstream trunc("2\n1\n");
  EXPECT_THROW(read_sdpa(trunc), ConfigError);
}
