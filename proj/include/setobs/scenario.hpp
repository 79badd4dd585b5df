#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "setobs/decomposition.hpp"
#include "setobs/detectability.hpp"
#include "setobs/errors.hpp"
#include "setobs/gain_synthesis.hpp"
#include "setobs/mode_estimator.hpp"
#include "setobs/numeric.hpp"
#include "setobs/observer_bank.hpp"
#include "setobs/random.hpp"
#include "setobs/residual_thresholds.hpp"
#include "setobs/system_model.hpp"

namespace setobs {

using json = nlohmann::json;

enum class InputKind { BoundedRandom, GrowingRamp, Sequence };

struct InputSignal {
  InputKind kind = InputKind::BoundedRandom;
  double bound = 0.0;               // BoundedRandom: |d_k| <= bound
  double rate = 0.0;                // GrowingRamp: d_k = rate * k * dir
  std::vector<Vector> values;       // Sequence
};

/// Per-mode gain override: either L_tilde directly, or an external SDP
/// solution (P, Y, rho) from which L_tilde = P^{-1} Y.
struct GainOverride {
  std::optional<Matrix> L_tilde;
  std::optional<Matrix> P;
  std::optional<Matrix> Y;
  std::optional<double> rho;
};

struct ScenarioConfig {
  std::string name = "scenario";
  SwitchedSystem system;
  std::size_t true_mode = 1;
  long horizon = 100;
  InputSignal input;
  std::vector<Vector> known_input;  // empty: u = 0
  std::uint64_t seed = 0;
  std::vector<std::optional<GainOverride>> gains;  // per mode; nullopt = heuristic
  std::optional<ModeModel> plant;  // simulated system when it is not one of the modes
  bool allow_uncertified = false;
  std::uint64_t max_vertices = std::uint64_t{1} << 20;
  std::string output_dir = "out";
};

// ---------------------------------------------------------------- parsing

namespace config_detail {

inline Matrix matrix_from(const json& j, const std::string& what) {
  if (!j.is_array()) throw ConfigError(what + ": expected a list of rows");
  const Index rows = static_cast<Index>(j.size());
  if (rows == 0) throw ConfigError(what + ": empty matrix, give explicit zero rows");
  Index cols = -1;
  Matrix m;
  for (Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array()) throw ConfigError(what + ": row " + std::to_string(i) + " is not a list");
    if (cols < 0) {
      cols = static_cast<Index>(row.size());
      m.resize(rows, cols);
    } else if (static_cast<Index>(row.size()) != cols) {
      throw ConfigError(what + ": ragged rows");
    }
    for (Index c = 0; c < cols; ++c) {
      const json& v = row[static_cast<std::size_t>(c)];
      if (!v.is_number()) throw ConfigError(what + ": non-numeric entry");
      m(i, c) = v.get<double>();
    }
  }
  return m;
}

/// Matrix with an explicit shape, for blocks that may have zero columns.
inline Matrix matrix_or_zero(const json& j, const char* key, Index rows, Index cols,
                             const std::string& what) {
  if (!j.contains(key)) return Matrix::Zero(rows, cols);
  const json& v = j.at(key);
  if (v.is_array() && v.empty()) return Matrix::Zero(rows, cols);
  return matrix_from(v, what + "." + key);
}

inline Vector vector_from(const json& j, const std::string& what) {
  if (!j.is_array()) throw ConfigError(what + ": expected a list");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError(what + ": non-numeric entry");
    v(static_cast<Index>(i)) = j[i].get<double>();
  }
  return v;
}

inline double number(const json& j, const char* key, const std::string& what) {
  if (!j.contains(key)) throw ConfigError(what + ": missing '" + key + "'");
  if (!j.at(key).is_number()) throw ConfigError(what + "." + key + ": expected a number");
  return j.at(key).get<double>();
}

inline double number_or(const json& j, const char* key, double fallback, const std::string& what) {
  return j.contains(key) ? number(j, key, what) : fallback;
}

inline FieldDescriptor field_from(const json& j, const std::string& what) {
  const std::string type = j.value("type", "");
  if (type == "linear_sinusoidal") {
    return LinearSinusoidal{matrix_from(j.at("A_hat"), what + ".A_hat"),
                            matrix_from(j.at("A_tilde"), what + ".A_tilde")};
  }
  if (type == "linear") return Linear{matrix_from(j.at("A"), what + ".A")};
  throw ConfigError(what + ": field type must be 'linear_sinusoidal' or 'linear'");
}

inline std::vector<Vector> vector_list(const json& j, const std::string& what) {
  if (!j.is_array()) throw ConfigError(what + ": expected a list");
  std::vector<Vector> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (j[i].is_number()) {
      out.push_back(Vector::Constant(1, j[i].get<double>()));
    } else {
      out.push_back(vector_from(j[i], what + "[" + std::to_string(i) + "]"));
    }
  }
  return out;
}

inline GainOverride gain_override_from(const json& j, const std::string& what) {
  GainOverride g;
  if (j.contains("L_tilde")) g.L_tilde = matrix_from(j.at("L_tilde"), what + ".L_tilde");
  if (j.contains("P")) g.P = matrix_from(j.at("P"), what + ".P");
  if (j.contains("Y")) g.Y = matrix_from(j.at("Y"), what + ".Y");
  if (j.contains("rho")) g.rho = number(j, "rho", what);
  if (!g.L_tilde && !(g.P && g.Y)) throw ConfigError(what + ": give L_tilde, or P and Y");
  return g;
}

inline std::vector<std::optional<GainOverride>> gain_list(const json& modes, std::size_t Q,
                                                          const std::string& what) {
  if (!modes.is_array() || modes.size() != Q) {
    throw ConfigError(what + ": expected one entry per mode (null for heuristic)");
  }
  std::vector<std::optional<GainOverride>> out;
  for (std::size_t q = 0; q < Q; ++q) {
    if (modes[q].is_null()) {
      out.emplace_back();
    } else {
      out.emplace_back(gain_override_from(modes[q], what + "[" + std::to_string(q) + "]"));
    }
  }
  return out;
}

}  // namespace config_detail

inline ModeModel mode_from_json(const json& mj, const std::string& what) {
  using namespace config_detail;
  FieldDescriptor f = field_from(mj.at("field"), what + ".field");
  const Index n = field_dim(f);
  Matrix C = matrix_from(mj.at("C"), what + ".C");
  Matrix G = matrix_from(mj.at("G"), what + ".G");
  const Index l = C.rows();
  const Index p = G.cols();
  Matrix B = mj.contains("B") ? matrix_or_zero(mj, "B", n, 0, what) : Matrix::Zero(n, 0);
  const Index m = B.cols();
  Matrix D = matrix_or_zero(mj, "D", l, m, what);
  Matrix H = matrix_or_zero(mj, "H", l, p, what);
  Matrix W = mj.contains("W") ? matrix_from(mj.at("W"), what + ".W") : Matrix::Identity(n, n);
  std::optional<double> lf;
  if (mj.contains("lipschitz")) lf = number(mj, "lipschitz", what);
  return make_mode(std::move(f), std::move(B), std::move(G), std::move(C), std::move(D), std::move(H),
                   std::move(W), lf);
}

inline SwitchedSystem system_from_json(const json& j) {
  using namespace config_detail;
  SwitchedSystem sys;
  if (!j.contains("modes") || !j.at("modes").is_array()) throw ConfigError("system.modes missing");
  const double eta_w = number_or(j, "eta_w", 0.0, "system");
  const double eta_v = number_or(j, "eta_v", 0.0, "system");
  std::size_t q = 0;
  for (const json& mj : j.at("modes")) {
    ++q;
    const std::string what = "system.modes[" + std::to_string(q - 1) + "]";
    sys.modes.push_back(mode_from_json(mj, what));
    sys.eta_w.push_back(number_or(mj, "eta_w", eta_w, what));
    sys.eta_v.push_back(number_or(mj, "eta_v", eta_v, what));
  }
  sys.delta_x0 = number(j, "delta_x0", "system");
  sys.x_hat0 = vector_from(j.at("x_hat0"), "system.x_hat0");
  if (j.contains("bounds") && !j.at("bounds").is_null()) {
    sys.bounds = SpaceBounds{number(j.at("bounds"), "R_x", "system.bounds"),
                             number(j.at("bounds"), "R_y", "system.bounds")};
  }
  validate(sys);
  return sys;
}

/// `base_dir` resolves relative paths (gain files) against the config file.
inline ScenarioConfig config_from_json(const json& j, const std::filesystem::path& base_dir = {}) {
  using namespace config_detail;
  ScenarioConfig cfg;
  try {
    cfg.name = j.value("name", std::string("scenario"));
    cfg.system = system_from_json(j.at("system"));
    const std::size_t Q = cfg.system.num_modes();
    const Index m = cfg.system.modes.front().m();
    const std::size_t p = static_cast<std::size_t>(cfg.system.modes.front().p());

    const long tm = j.value("true_mode", 1L);
    if (tm < 1 || static_cast<std::size_t>(tm) > Q) throw ConfigError("true_mode must lie in 1..Q");
    cfg.true_mode = static_cast<std::size_t>(tm);
    cfg.horizon = j.value("horizon", 100L);
    if (cfg.horizon < 1) throw ConfigError("horizon must be at least 1");
    cfg.seed = j.value("seed", std::uint64_t{0});
    cfg.allow_uncertified = j.value("allow_uncertified", false);
    cfg.max_vertices = j.value("inf_bound_max_vertices", std::uint64_t{1} << 20);
    if (cfg.max_vertices < 2) throw ConfigError("inf_bound_max_vertices must be at least 2");
    cfg.output_dir = j.value("output_dir", std::string("out/") + cfg.name);

    const json in = j.value("input_signal", json{{"type", "bounded_random"}, {"bound", 0.0}});
    const std::string kind = in.value("type", "");
    if (kind == "bounded_random") {
      cfg.input.kind = InputKind::BoundedRandom;
      cfg.input.bound = number(in, "bound", "input_signal");
      if (!(cfg.input.bound >= 0.0)) throw ConfigError("input_signal.bound must be nonnegative");
    } else if (kind == "growing_ramp") {
      cfg.input.kind = InputKind::GrowingRamp;
      cfg.input.rate = number(in, "rate", "input_signal");
    } else if (kind == "sequence") {
      cfg.input.kind = InputKind::Sequence;
      cfg.input.values = vector_list(in.at("values"), "input_signal.values");
      if (static_cast<long>(cfg.input.values.size()) < cfg.horizon + 1) {
        throw ConfigError("input_signal.values needs horizon + 1 entries");
      }
      for (const auto& v : cfg.input.values) {
        if (static_cast<std::size_t>(v.size()) != p) throw ConfigError("input_signal.values: wrong length");
      }
    } else {
      throw ConfigError("input_signal.type must be bounded_random, growing_ramp or sequence");
    }

    if (j.contains("known_input") && !j.at("known_input").is_null()) {
      const json& ku = j.at("known_input");
      const std::string kt = ku.value("type", "");
      if (kt == "sequence") {
        cfg.known_input = vector_list(ku.at("values"), "known_input.values");
        if (static_cast<long>(cfg.known_input.size()) < cfg.horizon + 1) {
          throw ConfigError("known_input.values needs horizon + 1 entries");
        }
        for (const auto& v : cfg.known_input) {
          if (v.size() != m) throw ConfigError("known_input.values: wrong length");
        }
      } else if (kt != "zero") {
        throw ConfigError("known_input.type must be zero or sequence");
      }
    }

    if (j.contains("plant") && !j.at("plant").is_null()) {
      cfg.plant = mode_from_json(j.at("plant"), "plant");
      const ModeModel& ref = cfg.system.modes.front();
      if (cfg.plant->n() != ref.n() || cfg.plant->l() != ref.l() || cfg.plant->m() != ref.m() ||
          cfg.plant->p() != ref.p()) {
        throw ConfigError("plant must share n, l, m and p with the modes");
      }
    }

    cfg.gains.assign(Q, std::nullopt);
    if (j.contains("gains") && !j.at("gains").is_null()) {
      const json& g = j.at("gains");
      const std::string gt = g.value("type", "");
      if (gt == "user") {
        cfg.gains = gain_list(g.at("modes"), Q, "gains.modes");
      } else if (gt == "file") {
        std::filesystem::path path = g.at("path").get<std::string>();
        if (path.is_relative()) path = base_dir / path;
        std::ifstream f(path);
        if (!f) throw ConfigError("cannot open gain file " + path.string());
        json gj;
        try {
          gj = json::parse(f);
        } catch (const json::exception& e) {
          throw ConfigError("gain file " + path.string() + ": " + e.what());
        }
        cfg.gains = gain_list(gj.at("modes"), Q, path.string());
      } else if (gt != "heuristic") {
        throw ConfigError("gains.type must be heuristic, file or user");
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

inline ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(f, nullptr, true, true);
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return config_from_json(j, path.parent_path());
}

// ------------------------------------------------------------ per-mode setup

struct ModeSetup {
  ModeDecomposition dec;
  ObserverGains gains;
  std::optional<CertificateReport> certificate;
};

inline ModeSetup setup_mode(const ScenarioConfig& cfg, std::size_t q) {
  const ModeModel& mode = cfg.system.mode(q);
  ModeSetup s;
  s.dec = decompose(mode);
  const double ew = cfg.system.eta_w[q - 1];
  const double ev = cfg.system.eta_v[q - 1];
  const auto& ov = cfg.gains.at(q - 1);
  if (!ov) {
    s.gains = synthesize_gains(mode, s.dec, ew, ev);
  } else if (ov->L_tilde) {
    s.gains = synthesize_gains(mode, s.dec, ew, ev, *ov->L_tilde);
  } else {
    if (ov->P->rows() != mode.n() || ov->P->cols() != mode.n()) throw ConfigError("P must be n x n");
    const Matrix L = ov->P->ldlt().solve(*ov->Y);
    s.gains = synthesize_gains(mode, s.dec, ew, ev, L);
    s.certificate = verify_certificate(s.gains, *ov->P, ov->rho.value_or(0.0));
  }
  return s;
}

inline std::vector<ModeSetup> setup_modes(const ScenarioConfig& cfg) {
  std::vector<ModeSetup> out;
  for (std::size_t q = 1; q <= cfg.system.num_modes(); ++q) out.push_back(setup_mode(cfg, q));
  return out;
}

// ------------------------------------------------------------------ plant

/// Realized disturbances and signals of one simulated run.
struct Trajectory {
  std::vector<Vector> x;  // x_0..x_N
  std::vector<Vector> y;  // y_0..y_N
  std::vector<Vector> u;  // u_0..u_N
  std::vector<Vector> d;  // d_0..d_N
  std::vector<Vector> w;  // w_0..w_{N-1}
  std::vector<Vector> v;  // v_0..v_N
};

/// x_{k+1} = f(x_k) + B u_k + G d_k + W w_k,  y_k = C x_k + D u_k + H d_k + v_k.
inline std::pair<Vector, Vector> simulate_plant(const ModeModel& mode, const Vector& x_k,
                                                const Vector& u_k, const Vector& d_k,
                                                const Vector& w_k, const Vector& v_k) {
  Vector y = mode.C * x_k + mode.D * u_k + mode.H * d_k + v_k;
  Vector x_next = eval_field(mode.f, x_k) + mode.B * u_k + mode.G * d_k + mode.W * w_k;
  return {std::move(x_next), std::move(y)};
}

enum RngStream : std::uint64_t { kStreamInitial = 1, kStreamInput = 2, kStreamProcess = 3, kStreamSensor = 4 };

inline std::vector<Vector> unknown_input_sequence(const ScenarioConfig& cfg, Index p, long N) {
  std::vector<Vector> d;
  Rng rng(cfg.seed, kStreamInput);
  switch (cfg.input.kind) {
    case InputKind::BoundedRandom:
      for (long k = 0; k <= N; ++k) d.push_back(rng.in_ball(p, cfg.input.bound));
      break;
    case InputKind::GrowingRamp: {
      const Vector dir = rng.direction(p);
      for (long k = 0; k <= N; ++k) d.push_back(cfg.input.rate * static_cast<double>(k) * dir);
      break;
    }
    case InputKind::Sequence:
      for (long k = 0; k <= N; ++k) d.push_back(cfg.input.values[static_cast<std::size_t>(k)]);
      break;
  }
  return d;
}

inline Trajectory simulate(const ScenarioConfig& cfg) {
  const ModeModel& mode = cfg.plant ? *cfg.plant : cfg.system.mode(cfg.true_mode);
  const double ew = cfg.system.eta_w[cfg.true_mode - 1];
  const double ev = cfg.system.eta_v[cfg.true_mode - 1];
  const long N = cfg.horizon;
  Trajectory t;
  Rng init_rng(cfg.seed, kStreamInitial);
  Rng proc_rng(cfg.seed, kStreamProcess);
  Rng sens_rng(cfg.seed, kStreamSensor);
  t.d = unknown_input_sequence(cfg, mode.p(), N);
  for (long k = 0; k <= N; ++k) {
    t.u.push_back(cfg.known_input.empty() ? Vector::Zero(mode.m())
                                          : cfg.known_input[static_cast<std::size_t>(k)]);
  }
  t.x.push_back(cfg.system.x_hat0 + init_rng.in_ball(mode.n(), cfg.system.delta_x0));
  for (long k = 0; k <= N; ++k) {
    t.v.push_back(sens_rng.in_ball(mode.l(), ev));
    if (k < N) t.w.push_back(proc_rng.in_ball(mode.n(), ew));
    const std::size_t i = static_cast<std::size_t>(k);
    const Vector w = k < N ? t.w[i] : Vector::Zero(mode.n());
    auto [xn, y] = simulate_plant(mode, t.x[i], t.u[i], t.d[i], w, t.v[i]);
    t.y.push_back(std::move(y));
    if (k < N) t.x.push_back(std::move(xn));
  }
  return t;
}

// -------------------------------------------------------------------- run

struct ModeRecord {
  Vector residual;
  double residual_norm = 0.0;
  ThresholdReport threshold;
  bool eliminated_now = false;
  Vector x_hat;
  Vector x_star;
  double delta_x = 0.0;
  Vector d_hat_prev;
  double delta_d_prev = 0.0;
};

struct StepRecord {
  long k = 0;
  std::size_t surviving = 0;
  std::vector<std::optional<ModeRecord>> modes;  // nullopt once eliminated earlier
};

struct SeparationEvent {
  long k = 0;
  std::size_t q = 0;
  std::size_t q2 = 0;
  bool one_eliminated = false;
};

struct RunResult {
  std::string name;
  std::uint64_t seed = 0;
  std::size_t true_mode = 1;
  long horizon = 0;
  std::vector<ModeSetup> setups;
  std::vector<std::vector<ThresholdReport>> thresholds;  // [q-1][k-1]
  Trajectory trajectory;
  std::vector<StepRecord> steps;
  ModeSet final_modes;
  std::vector<SeparationEvent> separations;
  bool guaranteed = true;  // every mode certified
  std::optional<long> mismatch_step;
};

inline std::vector<std::vector<ThresholdReport>> tabulate_all(const ScenarioConfig& cfg,
                                                              const std::vector<ModeSetup>& setups) {
  const std::size_t Q = cfg.system.num_modes();
  ThresholdPolicy policy;
  policy.max_vertices = cfg.max_vertices;
  // Modes run concurrently, so each enumeration gets a share of the cores.
  policy.threads = std::max(1U, std::thread::hardware_concurrency() / static_cast<unsigned>(Q));
  std::vector<std::future<std::vector<ThresholdReport>>> jobs;
  for (std::size_t q = 1; q <= Q; ++q) {
    jobs.push_back(std::async(std::launch::async, [&, q] {
      return tabulate_thresholds(setups[q - 1].gains, setups[q - 1].dec, cfg.system.mode(q),
                                 residual_bounds(cfg.system, q), cfg.horizon, policy);
    }));
  }
  std::vector<std::vector<ThresholdReport>> out;
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

/// Simulates the true mode and runs the observer bank with mode elimination.
/// An empty surviving set ends the run early and sets mismatch_step.
inline RunResult run(const ScenarioConfig& cfg) {
  const std::size_t Q = cfg.system.num_modes();
  RunResult res;
  res.name = cfg.name;
  res.seed = cfg.seed;
  res.true_mode = cfg.true_mode;
  res.horizon = cfg.horizon;
  res.setups = setup_modes(cfg);
  for (const auto& s : res.setups) res.guaranteed = res.guaranteed && s.gains.certified;
  std::vector<ObserverState> states;
  for (std::size_t q = 1; q <= Q; ++q) {
    states.push_back(init(cfg.system, q, res.setups[q - 1].gains, cfg.allow_uncertified));
  }
  res.thresholds = tabulate_all(cfg, res.setups);
  res.trajectory = simulate(cfg);
  const Trajectory& t = res.trajectory;
  for (std::size_t q = 1; q <= Q; ++q) {
    absorb_initial_measurement(states[q - 1], res.setups[q - 1].dec, res.setups[q - 1].gains,
                               t.y[0], t.u[0]);
  }
  ModeSet modes = ModeSet::all(Q);
  for (long k = 1; k <= cfg.horizon; ++k) {
    const std::size_t i = static_cast<std::size_t>(k);
    StepRecord rec;
    rec.k = k;
    rec.modes.assign(Q, std::nullopt);
    std::map<std::size_t, ModeStepData> data;
    for (std::size_t q : modes.surviving) {
      const ModeSetup& s = res.setups[q - 1];
      states[q - 1] = step(states[q - 1], cfg.system.mode(q), s.dec, s.gains, t.u[i], t.u[i - 1], t.y[i]);
      const ObserverState& st = states[q - 1];
      ModeRecord mr;
      mr.residual = compute_residual(s.dec, st, t.u[i], t.y[i]);
      mr.residual_norm = mr.residual.norm();
      mr.threshold = res.thresholds[q - 1][i - 1];
      mr.x_hat = st.x_hat;
      mr.x_star = st.x_star;
      mr.delta_x = st.delta_x;
      mr.d_hat_prev = st.d_hat_prev;
      mr.delta_d_prev = st.delta_d_prev;
      data[q] = ModeStepData{st.state_ball(), st.input_ball(), mr.residual_norm, mr.threshold.delta_hat};
      rec.modes[q - 1] = std::move(mr);
    }
    ModeSet next;
    try {
      next = eliminate_step(modes, data, k);
    } catch (const ModelMismatch&) {
      for (std::size_t q : modes.surviving) rec.modes[q - 1]->eliminated_now = true;
      rec.surviving = 0;
      res.steps.push_back(std::move(rec));
      res.mismatch_step = k;
      for (std::size_t q : modes.surviving) modes.eliminated_at[q] = k;
      modes.surviving.clear();
      res.final_modes = modes;
      return res;
    }
    for (std::size_t q : modes.surviving) {
      if (!next.surviving.count(q)) rec.modes[q - 1]->eliminated_now = true;
    }
    // Separation diagnostic on every surviving pair.
    for (std::size_t q : modes.surviving) {
      for (std::size_t q2 : modes.surviving) {
        if (q2 <= q) continue;
        const auto& a = res.setups[q - 1].dec;
        const auto& b = res.setups[q2 - 1].dec;
        if (a.residual_dim() != b.residual_dim()) continue;
        const double Ry = cfg.system.bounds ? cfg.system.bounds->R_y : t.y[i].norm();
        const double Rz = bound_product(Ry, spectral_norm(a.T2 - b.T2));
        const SeparationData sa{a.C2 * rec.modes[q - 1]->x_star, a.D2 * t.u[i], data[q].threshold};
        const SeparationData sb{b.C2 * rec.modes[q2 - 1]->x_star, b.D2 * t.u[i], data[q2].threshold};
        if (pairwise_separation(sa, sb, Rz)) {
          res.separations.push_back({k, q, q2, !next.surviving.count(q) || !next.surviving.count(q2)});
        }
      }
    }
    modes = std::move(next);
    rec.surviving = modes.surviving.size();
    res.steps.push_back(std::move(rec));
  }
  res.final_modes = modes;
  return res;
}

}  // namespace setobs
