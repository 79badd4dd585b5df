#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "setobs/detectability.hpp"
#include "setobs/scenario.hpp"
#include "setobs/sdp_export.hpp"

namespace setobs {

namespace io_detail {

inline std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  return format_double(v);
}

inline std::string component_names(const std::string& base, Index dim, const std::string& suffix) {
  std::string out;
  for (Index i = 0; i < dim; ++i) {
    if (i) out += ",";
    out += dim == 1 ? base + suffix : base + std::to_string(i + 1) + suffix;
  }
  return out;
}

inline std::string components(const Vector& v) {
  std::string out;
  for (Index i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += num(v(i));
  }
  return out;
}

inline std::string blanks(Index count) { return std::string(static_cast<std::size_t>(std::max<Index>(count - 1, 0)), ','); }

inline std::ofstream open(const std::filesystem::path& p) {
  std::ofstream f(p);
  if (!f) throw ConfigError("cannot write " + p.string());
  return f;
}

}  // namespace io_detail

/// One row per step k = 1..N. d is the true d_{k-1}, matching dhat.
/// A capped vertex bound and the fields of stopped observers are empty.
inline void write_steps_csv(const RunResult& r, std::ostream& os) {
  using namespace io_detail;
  const Index n = r.trajectory.x.front().size();
  const Index p = r.trajectory.d.front().size();
  const std::size_t Q = r.setups.size();
  os << "k," << component_names("x", n, "") << "," << component_names("d", p, "") << ",surv_count";
  for (std::size_t q = 1; q <= Q; ++q) {
    const std::string s = "_" + std::to_string(q);
    os << ",r" << s << ",tri" << s << ",inf" << s << ",hat" << s << ",elim" << s << ","
       << component_names("xhat", n, s) << ",dx" << s << "," << component_names("dhat", p, s) << ",dd" << s;
  }
  os << "\n";
  std::vector<bool> gone(Q, false);
  for (const StepRecord& st : r.steps) {
    const std::size_t i = static_cast<std::size_t>(st.k);
    os << st.k << "," << components(r.trajectory.x[i]) << "," << components(r.trajectory.d[i - 1]) << ","
       << st.surviving;
    for (std::size_t q = 0; q < Q; ++q) {
      const auto& m = st.modes[q];
      if (!m) {
        // r, tri, inf, hat, elim, xhat (n), dx, dhat (p), dd
        os << "," << blanks(4) << "," << (gone[q] ? "1" : "0") << "," << blanks(n) << "," << "," << blanks(p) << ",";
        continue;
      }
      if (m->eliminated_now) gone[q] = true;
      os << "," << num(m->residual_norm) << "," << num(m->threshold.delta_tri) << ","
         << (m->threshold.capped ? "" : num(m->threshold.delta_inf)) << "," << num(m->threshold.delta_hat) << ","
         << (gone[q] ? "1" : "0") << "," << components(m->x_hat) << "," << num(m->delta_x) << ","
         << components(m->d_hat_prev) << "," << num(m->delta_d_prev);
    }
    os << "\n";
  }
}

inline void write_thresholds_csv(const std::vector<ThresholdReport>& t, std::ostream& os) {
  using namespace io_detail;
  os << "k,delta_tri,delta_inf,delta_hat,capped\n";
  for (const auto& rep : t) {
    os << rep.k << "," << num(rep.delta_tri) << "," << (rep.capped ? "" : num(rep.delta_inf)) << ","
       << num(rep.delta_hat) << "," << (rep.capped ? 1 : 0) << "\n";
  }
}

inline nlohmann::json report_json(const RunResult& r) {
  nlohmann::json j;
  j["name"] = r.name;
  j["seed"] = r.seed;
  j["true_mode"] = r.true_mode;
  j["horizon"] = r.horizon;
  j["guaranteed"] = r.guaranteed;
  j["model_mismatch_step"] = r.mismatch_step ? nlohmann::json(*r.mismatch_step) : nlohmann::json();
  j["surviving"] = std::vector<std::size_t>(r.final_modes.surviving.begin(), r.final_modes.surviving.end());
  nlohmann::json modes = nlohmann::json::array();
  for (std::size_t q = 1; q <= r.setups.size(); ++q) {
    const ObserverGains& g = r.setups[q - 1].gains;
    nlohmann::json m;
    m["mode"] = q;
    m["p_H"] = r.setups[q - 1].dec.p_H;
    m["theta"] = io_detail::num(g.theta);
    m["theta_plain"] = io_detail::num(g.theta_plain);
    m["eta_bar"] = io_detail::num(g.eta_bar);
    m["eta_bar_appendix"] = io_detail::num(g.eta_bar_appendix);
    m["beta"] = io_detail::num(g.beta);
    m["alpha_bar"] = io_detail::num(g.alpha_bar);
    m["alpha_bar_appendix"] = io_detail::num(g.alpha_bar_appendix);
    m["lipschitz"] = io_detail::num(g.lipschitz);
    m["certified"] = g.certified;
    auto it = r.final_modes.eliminated_at.find(q);
    m["eliminated_at"] = it == r.final_modes.eliminated_at.end() ? nlohmann::json() : nlohmann::json(it->second);
    modes.push_back(m);
  }
  j["modes"] = modes;
  j["separation_events"] = r.separations.size();
  std::size_t confirmed = 0;
  for (const auto& e : r.separations) confirmed += e.one_eliminated ? 1 : 0;
  j["separation_events_confirmed"] = confirmed;
  return j;
}

inline void write_report_txt(const RunResult& r, std::ostream& os) {
  using io_detail::num;
  os << "scenario   " << r.name << "\n";
  os << "seed       " << r.seed << "\n";
  os << "true mode  " << r.true_mode << "\n";
  os << "horizon    " << r.horizon << "\n";
  os << "radii      " << (r.guaranteed ? "guaranteed (all gains certified)" : "NOT guaranteed (uncertified gains)") << "\n";
  if (r.mismatch_step) os << "MODEL MISMATCH: every mode eliminated at step " << *r.mismatch_step << "\n";
  os << "surviving  {";
  bool first = true;
  for (std::size_t q : r.final_modes.surviving) {
    os << (first ? "" : ", ") << q;
    first = false;
  }
  os << "}\n\n";
  os << "mode  p_H  theta        |E|          eta_bar      beta         alpha_bar    certified  eliminated\n";
  for (std::size_t q = 1; q <= r.setups.size(); ++q) {
    const ObserverGains& g = r.setups[q - 1].gains;
    auto it = r.final_modes.eliminated_at.find(q);
    std::ostringstream line;
    line << q << "     " << r.setups[q - 1].dec.p_H << "    ";
    for (double v : {g.theta, g.theta_plain, g.eta_bar, g.beta, g.alpha_bar}) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%-12.6g ", v);
      line << buf;
    }
    line << (g.certified ? "yes        " : "no         ")
         << (it == r.final_modes.eliminated_at.end() ? std::string("-") : "k=" + std::to_string(it->second));
    os << line.str() << "\n";
  }
  std::size_t confirmed = 0;
  for (const auto& e : r.separations) confirmed += e.one_eliminated ? 1 : 0;
  os << "\nseparation predictions " << r.separations.size() << ", confirmed " << confirmed << "\n";
}

/// Whitespace-separated series for gnuplot plus a script that draws them.
inline void write_plot_files(const RunResult& r, const std::filesystem::path& dir) {
  using namespace io_detail;
  const std::size_t Q = r.setups.size();
  const std::size_t ts = r.true_mode;
  {
    auto f = open(dir / "plot_survivors.dat");
    f << "# k surviving\n";
    for (const auto& st : r.steps) f << st.k << " " << st.surviving << "\n";
  }
  for (std::size_t q = 1; q <= Q; ++q) {
    auto f = open(dir / ("plot_residual_q" + std::to_string(q) + ".dat"));
    f << "# k |r| delta_tri delta_inf delta_hat  (delta_inf nan when capped)\n";
    for (const auto& st : r.steps) {
      const auto& m = st.modes[q - 1];
      if (!m) break;
      f << st.k << " " << num(m->residual_norm) << " " << num(m->threshold.delta_tri) << " "
        << (m->threshold.capped ? "nan" : num(m->threshold.delta_inf)) << " " << num(m->threshold.delta_hat) << "\n";
    }
  }
  {
    auto f = open(dir / "plot_estimates.dat");
    f << "# k  |x - xhat| delta_x  |d - dhat| delta_d   (true mode " << ts << ")\n";
    for (const auto& st : r.steps) {
      const auto& m = st.modes[ts - 1];
      if (!m) break;
      const std::size_t i = static_cast<std::size_t>(st.k);
      f << st.k << " " << num((r.trajectory.x[i] - m->x_hat).norm()) << " " << num(m->delta_x) << " "
        << num((r.trajectory.d[i - 1] - m->d_hat_prev).norm()) << " " << num(m->delta_d_prev) << "\n";
    }
  }
  auto gp = open(dir / "plot.gp");
  gp << "set terminal pngcairo size 1000,700\n";
  gp << "set output 'survivors.png'\nset xlabel 'k'\nset ylabel 'surviving modes'\n";
  gp << "plot 'plot_survivors.dat' using 1:2 with steps title 'surviving'\n";
  for (std::size_t q = 1; q <= Q; ++q) {
    const std::string d = "plot_residual_q" + std::to_string(q) + ".dat";
    gp << "set output 'residual_q" << q << ".png'\nset logscale y\nset ylabel 'residual norm'\n";
    gp << "plot '" << d << "' using 1:2 with lines title '|r|', '' using 1:3 with lines title 'tri', "
       << "'' using 1:4 with points title 'inf', '' using 1:5 with lines title 'hat'\nunset logscale y\n";
  }
  gp << "set output 'estimates.png'\nset ylabel 'error / radius'\n";
  gp << "plot 'plot_estimates.dat' using 1:2 with lines title '|x - xhat|', '' using 1:3 with lines title 'delta_x', "
     << "'' using 1:4 with lines title '|d - dhat|', '' using 1:5 with lines title 'delta_d'\n";
}

inline void write_run_outputs(const RunResult& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    auto f = io_detail::open(dir / "steps.csv");
    write_steps_csv(r, f);
  }
  for (std::size_t q = 1; q <= r.thresholds.size(); ++q) {
    auto f = io_detail::open(dir / ("thresholds_q" + std::to_string(q) + ".csv"));
    write_thresholds_csv(r.thresholds[q - 1], f);
  }
  {
    auto f = io_detail::open(dir / "report.txt");
    write_report_txt(r, f);
  }
  {
    auto f = io_detail::open(dir / "report.json");
    f << report_json(r).dump(2) << "\n";
  }
  write_plot_files(r, dir);
}

inline nlohmann::json detectability_json(const DetectabilityReport& rep) {
  using io_detail::num;
  nlohmann::json j;
  j["overall"] = to_string(rep.overall);
  j["steady_tri"] = nlohmann::json::array();
  for (double v : rep.steady_tri) j["steady_tri"].push_back(num(v));
  nlohmann::json ci;
  ci["applicable"] = rep.condition_i.applicable;
  if (!rep.condition_i.note.empty()) ci["note"] = rep.condition_i.note;
  for (const auto& p : rep.condition_i.pairs) {
    ci["pairs"].push_back({{"q", p.q}, {"q2", p.q2}, {"applicable", p.applicable},
                           {"sigma_min_W", num(p.sigma_min_W)}, {"R_z", num(p.R_z)},
                           {"rhs", num(p.rhs)}, {"passes", p.passes}});
  }
  j["condition_i"] = ci;
  nlohmann::json cii;
  for (const auto& p : rep.condition_ii.pairs) {
    cii["t2_pairs"].push_back({{"q", p.q}, {"q2", p.q2}, {"distance", num(p.t2_distance)}, {"distinct", p.distinct}});
  }
  for (const auto& m : rep.condition_ii.modes) {
    cii["modes"].push_back({{"q", m.q}, {"jacobian_norm", num(m.jacobian_norm)}, {"jacobian_ok", m.jacobian_ok},
                            {"hessian_bound", num(m.hessian_bound)}, {"hessian_bounded", m.hessian_bounded}});
  }
  cii["t2_all_distinct"] = rep.condition_ii.t2_all_distinct();
  cii["structural_pass"] = rep.condition_ii.structural_pass();
  cii["requires_unlimited_energy"] = rep.condition_ii.requires_unlimited_energy;
  j["condition_ii"] = cii;
  return j;
}

inline void write_detectability_txt(const DetectabilityReport& rep, std::ostream& os) {
  using io_detail::num;
  os << "overall: " << to_string(rep.overall) << "\n\n";
  os << "condition (i): ";
  if (!rep.condition_i.applicable) {
    os << "not applicable (" << rep.condition_i.note << ")\n";
  } else {
    os << (rep.condition_i.all_pass() ? "pass" : "fail") << "\n";
    for (const auto& p : rep.condition_i.pairs) {
      os << "  (" << p.q << "," << p.q2 << ") ";
      if (!p.applicable) {
        os << "n/a: " << p.note << "\n";
        continue;
      }
      os << "sigma_min(W)=" << num(p.sigma_min_W) << " rhs=" << num(p.rhs) << " R_z=" << num(p.R_z)
         << (p.passes ? "  pass" : "  fail") << "\n";
    }
  }
  os << "\ncondition (ii): " << (rep.condition_ii.structural_pass() ? "structural checks pass" : "fail")
     << ", assumes the unknown input has unlimited energy\n";
  for (const auto& p : rep.condition_ii.pairs) {
    os << "  T2 distance (" << p.q << "," << p.q2 << ") = " << num(p.t2_distance)
       << (p.distinct ? "" : "  NOT DISTINCT") << "\n";
  }
  for (const auto& m : rep.condition_ii.modes) {
    os << "  mode " << m.q << ": |J_f(0)| = " << num(m.jacobian_norm) << (m.jacobian_ok ? "" : "  >= 1")
       << ", Hessian bound = " << num(m.hessian_bound) << "\n";
  }
  os << "\nsteady triangle bounds:";
  for (double v : rep.steady_tri) os << " " << num(v);
  os << "\n";
}

}  // namespace setobs
