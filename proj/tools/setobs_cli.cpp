// Command-line driver: run scenarios, tabulate thresholds, check mode
// detectability and export the gain-synthesis SDP.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "setobs/detectability.hpp"
#include "setobs/scenario.hpp"
#include "setobs/scenario_io.hpp"
#include "setobs/sdp_export.hpp"

namespace fs = std::filesystem;
using namespace setobs;

namespace {

enum Exit { kOk = 0, kConfig = 2, kMismatch = 3, kNumerical = 4 };

std::size_t checked_mode(const ScenarioConfig& cfg, long q) {
  if (q < 1 || static_cast<std::size_t>(q) > cfg.system.num_modes()) {
    throw ConfigError("--mode must lie in 1.." + std::to_string(cfg.system.num_modes()));
  }
  return static_cast<std::size_t>(q);
}

int cmd_run(const std::string& config, std::optional<std::uint64_t> seed, const std::string& out) {
  ScenarioConfig cfg = load_config(config);
  if (seed) cfg.seed = *seed;
  const fs::path dir = out.empty() ? fs::path(cfg.output_dir) : fs::path(out);
  const RunResult r = run(cfg);
  write_run_outputs(r, dir);
  write_report_txt(r, std::cout);
  std::cout << "outputs in " << dir.string() << "\n";
  if (!r.guaranteed) std::cerr << "warning: gains not certified, radii and thresholds are not guaranteed\n";
  if (r.mismatch_step) {
    std::cerr << "model mismatch: every mode eliminated at step " << *r.mismatch_step << "\n";
    return kMismatch;
  }
  return kOk;
}

int cmd_detectability(const std::string& config, const std::string& out) {
  const ScenarioConfig cfg = load_config(config);
  const auto setups = setup_modes(cfg);
  std::vector<ModeDecomposition> decs;
  std::vector<ObserverGains> gains;
  for (const auto& s : setups) {
    decs.push_back(s.dec);
    gains.push_back(s.gains);
  }
  const DetectabilityReport rep = check_detectability(cfg.system, decs, gains);
  write_detectability_txt(rep, std::cout);
  const fs::path dir = out.empty() ? fs::path(cfg.output_dir) : fs::path(out);
  fs::create_directories(dir);
  std::ofstream txt(dir / "detectability.txt");
  write_detectability_txt(rep, txt);
  std::ofstream js(dir / "detectability.json");
  js << detectability_json(rep).dump(2) << "\n";
  return kOk;
}

int cmd_export_sdp(const std::string& config, long mode, const std::string& out, const SdpParameters& prm) {
  const ScenarioConfig cfg = load_config(config);
  const std::size_t q = checked_mode(cfg, mode);
  const ModeModel& m = cfg.system.mode(q);
  const ModeDecomposition dec = decompose(m);
  const auto sdps = assemble_sdp(m, dec, prm);
  const fs::path dir = out.empty() ? fs::path(cfg.output_dir) : fs::path(out);
  fs::create_directories(dir);
  for (const auto& s : sdps) {
    const fs::path p = dir / ("sdp_q" + std::to_string(q) + "_" + to_string(s.branch) + ".dat-s");
    std::ofstream f(p);
    if (!f) throw ConfigError("cannot write " + p.string());
    write_sdpa(s, f);
    std::cout << p.string() << ": " << s.num_vars << " variables, " << s.blocks.size() << " blocks\n";
  }
  return kOk;
}

int cmd_thresholds(const std::string& config, long mode, long kmax, const std::string& out) {
  ScenarioConfig cfg = load_config(config);
  const std::size_t q = checked_mode(cfg, mode);
  if (kmax < 1) throw ConfigError("--kmax must be at least 1");
  const ModeSetup s = setup_mode(cfg, q);
  ThresholdPolicy policy;
  policy.max_vertices = cfg.max_vertices;
  const auto table = tabulate_thresholds(s.gains, s.dec, cfg.system.mode(q), residual_bounds(cfg.system, q),
                                         kmax, policy);
  write_thresholds_csv(table, std::cout);
  if (!out.empty()) {
    fs::create_directories(out);
    std::ofstream f(fs::path(out) / ("thresholds_q" + std::to_string(q) + ".csv"));
    write_thresholds_csv(table, f);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Set-valued mode, state and unknown-input estimation for hidden-mode switched systems"};
  app.require_subcommand(1);

  std::string config, out;
  std::optional<std::uint64_t> seed;
  long mode = 0, kmax = 0;
  SdpParameters prm;

  auto* run_cmd = app.add_subcommand("run", "simulate a scenario and run the observer bank");
  run_cmd->add_option("--config", config, "scenario JSON")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--seed", seed, "override the config seed");
  run_cmd->add_option("--out", out, "output directory (default: config output_dir)");

  auto* det_cmd = app.add_subcommand("check-detectability", "check the sufficient detectability conditions");
  det_cmd->add_option("--config", config, "scenario JSON")->required()->check(CLI::ExistingFile);
  det_cmd->add_option("--out", out, "output directory (default: config output_dir)");

  auto* sdp_cmd = app.add_subcommand("export-sdp", "write the gain-synthesis SDP (both branches) in SDPA format");
  sdp_cmd->add_option("--config", config, "scenario JSON")->required()->check(CLI::ExistingFile);
  sdp_cmd->add_option("--mode", mode, "mode index, 1-based")->required();
  sdp_cmd->add_option("--out", out, "output directory (default: config output_dir)");
  sdp_cmd->add_option("--alpha", prm.alpha, "fixed alpha in [0,1]")->capture_default_str();
  sdp_cmd->add_option("--eps1", prm.eps1, "fixed eps1 > 0")->capture_default_str();
  sdp_cmd->add_option("--eps2", prm.eps2, "fixed eps2 > 0")->capture_default_str();
  sdp_cmd->add_option("--margin", prm.margin, "margin for strict inequalities")->capture_default_str();

  auto* thr_cmd = app.add_subcommand("thresholds", "tabulate residual thresholds for one mode");
  thr_cmd->add_option("--config", config, "scenario JSON")->required()->check(CLI::ExistingFile);
  thr_cmd->add_option("--mode", mode, "mode index, 1-based")->required();
  thr_cmd->add_option("--kmax", kmax, "last step")->required();
  thr_cmd->add_option("--out", out, "also write thresholds_q<mode>.csv here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*run_cmd) return cmd_run(config, seed, out);
    if (*det_cmd) return cmd_detectability(config, out);
    if (*sdp_cmd) return cmd_export_sdp(config, mode, out, prm);
    if (*thr_cmd) return cmd_thresholds(config, mode, kmax, out);
  } catch (const ModelMismatch& e) {
    std::cerr << "model mismatch: " << e.what() << "\n";
    return kMismatch;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  }
  return kOk;
}
