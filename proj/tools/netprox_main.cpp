#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "netprox/experiment.hpp"

namespace fs = std::filesystem;
using netprox::AssumptionError;
using netprox::ConfigError;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitAssumption = 2;
constexpr int kExitDivergence = 3;

void emit_error(const std::string& code, const std::string& detail) {
  nlohmann::json j = {{"error", code}, {"detail", detail}};
  std::cerr << j.dump() << "\n";
}

std::string out_path(const std::string& out_dir, const std::string& rel) {
  fs::path p(rel);
  if (p.is_absolute() || out_dir.empty()) return rel;
  return (fs::path(out_dir) / p).string();
}

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "JSON config file")
      ->required();
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option("--seed", args.seed, "override the config seed");
}

int cmd_run(const CommonArgs& args) {
  netprox::ExperimentConfig cfg =
      netprox::load_experiment_config(args.config_path);
  if (args.seed) cfg.seed = *args.seed;
  const std::string dir = fs::path(args.config_path).parent_path().string();

  netprox::ExperimentArtifacts art = netprox::run_experiment(cfg, dir);
  netprox::atomic_write(out_path(args.out_dir, cfg.trajectory_path),
                        netprox::trajectory_csv(art.result));
  netprox::atomic_write(out_path(args.out_dir, cfg.certification_path),
                        art.certification.dump(2) + "\n");
  std::cout << art.certification.dump(2) << "\n";
  if (!art.pass) {
    emit_error("certification_failed",
               "kkt or rate check failed; see certification report");
    return kExitAssumption;
  }
  return kExitOk;
}

int cmd_verify(const CommonArgs& args) {
  netprox::ExperimentConfig cfg =
      netprox::load_experiment_config(args.config_path);
  if (args.seed) cfg.seed = *args.seed;
  const std::string dir = fs::path(args.config_path).parent_path().string();

  nlohmann::json report = netprox::run_verification(cfg, dir);
  netprox::atomic_write(out_path(args.out_dir, cfg.verify_path),
                        report.dump(2) + "\n");
  std::cout << report.dump(2) << "\n";
  if (!report.at("pass").get<bool>()) {
    emit_error("verification_failed", "a factor check failed; see report");
    return kExitAssumption;
  }
  return kExitOk;
}

int cmd_tradeoff(const CommonArgs& args) {
  netprox::TradeoffConfig cfg =
      netprox::load_tradeoff_config(args.config_path);
  if (args.seed) cfg.seed = *args.seed;

  const auto points = netprox::run_tradeoff(cfg);
  std::ostringstream csv;
  netprox::write_sweep_csv(csv, points);
  netprox::atomic_write(out_path(args.out_dir, cfg.sweep_path), csv.str());
  std::cout << points.size() << " grid points written\n";
  if (cfg.end_to_end) {
    nlohmann::json e2e = netprox::run_tradeoff_end_to_end(cfg);
    netprox::atomic_write(out_path(args.out_dir, cfg.end_to_end_path),
                          e2e.dump(2) + "\n");
    std::cout << e2e.dump(2) << "\n";
    for (const auto& row : e2e) {
      if (!row.at("pass").get<bool>()) {
        emit_error("rate_match_failed", "end-to-end rate check failed");
        return kExitAssumption;
      }
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "netprox: distributed primal-dual proximal optimization on simulated "
      "networks"};
  app.require_subcommand(1);

  CommonArgs run_args, verify_args, tradeoff_args;
  CLI::App* run_cmd =
      app.add_subcommand("run", "run an experiment and certify the limit");
  add_common(run_cmd, run_args);
  CLI::App* verify_cmd = app.add_subcommand(
      "verify", "check the operator contraction bounds on random trials");
  add_common(verify_cmd, verify_args);
  CLI::App* tradeoff_cmd = app.add_subcommand(
      "tradeoff", "communication/computation round-count sweep");
  add_common(tradeoff_cmd, tradeoff_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(run_args);
    if (verify_cmd->parsed()) return cmd_verify(verify_args);
    if (tradeoff_cmd->parsed()) return cmd_tradeoff(tradeoff_args);
  } catch (const ConfigError& e) {
    emit_error("config", e.what());
    return kExitUsage;
  } catch (const AssumptionError& e) {
    emit_error("assumption_violation", e.what());
    return kExitAssumption;
  } catch (const netprox::DivergenceError& e) {
    emit_error("divergence", e.what());
    return kExitDivergence;
  } catch (const std::exception& e) {
    emit_error("runtime", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}
