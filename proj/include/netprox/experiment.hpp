#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "netprox/algorithm.hpp"
#include "netprox/certify.hpp"
#include "netprox/graph.hpp"
#include "netprox/problem.hpp"
#include "netprox/tradeoff.hpp"

namespace netprox {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class AssumptionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GraphSpec {
  std::string file;       // edge-list path; empty when generated
  std::string generator;  // ring | path | complete | random_geometric
  int m = 0;
  std::uint64_t seed = 0;
  double radius = 0.0;
};

struct ExperimentConfig {
  GraphSpec graph;
  std::string weights = "metropolis";  // metropolis | lazy_metropolis
  nlohmann::json problem;              // forwarded to problem_from_json
  std::string preset = "nids_exact_diffusion";
  PresetParams preset_params;
  std::optional<double> gamma;  // empty means the optimal step size
  long iters = 300;
  std::uint64_t seed = 0;
  std::string init = "zero";  // zero | random
  double kkt_tol = 1e-6;
  double rate_margin = 0.02;
  int trials = 100;  // verify subcommand
  std::string trajectory_path = "trajectory.csv";
  std::string certification_path = "certification.json";
  std::string verify_path = "verify.json";
};

ExperimentConfig parse_experiment_config(const nlohmann::json& j);
ExperimentConfig load_experiment_config(const std::string& path);

Graph build_graph(const GraphSpec& spec, const std::string& config_dir);
GossipMatrix build_gossip(const Graph& g, const std::string& weights);

struct ExperimentArtifacts {
  RunResult result;
  RatePrediction prediction;
  RateFit fit;
  KktResidual final_kkt;
  nlohmann::json certification;  // emitted report
  bool pass = false;
};

// Build graph, gossip matrix, problem, and preset from the config; run the
// iterate; certify. Throws AssumptionError when the triple fails validation.
ExperimentArtifacts run_experiment(const ExperimentConfig& cfg,
                                   const std::string& config_dir);

// Operator factor verifier battery driven by the same config. All-pass is the gate.
nlohmann::json run_verification(const ExperimentConfig& cfg,
                                const std::string& config_dir);

struct TradeoffConfig {
  std::vector<double> rho_com_grid;
  std::vector<double> rho_opt_grid;
  bool end_to_end = false;
  std::uint64_t seed = 0;
  std::string sweep_path = "tradeoff.csv";
  std::string end_to_end_path = "tradeoff_e2e.json";
};

TradeoffConfig parse_tradeoff_config(const nlohmann::json& j);
TradeoffConfig load_tradeoff_config(const std::string& path);

std::vector<TradeoffPoint> run_tradeoff(const TradeoffConfig& cfg);

// Rate-match spot check for sampled rho_opt values: a Chebyshev-accelerated
// run on a 20-agent ring must track the centralized rate per gradient
// evaluation.
nlohmann::json run_tradeoff_end_to_end(const TradeoffConfig& cfg);

// Serialize run metrics as CSV with the fixed header
// iter,err_sq,consensus,obj_gap,kkt_primal,kkt_dual. Deterministic bytes.
std::string trajectory_csv(const RunResult& r);

// Shortest round-trip decimal form, locale-independent.
std::string format_double(double v);

// Write via a temp file and rename so readers never see partial output.
void atomic_write(const std::string& path, const std::string& contents);

}  // namespace netprox
