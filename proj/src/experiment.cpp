#include "netprox/experiment.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "netprox/baseline.hpp"
#include "netprox/lifted.hpp"

namespace netprox {

namespace fs = std::filesystem;

namespace {

GraphSpec parse_graph_spec(const nlohmann::json& j) {
  GraphSpec spec;
  if (j.contains("file")) {
    spec.file = j.at("file").get<std::string>();
    return spec;
  }
  spec.generator = j.value("generator", "ring");
  spec.m = j.at("m").get<int>();
  spec.seed = j.value("seed", std::uint64_t{0});
  spec.radius = j.value("radius", 0.0);
  return spec;
}

PresetParams parse_preset_params(const nlohmann::json& j) {
  PresetParams params;
  params.b = j.value("b", params.b);
  params.alpha = j.value("alpha", params.alpha);
  params.hops = j.value("K", params.hops);
  return params;
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed config " + path + ": " + e.what());
  }
  return j;
}

Matrix seeded_gaussian(int rows, int cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = gauss(rng);
  return m;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void atomic_write(const std::string& path, const std::string& contents) {
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write: " + tmp.string());
    out << contents;
  }
  fs::rename(tmp, target);
}

ExperimentConfig parse_experiment_config(const nlohmann::json& j) {
  ExperimentConfig cfg;
  try {
    cfg.graph = parse_graph_spec(j.at("graph"));
    cfg.weights = j.value("weights", cfg.weights);
    cfg.problem = j.at("problem");
    if (j.contains("preset")) {
      const auto& pj = j.at("preset");
      if (pj.is_string()) {
        cfg.preset = pj.get<std::string>();
      } else {
        cfg.preset = pj.at("name").get<std::string>();
        cfg.preset_params = parse_preset_params(pj);
      }
    }
    if (j.contains("gamma") && !j.at("gamma").is_string()) {
      cfg.gamma = j.at("gamma").get<double>();
    } else if (j.contains("gamma") &&
               j.at("gamma").get<std::string>() != "star") {
      throw ConfigError("gamma must be a number or \"star\"");
    }
    cfg.iters = j.value("iters", cfg.iters);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.init = j.value("init", cfg.init);
    cfg.trials = j.value("trials", cfg.trials);
    if (j.contains("tolerances")) {
      cfg.kkt_tol = j.at("tolerances").value("kkt", cfg.kkt_tol);
      cfg.rate_margin =
          j.at("tolerances").value("rate_margin", cfg.rate_margin);
    }
    if (j.contains("output")) {
      const auto& oj = j.at("output");
      cfg.trajectory_path = oj.value("trajectory", cfg.trajectory_path);
      cfg.certification_path =
          oj.value("certification", cfg.certification_path);
      cfg.verify_path = oj.value("report", cfg.verify_path);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
  if (cfg.iters < 0) throw ConfigError("iters must be >= 0");
  if (cfg.init != "zero" && cfg.init != "random") {
    throw ConfigError("init must be zero or random");
  }
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  return parse_experiment_config(read_json_file(path));
}

Graph build_graph(const GraphSpec& spec, const std::string& config_dir) {
  if (!spec.file.empty()) {
    fs::path p(spec.file);
    if (p.is_relative() && !config_dir.empty()) p = fs::path(config_dir) / p;
    return Graph::load(p.string());
  }
  if (spec.generator == "ring") return Graph::ring(spec.m);
  if (spec.generator == "path") return Graph::path(spec.m);
  if (spec.generator == "complete") return Graph::complete(spec.m);
  if (spec.generator == "random_geometric") {
    return Graph::random_geometric(spec.m, spec.seed, spec.radius);
  }
  throw ConfigError("unknown graph generator: " + spec.generator);
}

GossipMatrix build_gossip(const Graph& g, const std::string& weights) {
  GossipMatrix w = GossipMatrix::metropolis(g);
  if (weights == "metropolis") return w;
  if (weights == "lazy_metropolis" || weights == "lazy") return lazy(w);
  throw ConfigError("unknown weights: " + weights);
}

std::string trajectory_csv(const RunResult& r) {
  std::string out = "iter,err_sq,consensus,obj_gap,kkt_primal,kkt_dual\n";
  for (const auto& m : r.metrics) {
    out += std::to_string(m.iter);
    out += ',';
    out += format_double(m.err_sq);
    out += ',';
    out += format_double(m.consensus);
    out += ',';
    out += format_double(m.obj_gap);
    out += ',';
    out += format_double(m.kkt_primal);
    out += ',';
    out += format_double(m.kkt_dual);
    out += '\n';
  }
  return out;
}

namespace {

CompositeProblem build_problem(const ExperimentConfig& cfg, int graph_m) {
  nlohmann::json pj = cfg.problem;
  if (!pj.contains("m")) pj["m"] = graph_m;
  if (!pj.contains("costs") && !pj.contains("seed")) pj["seed"] = cfg.seed;
  try {
    CompositeProblem p = problem_from_json(pj);
    if (p.agent_count() != graph_m) {
      throw ConfigError("problem agent count does not match the graph");
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid problem spec: ") + e.what());
  }
}

}  // namespace

ExperimentArtifacts run_experiment(const ExperimentConfig& cfg,
                                   const std::string& config_dir) {
  const Graph g = build_graph(cfg.graph, config_dir);
  const GossipMatrix w = build_gossip(g, cfg.weights);
  const CompositeProblem p = build_problem(cfg, g.node_count());
  const WeightTriple triple = make_preset(cfg.preset, w, cfg.preset_params);

  const TripleReport report = validate_triple(triple, p.mu, p.L);
  if (!report.ok()) {
    throw AssumptionError("assumption violation in preset " + triple.label +
                          ": " + report.first_failure());
  }

  ExperimentArtifacts art;
  art.prediction = rate_prediction(triple, p.mu, p.L, cfg.gamma);
  const double gamma = art.prediction.gamma_used;
  if (gamma <= 0.0) throw ConfigError("step size must be positive");

  Matrix z0 = Matrix::Zero(g.node_count(), p.d);
  if (cfg.init == "random") {
    z0 = seeded_gaussian(g.node_count(), p.d, cfg.seed + 0x9e3779b97f4a7c15ULL);
  }
  const Matrix y0 = Matrix::Zero(g.node_count(), p.d);
  art.result = run(triple, p, gamma, cfg.iters, z0, y0);
  art.fit = empirical_rate(art.result.err_sq());
  art.final_kkt = kkt_residual(p, triple.C, art.result.final_state.x);

  const bool rate_in_window =
      gamma > art.prediction.gamma_lo && gamma < art.prediction.gamma_hi;
  const bool rate_ok = !rate_in_window || std::isnan(art.fit.lambda) ||
                       art.fit.lambda <= art.prediction.lambda + cfg.rate_margin;
  const bool kkt_ok = art.final_kkt.primal <= cfg.kkt_tol &&
                      art.final_kkt.dual <= cfg.kkt_tol;
  art.pass = rate_ok && kkt_ok;

  art.certification = {
      {"preset", triple.label},
      {"gamma", gamma},
      {"lambda_pred", art.prediction.lambda},
      {"lambda_emp", art.fit.lambda},
      {"kkt_primal", art.final_kkt.primal},
      {"kkt_dual", art.final_kkt.dual},
      {"pass", art.pass},
      {"detail",
       {{"lambda_comm", art.prediction.lambda_comm},
        {"lambda_opt", art.prediction.lambda_opt},
        {"gamma_lo", art.prediction.gamma_lo},
        {"gamma_hi", art.prediction.gamma_hi},
        {"gamma_star", art.prediction.gamma_star},
        {"fit_contractive", art.fit.contractive},
        {"fit_floored", art.fit.floored},
        {"max_dual_colsum", art.result.max_dual_colsum}}}};
  return art;
}

nlohmann::json run_verification(const ExperimentConfig& cfg,
                                const std::string& config_dir) {
  if (cfg.trials <= 0) throw ConfigError("trials must be positive");
  const Graph g = build_graph(cfg.graph, config_dir);
  const GossipMatrix w = build_gossip(g, cfg.weights);
  const CompositeProblem p = build_problem(cfg, g.node_count());
  const WeightTriple triple = make_preset(cfg.preset, w, cfg.preset_params);

  const TripleReport report = validate_triple(triple, p.mu, p.L);
  if (!report.ok()) {
    throw AssumptionError("assumption violation in preset " + triple.label +
                          ": " + report.first_failure());
  }
  const double gamma =
      cfg.gamma.value_or(rate_prediction(triple, p.mu, p.L).gamma_star);

  const IsometryReport iso = verify_consensus_isometry(triple, cfg.trials, cfg.seed);
  const ContractionReport grad =
      verify_gradient_contraction(triple, p, gamma, cfg.trials, cfg.seed + 1);
  const ProxMixReport pm =
      verify_prox_and_mixing(triple, p, gamma, cfg.trials, cfg.seed + 2);
  const ChainReport chain =
      verify_chain(triple, p, gamma, cfg.trials, cfg.seed + 3);

  const bool all_pass = iso.pass && grad.pass && pm.pass && chain.pass;
  return {
      {"preset", triple.label},
      {"gamma", gamma},
      {"consensus_identity",
       {{"max_violation", iso.max_violation},
        {"trials", iso.trials},
        {"pass", iso.pass}}},
      {"gradient_contraction",
       {{"max_violation", std::max(grad.max_ratio - grad.bound, 0.0)},
        {"max_ratio", grad.max_ratio},
        {"bound", grad.bound},
        {"aligned_ratio", grad.aligned_ratio},
        {"trials", grad.trials},
        {"pass", grad.pass}}},
      {"prox_nonexpansive_and_mix_identity",
       {{"max_violation",
         std::max(pm.max_prox_ratio - 1.0, pm.max_mix_violation)},
        {"max_prox_ratio", pm.max_prox_ratio},
        {"max_mix_violation", pm.max_mix_violation},
        {"trials", pm.trials},
        {"pass", pm.pass}}},
      {"chain_contraction",
       {{"max_violation", std::max(chain.max_ratio - chain.lambda, 0.0)},
        {"max_ratio", chain.max_ratio},
        {"lambda", chain.lambda},
        {"witness_gap", chain.witness_gap},
        {"trials", chain.trials},
        {"pass", chain.pass}}},
      {"pass", all_pass}};
}

TradeoffConfig parse_tradeoff_config(const nlohmann::json& j) {
  TradeoffConfig cfg;
  auto axis = [](const nlohmann::json& a) -> std::vector<double> {
    if (a.is_array()) return a.get<std::vector<double>>();
    const double start = a.at("start").get<double>();
    const double stop = a.at("stop").get<double>();
    const double step = a.at("step").get<double>();
    if (step <= 0.0) throw ConfigError("grid step must be positive");
    std::vector<double> vals;
    for (double v = start; v <= stop + 1e-12; v += step) vals.push_back(v);
    return vals;
  };
  try {
    if (j.contains("grid")) {
      cfg.rho_com_grid = axis(j.at("grid").at("rho_com"));
      cfg.rho_opt_grid = axis(j.at("grid").at("rho_opt"));
    } else {
      cfg.rho_com_grid = default_grid();
      cfg.rho_opt_grid = default_grid();
    }
    cfg.end_to_end = j.value("end_to_end", false);
    cfg.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("output")) {
      cfg.sweep_path = j.at("output").value("sweep", cfg.sweep_path);
      cfg.end_to_end_path =
          j.at("output").value("end_to_end", cfg.end_to_end_path);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid tradeoff config: ") + e.what());
  }
  return cfg;
}

TradeoffConfig load_tradeoff_config(const std::string& path) {
  return parse_tradeoff_config(read_json_file(path));
}

std::vector<TradeoffPoint> run_tradeoff(const TradeoffConfig& cfg) {
  return sweep(cfg.rho_com_grid, cfg.rho_opt_grid);
}

nlohmann::json run_tradeoff_end_to_end(const TradeoffConfig& cfg) {
  // Sample three target rates from the grid and check the headline claim on a
  // concrete poorly connected graph: with K Chebyshev-accelerated rounds the
  // distributed iterate matches the centralized rate per gradient evaluation.
  std::vector<double> samples;
  const auto& grid = cfg.rho_opt_grid;
  if (grid.empty()) throw ConfigError("empty rho_opt grid");
  samples.push_back(grid.front());
  samples.push_back(grid[grid.size() / 2]);
  samples.push_back(grid.back());

  const Graph g = Graph::ring(20);
  const GossipMatrix w = GossipMatrix::metropolis(g);
  const double rho_com = spectral_info(w).rho_com;

  nlohmann::json out = nlohmann::json::array();
  for (double ro : samples) {
    const double kappa = (1.0 + ro) / (1.0 - ro);
    RandomProblemOptions opts;
    opts.mu = 1.0;
    opts.L = kappa;
    opts.seed = cfg.seed + 17;
    opts.shared_basis = true;
    const CompositeProblem p = make_random_problem(20, 5, opts);

    const int k = rounds_chebyshev(rho_com, ro);
    PresetParams params;
    params.hops = k;
    const WeightTriple triple = make_preset("chebyshev", w, params);
    const RatePrediction pred = rate_prediction(triple, p.mu, p.L);
    const RunResult res = run(triple, p, pred.gamma_star, 120);
    const RateFit fit = empirical_rate(res.err_sq());
    const double target = ro * ro;
    out.push_back({{"rho_opt", ro},
                   {"rho_com", rho_com},
                   {"rounds", k},
                   {"lambda_emp", fit.lambda},
                   {"target", target},
                   {"pass", fit.lambda <= target + 0.02}});
  }
  return out;
}

}  // namespace netprox
