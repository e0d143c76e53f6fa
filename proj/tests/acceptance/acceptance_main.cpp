// Acceptance suite: every release gate runs here, one line per criterion.
// Usage: netprox_acceptance <path-to-cli-binary>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "../support/helpers.hpp"
#include "netprox/baseline.hpp"
#include "netprox/certify.hpp"
#include "netprox/experiment.hpp"
#include "netprox/lifted.hpp"
#include "netprox/tradeoff.hpp"

using namespace netprox;
using namespace netprox::testing;
namespace fs = std::filesystem;

namespace {

struct Gate {
  int failures = 0;
  double max_dual_colsum = 0.0;

  void record(int id, const std::string& what, bool pass,
              const std::string& detail) {
    std::cout << (pass ? "[PASS] " : "[FAIL] ") << "criterion " << id << ": "
              << what << " (" << detail << ")\n";
    if (!pass) ++failures;
  }

  void run(int id, const std::string& what,
           const std::function<std::pair<bool, std::string>()>& body) {
    try {
      const auto [pass, detail] = body();
      record(id, what, pass, detail);
    } catch (const std::exception& e) {
      record(id, what, false, std::string("exception: ") + e.what());
    }
  }
};

std::string fmt(double v) { return format_double(v); }

CompositeProblem ring10_problem(NonsmoothTerm g = NonsmoothTerm::zero()) {
  RandomProblemOptions opts;
  opts.mu = 1.0;
  opts.L = 10.0;
  opts.seed = 42;
  return make_random_problem(10, 5, opts, std::move(g));
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  Gate gate;
  const double rho_opt_sq_10 = std::pow(9.0 / 11.0, 2);

  // 1. Linear-rate certification on the 10-agent ring.
  gate.run(1, "rate certification on the 10-ring (smooth, kappa = 10)", [&] {
    const auto start = std::chrono::steady_clock::now();
    const GossipMatrix w = ring_metropolis(10);
    const WeightTriple t = make_preset("nids", w);
    const CompositeProblem p = ring10_problem();
    const double gamma = 2.0 / (p.L + p.mu);
    const RunResult res = run(t, p, gamma, 300);
    gate.max_dual_colsum = std::max(gate.max_dual_colsum, res.max_dual_colsum);
    const double lambda2 = sym_eig(t.C).values(1);
    const double bound = std::max(rho_opt_sq_10, 1.0 - lambda2);
    const RateFit fit = empirical_rate(res.err_sq());
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    const bool pass = fit.lambda <= bound + 0.02 && secs < 10.0;
    return std::make_pair(pass, "lambda_emp=" + fmt(fit.lambda) + " bound=" +
                                    fmt(bound) + "+0.02, runtime=" +
                                    fmt(secs) + "s");
  });

  // 2. Composite case with the l1 term.
  gate.run(2, "composite convergence and optimality residuals (l1)", [&] {
    const GossipMatrix w = ring_metropolis(10);
    const WeightTriple t = make_preset("nids", w);
    const CompositeProblem p = ring10_problem(NonsmoothTerm::l1(0.1));
    const double gamma = 2.0 / (p.L + p.mu);

    const RunResult short_run = run(t, p, gamma, 300);
    const RateFit fit = empirical_rate(short_run.err_sq());
    gate.max_dual_colsum =
        std::max(gate.max_dual_colsum, short_run.max_dual_colsum);

    const RunResult long_run = run(t, p, gamma, 3000);
    gate.max_dual_colsum =
        std::max(gate.max_dual_colsum, long_run.max_dual_colsum);
    const Vector x_ref = reference_solution(p, 1e-11);
    double limit_gap = 0.0;
    for (int i = 0; i < 10; ++i) {
      limit_gap = std::max(
          limit_gap,
          (long_run.final_state.x.row(i).transpose() - x_ref).norm());
    }
    const KktResidual kkt = kkt_residual(p, t.C, long_run.final_state.x);
    const bool pass = fit.contractive && limit_gap <= 1e-7 &&
                      kkt.primal <= 1e-7 && kkt.dual <= 1e-7;
    return std::make_pair(
        pass, "slope=" + fmt(fit.slope) + " limit_gap=" + fmt(limit_gap) +
                  " kkt=(" + fmt(kkt.primal) + "," + fmt(kkt.dual) + ")");
  });

  // 3. Preset fidelity against standalone recursions.
  gate.run(3, "preset fidelity (extra, nids, diging) over 100 iterations", [&] {
    const int iters = 100;
    const GossipMatrix w = ring_lazy(10);
    const CompositeProblem p = quad_problem(10, 4, 1.0, 2.0, 71);
    std::mt19937_64 rng(72);
    std::normal_distribution<double> gauss;
    Matrix x0(10, 4);
    for (int i = 0; i < 10; ++i)
      for (int c = 0; c < 4; ++c) x0(i, c) = gauss(rng);

    const WeightTriple te = make_preset("extra", w);
    const WeightTriple tn = make_preset("nids", w);
    const WeightTriple td = make_preset("diging", w);
    const double ge = rate_prediction(te, p.mu, p.L).gamma_star;
    const double gn = rate_prediction(tn, p.mu, p.L).gamma_star;
    const double gd = rate_prediction(td, p.mu, p.L).gamma_star;
    const double gap_extra = max_sequence_gap(
        unified_sequence(te, p, ge, x0, extra_matched_y0(te, x0), iters),
        extra_recursion(w.entries(), p, ge, x0, iters), iters + 1);
    const double gap_nids = max_sequence_gap(
        unified_sequence(tn, p, gn, x0, nids_matched_y0(tn, p, gn, x0),
                         iters),
        nids_recursion(w.entries(), p, gn, x0, iters), iters + 1);
    const double gap_diging = max_sequence_gap(
        unified_sequence(td, p, gd, x0, diging_matched_y0(w, x0), iters),
        diging_recursion(w.entries(), p, gd, x0, iters), iters + 1);
    const double worst = std::max({gap_extra, gap_nids, gap_diging});
    return std::make_pair(worst <= 1e-10,
                          "max deviations: extra=" + fmt(gap_extra) +
                              " nids=" + fmt(gap_nids) +
                              " diging=" + fmt(gap_diging));
  });

  // 4. Equivalence of the primal-dual and eliminated forms.
  gate.run(4, "form equivalence over 50 iterations (smooth and l1)", [&] {
    double worst = 0.0;
    for (const bool with_l1 : {false, true}) {
      const GossipMatrix w = ring_metropolis(10);
      const WeightTriple t = make_preset("nids", w);
      const CompositeProblem p = quad_problem(
          10, 5, 1.0, 10.0, with_l1 ? 24 : 23,
          with_l1 ? NonsmoothTerm::l1(0.1) : NonsmoothTerm::zero());
      const double gamma = 2.0 / (p.L + p.mu);
      std::mt19937_64 rng(4);
      std::normal_distribution<double> gauss;
      Matrix z0(10, 5);
      for (int i = 0; i < 10; ++i)
        for (int c = 0; c < 5; ++c) z0(i, c) = gauss(rng);

      std::vector<Matrix> zs{z0}, xs;
      AlgorithmState s = make_state(t, p, gamma, z0, Matrix::Zero(10, 5));
      xs.push_back(s.x);
      for (int k = 0; k < 52; ++k) {
        s = step(t, p, gamma, s);
        zs.push_back(s.z);
        xs.push_back(s.x);
      }
      Matrix z_prev = zs[0], z_curr = zs[1], x_prev = xs[0], x_curr = xs[1];
      for (int k = 0; k + 2 <= 51; ++k) {
        const Matrix z_next =
            step_eliminated(t, p, gamma, z_prev, z_curr, x_prev, x_curr);
        worst = std::max(worst, (z_next - zs[static_cast<std::size_t>(k) + 2])
                                    .cwiseAbs()
                                    .maxCoeff());
        z_prev = z_curr;
        z_curr = z_next;
        x_prev = x_curr;
        x_curr = prox_rowwise(p, gamma, z_curr);
      }
    }
    return std::make_pair(worst <= 1e-10, "max deviation=" + fmt(worst));
  });

  // 5. Operator decomposition bounds per preset and network size.
  gate.run(5, "operator factor and chain bounds (100 trials per preset)", [&] {
    const std::vector<std::pair<std::string, PresetParams>> presets = {
        {"extra", {}},          {"nids_exact_diffusion", {}},
        {"next_augdgm", {}},    {"diging", {}},
        {"jakovetic", {}},      {"mansoori", {}},
        {"alghunaim", {}},      {"case1", {}},
        {"case2", {}},          {"chebyshev", {.hops = 3}}};
    std::ostringstream detail;
    bool pass = true;
    int combos = 0;
    for (int m : {3, 10, 20}) {
      const GossipMatrix w = ring_lazy(m);
      const CompositeProblem p =
          quad_problem(m, 3, 1.0, 2.0, 500 + m, NonsmoothTerm::l1(0.05));
      for (const auto& [name, params] : presets) {
        const WeightTriple t = make_preset(name, w, params);
        if (!validate_triple(t, p.mu, p.L).ok()) {
          detail << name << "@" << m << " skipped (fails validation); ";
          continue;
        }
        ++combos;
        const double gamma = rate_prediction(t, p.mu, p.L).gamma_star;
        const IsometryReport iso = verify_consensus_isometry(t, 100, 1000 + m);
        const ContractionReport grad = verify_gradient_contraction(t, p, gamma, 100, 2000 + m);
        const ProxMixReport pm =
            verify_prox_and_mixing(t, p, gamma, 100, 3000 + m);
        const ChainReport chain = verify_chain(t, p, gamma, 100, 4000 + m);
        bool ok = iso.max_violation <= 1e-9 &&
                  grad.max_ratio <= grad.bound + 1e-9 &&
                  pm.max_prox_ratio <= 1.0 + 1e-12 &&
                  pm.max_mix_violation <= 1e-9 &&
                  chain.max_ratio <= chain.lambda + 1e-9;
        if (!std::isnan(grad.aligned_ratio)) {
          ok = ok && std::abs(grad.aligned_ratio - grad.bound) <= 1e-3;
        }
        if (!ok) {
          pass = false;
          detail << name << "@" << m << " FAILED; ";
        }
      }
    }
    detail << combos << " preset/size combinations verified";
    return std::make_pair(pass && combos == 30, detail.str());
  });

  // 6. Necessity witness for the sum condition.
  gate.run(6, "broken sum condition: fixed point without optimality", [&] {
    const GossipMatrix w = ring_lazy(10);
    WeightTriple t = make_preset("nids", w);
    t.A *= 0.9;
    t.D *= 0.9;
    const CompositeProblem p = quad_problem(10, 3, 1.0, 10.0, 45);
    if (validate_triple(t, p.mu, p.L).ok()) {
      return std::make_pair(false, std::string("triple unexpectedly valid"));
    }
    const double gamma = 1.8 / (p.L + p.mu);
    AlgorithmState s = make_state(t, p, gamma, Matrix::Zero(10, 3),
                                  Matrix::Zero(10, 3));
    for (int k = 0; k < 4000; ++k) s = step(t, p, gamma, s);
    const FixResidual fix = fix_residual(t, p, gamma, s.x);
    const KktResidual kkt = kkt_residual(p, t.C, s.x);
    const bool pass =
        fix.consensus <= 1e-8 && fix.aggregate <= 1e-8 && kkt.dual > 1e-2;
    return std::make_pair(pass, "fix=(" + fmt(fix.consensus) + "," +
                                    fmt(fix.aggregate) + ") kkt_dual=" +
                                    fmt(kkt.dual));
  });

  // 7. Communication/computation round counts.
  gate.run(7, "round-count formulas and grid orderings", [&] {
    bool pass = rounds_chebyshev(0.6, std::sqrt(0.6)) == 1;
    std::string why = pass ? "" : "boundary case rho_com=0.6 failed; ";
    const auto grid = default_grid();
    for (double rc : grid) {
      for (double ro : grid) {
        const int plain = rounds_plain(rc, ro);
        const int cheby = rounds_chebyshev(rc, ro);
        const int base = rounds_baseline(rc, ro);
        if (rc >= 0.5 && cheby > plain) {
          pass = false;
          why += "cheby>plain at (" + fmt(rc) + "," + fmt(ro) + "); ";
        }
        if (ro <= 0.1 && base > plain) {
          pass = false;
          why += "baseline>plain at rho_opt<=0.1; ";
        }
        if (ro >= 0.9 && plain > base) {
          pass = false;
          why += "plain>baseline at rho_opt>=0.9; ";
        }
      }
    }
    return std::make_pair(pass, why.empty() ? "361-point grid ordered as "
                                              "claimed"
                                            : why);
  });

  // 8. Centralized-rate matching through Chebyshev-accelerated consensus.
  gate.run(8, "distributed run matches the centralized rate (m = 20)", [&] {
    const GossipMatrix w = ring_metropolis(20);
    const double rho_com = spectral_info(w).rho_com;
    RandomProblemOptions opts;
    opts.mu = 1.0;
    opts.L = 10.0;
    opts.seed = 8;
    opts.shared_basis = true;
    const CompositeProblem p = make_random_problem(20, 5, opts);
    const double ro = 9.0 / 11.0;
    const int k = rounds_chebyshev(rho_com, ro);
    PresetParams params;
    params.hops = k;
    const WeightTriple t = make_preset("chebyshev", w, params);
    const double gamma = 2.0 / (p.L + p.mu);
    const RunResult res = run(t, p, gamma, 120);
    gate.max_dual_colsum = std::max(gate.max_dual_colsum, res.max_dual_colsum);
    const RateFit fit = empirical_rate(res.err_sq());

    const CentralizedRun central = prox_grad_run(p, gamma, 120, Vector::Ones(5));
    const RateFit central_fit =
        empirical_rate(central.error_sq(reference_solution(p, 1e-13)));
    const bool pass = fit.lambda <= rho_opt_sq_10 + 0.02 &&
                      std::abs(central_fit.lambda - rho_opt_sq_10) <= 0.01;
    return std::make_pair(
        pass, "K=" + std::to_string(k) + " lambda_emp=" + fmt(fit.lambda) +
                  " central=" + fmt(central_fit.lambda) + " target=" +
                  fmt(rho_opt_sq_10));
  });

  // 9. Dual feasibility across every run above.
  gate.run(9, "columnwise |1'y| stays at roundoff in all runs", [&] {
    return std::make_pair(gate.max_dual_colsum <= 1e-12,
                          "max=" + fmt(gate.max_dual_colsum));
  });

  // 10. Byte-identical CLI reruns.
  gate.run(10, "deterministic CLI outputs for a fixed seed", [&] {
    if (cli.empty()) {
      return std::make_pair(false, std::string("no CLI path given"));
    }
    const fs::path dir =
        fs::temp_directory_path() / "netprox_acceptance_determinism";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const nlohmann::json cfg = {
        {"graph", {{"generator", "ring"}, {"m", 10}}},
        {"problem", {{"d", 5}, {"mu", 1.0}, {"L", 10.0}, {"seed", 42}}},
        {"preset", "nids"},
        {"gamma", "star"},
        {"iters", 300},
        {"seed", 7}};
    std::ofstream(dir / "config.json") << cfg.dump();
    auto invoke = [&](const std::string& out) {
      const std::string cmd = cli + " run --config " +
                              (dir / "config.json").string() + " --out " +
                              (dir / out).string() + " > /dev/null 2>&1";
      return std::system(cmd.c_str());
    };
    if (invoke("a") != 0 || invoke("b") != 0) {
      return std::make_pair(false, std::string("cli invocation failed"));
    }
    auto slurp = [](const fs::path& p) {
      std::ifstream in(p, std::ios::binary);
      std::stringstream ss;
      ss << in.rdbuf();
      return ss.str();
    };
    const bool same_traj = slurp(dir / "a" / "trajectory.csv") ==
                           slurp(dir / "b" / "trajectory.csv");
    const bool same_cert = slurp(dir / "a" / "certification.json") ==
                           slurp(dir / "b" / "certification.json");
    return std::make_pair(same_traj && same_cert,
                          std::string(same_traj ? "trajectory identical"
                                                : "trajectory differs") +
                              ", " +
                              (same_cert ? "certification identical"
                                         : "certification differs"));
  });

  std::cout << (gate.failures == 0 ? "ALL CRITERIA PASSED"
                                   : std::to_string(gate.failures) +
                                         " CRITERIA FAILED")
            << "\n";
  return gate.failures == 0 ? 0 : 1;
}
