#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "netprox/algorithm.hpp"
#include "netprox/baseline.hpp"
#include "netprox/certify.hpp"
#include "netprox/graph.hpp"
#include "netprox/lifted.hpp"
#include "netprox/problem.hpp"
#include "netprox/tradeoff.hpp"

namespace py = pybind11;
using namespace netprox;

namespace {

NonsmoothTerm nonsmooth_from_args(const std::string& kind, double weight,
                                  const std::optional<Vector>& lower,
                                  const std::optional<Vector>& upper) {
  if (kind == "zero") return NonsmoothTerm::zero();
  if (kind == "l1") return NonsmoothTerm::l1(weight);
  if (kind == "box") {
    if (!lower || !upper) {
      throw std::invalid_argument("box needs lower and upper bounds");
    }
    return NonsmoothTerm::box(*lower, *upper);
  }
  throw std::invalid_argument("unknown nonsmooth kind: " + kind);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Distributed primal-dual proximal optimization on simulated networks";

  py::register_exception<DivergenceError>(m, "DivergenceError");

  py::class_<Graph>(m, "Graph")
      .def(py::init<int, std::vector<std::pair<int, int>>>(), py::arg("m"),
           py::arg("edges"))
      .def_static("ring", &Graph::ring, py::arg("m"))
      .def_static("path", &Graph::path, py::arg("m"))
      .def_static("complete", &Graph::complete, py::arg("m"))
      .def_static("random_geometric", &Graph::random_geometric, py::arg("m"),
                  py::arg("seed"), py::arg("radius") = 0.0)
      .def_static("load", &Graph::load, py::arg("path"))
      .def("save", &Graph::save, py::arg("path"))
      .def_property_readonly("m", &Graph::node_count)
      .def_property_readonly("edges", &Graph::edges)
      .def("degree", &Graph::degree, py::arg("node"));

  py::class_<GossipMatrix>(m, "GossipMatrix")
      .def_static("metropolis", &GossipMatrix::metropolis, py::arg("graph"))
      .def_property_readonly("entries",
                             [](const GossipMatrix& w) { return w.entries(); })
      .def_property_readonly("hop_order", &GossipMatrix::hop_order)
      .def_property_readonly("graph", &GossipMatrix::graph);
  m.def("lazy", &lazy, py::arg("w"));
  m.def("k_hop_power", &k_hop_power, py::arg("w"), py::arg("k"));
  m.def("chebyshev_matrix", &chebyshev_matrix, py::arg("w"), py::arg("k"));

  py::class_<SpectralInfo>(m, "SpectralInfo")
      .def_readonly("eigenvalues", &SpectralInfo::eigenvalues)
      .def_readonly("rho_com", &SpectralInfo::rho_com)
      .def_readonly("lambda2_consensus", &SpectralInfo::lambda2_consensus)
      .def_readonly("mixing_valid", &SpectralInfo::mixing_valid);
  m.def("spectral_info", &spectral_info, py::arg("w"));

  py::class_<NonsmoothTerm>(m, "NonsmoothTerm")
      .def_static("zero", &NonsmoothTerm::zero)
      .def_static("l1", &NonsmoothTerm::l1, py::arg("weight"))
      .def_static("box", &NonsmoothTerm::box, py::arg("lower"),
                  py::arg("upper"));

  py::class_<CompositeProblem>(m, "CompositeProblem")
      .def_property_readonly("m", &CompositeProblem::agent_count)
      .def_readonly("d", &CompositeProblem::d)
      .def_readonly("mu", &CompositeProblem::mu)
      .def_readonly("L", &CompositeProblem::L)
      .def_property_readonly("kappa", &CompositeProblem::kappa)
      .def("to_json",
           [](const CompositeProblem& p) { return problem_to_json(p).dump(); })
      .def_static("from_json", [](const std::string& text) {
        return problem_from_json(nlohmann::json::parse(text));
      });

  m.def(
      "make_random_problem",
      [](int m_agents, int d, double mu, double L, std::uint64_t seed,
         bool shared_basis, const std::string& nonsmooth, double weight,
         const std::optional<Vector>& lower,
         const std::optional<Vector>& upper) {
        RandomProblemOptions opts;
        opts.mu = mu;
        opts.L = L;
        opts.seed = seed;
        opts.shared_basis = shared_basis;
        return make_random_problem(
            m_agents, d, opts,
            nonsmooth_from_args(nonsmooth, weight, lower, upper));
      },
      py::arg("m"), py::arg("d"), py::arg("mu"), py::arg("L"),
      py::arg("seed") = 0, py::arg("shared_basis") = false,
      py::arg("nonsmooth") = "zero", py::arg("weight") = 0.0,
      py::arg("lower") = std::nullopt, py::arg("upper") = std::nullopt);

  m.def("gradient_stack", &gradient_stack, py::arg("problem"), py::arg("x"));
  m.def("prox_rowwise", &prox_rowwise, py::arg("problem"), py::arg("gamma"),
        py::arg("z"));
  m.def("objective", &objective, py::arg("problem"), py::arg("x"));
  m.def("reference_solution", &reference_solution, py::arg("problem"),
        py::arg("tol") = 1e-11);

  py::class_<WeightTriple>(m, "WeightTriple")
      .def_readonly("A", &WeightTriple::A)
      .def_readonly("B", &WeightTriple::B)
      .def_readonly("C", &WeightTriple::C)
      .def_readonly("D", &WeightTriple::D)
      .def_readonly("label", &WeightTriple::label);
  m.def("make_triple", &make_triple, py::arg("A"), py::arg("B"), py::arg("C"),
        py::arg("D"), py::arg("label") = "custom");
  m.def(
      "make_preset",
      [](const std::string& name, const GossipMatrix& w, double b,
         double alpha, int K) {
        PresetParams params;
        params.b = b;
        params.alpha = alpha;
        params.hops = K;
        return make_preset(name, w, params);
      },
      py::arg("name"), py::arg("w"), py::arg("b") = 0.5,
      py::arg("alpha") = 0.5, py::arg("K") = 2);

  py::class_<ConditionCheck>(m, "ConditionCheck")
      .def_readonly("name", &ConditionCheck::name)
      .def_readonly("passed", &ConditionCheck::pass)
      .def_readonly("margin", &ConditionCheck::margin);
  py::class_<TripleReport>(m, "TripleReport")
      .def_readonly("checks", &TripleReport::checks)
      .def("ok", &TripleReport::ok)
      .def("first_failure", &TripleReport::first_failure);
  m.def("validate_triple", &validate_triple, py::arg("triple"), py::arg("mu"),
        py::arg("L"));

  py::class_<RatePrediction>(m, "RatePrediction")
      .def_readonly("gamma_lo", &RatePrediction::gamma_lo)
      .def_readonly("gamma_hi", &RatePrediction::gamma_hi)
      .def_readonly("gamma_star", &RatePrediction::gamma_star)
      .def_readonly("gamma_used", &RatePrediction::gamma_used)
      .def_readonly("q", &RatePrediction::q)
      .def_readonly("q_star", &RatePrediction::q_star)
      .def_readonly("lambda_", &RatePrediction::lambda)
      .def_readonly("lambda_opt", &RatePrediction::lambda_opt)
      .def_readonly("lambda_comm", &RatePrediction::lambda_comm)
      .def_readonly("lambda2_c", &RatePrediction::lambda2_c);
  m.def(
      "rate_prediction",
      [](const WeightTriple& t, double mu, double L,
         std::optional<double> gamma) {
        return rate_prediction(t, mu, L, gamma);
      },
      py::arg("triple"), py::arg("mu"), py::arg("L"),
      py::arg("gamma") = std::nullopt);

  py::class_<AlgorithmState>(m, "AlgorithmState")
      .def_readonly("x", &AlgorithmState::x)
      .def_readonly("z", &AlgorithmState::z)
      .def_readonly("y", &AlgorithmState::y)
      .def_readonly("k", &AlgorithmState::k);
  m.def("make_state", &make_state, py::arg("triple"), py::arg("problem"),
        py::arg("gamma"), py::arg("z0"), py::arg("y0"));
  m.def("step", &step, py::arg("triple"), py::arg("problem"), py::arg("gamma"),
        py::arg("state"));
  m.def("step_eliminated", &step_eliminated, py::arg("triple"),
        py::arg("problem"), py::arg("gamma"), py::arg("z_prev"),
        py::arg("z_curr"), py::arg("x_prev"), py::arg("x_curr"));

  py::class_<IterationMetrics>(m, "IterationMetrics")
      .def_readonly("iter", &IterationMetrics::iter)
      .def_readonly("err_sq", &IterationMetrics::err_sq)
      .def_readonly("consensus", &IterationMetrics::consensus)
      .def_readonly("obj_gap", &IterationMetrics::obj_gap)
      .def_readonly("kkt_primal", &IterationMetrics::kkt_primal)
      .def_readonly("kkt_dual", &IterationMetrics::kkt_dual);
  py::class_<RunResult>(m, "RunResult")
      .def_readonly("metrics", &RunResult::metrics)
      .def_readonly("final_state", &RunResult::final_state)
      .def_readonly("x_star", &RunResult::x_star)
      .def_readonly("max_dual_colsum", &RunResult::max_dual_colsum)
      .def("err_sq", &RunResult::err_sq);
  m.def(
      "run",
      [](const WeightTriple& t, const CompositeProblem& p, double gamma,
         long iters, const std::optional<Matrix>& z0,
         const std::optional<Matrix>& y0) {
        const Matrix zeros = Matrix::Zero(t.size(), p.d);
        return run(t, p, gamma, iters, z0.value_or(zeros), y0.value_or(zeros));
      },
      py::arg("triple"), py::arg("problem"), py::arg("gamma"),
      py::arg("iters"), py::arg("z0") = std::nullopt,
      py::arg("y0") = std::nullopt);

  py::class_<KktResidual>(m, "KktResidual")
      .def_readonly("primal", &KktResidual::primal)
      .def_readonly("dual", &KktResidual::dual)
      .def_readonly("y_used", &KktResidual::y_used)
      .def_readonly("y_projected", &KktResidual::y_projected)
      .def_readonly("domain_violation", &KktResidual::domain_violation);
  m.def(
      "kkt_residual",
      [](const CompositeProblem& p, const Matrix& c, const Matrix& x,
         const std::optional<Matrix>& y) { return kkt_residual(p, c, x, y); },
      py::arg("problem"), py::arg("C"), py::arg("x"),
      py::arg("y") = std::nullopt);

  py::class_<FixResidual>(m, "FixResidual")
      .def_readonly("consensus", &FixResidual::consensus)
      .def_readonly("aggregate", &FixResidual::aggregate)
      .def_readonly("domain_violation", &FixResidual::domain_violation);
  m.def("fix_residual", &fix_residual, py::arg("triple"), py::arg("problem"),
        py::arg("gamma"), py::arg("x"));

  py::class_<RateFit>(m, "RateFit")
      .def_readonly("lambda_", &RateFit::lambda)
      .def_readonly("slope", &RateFit::slope)
      .def_readonly("lambda_lo", &RateFit::lambda_lo)
      .def_readonly("lambda_hi", &RateFit::lambda_hi)
      .def_readonly("contractive", &RateFit::contractive)
      .def_readonly("floored", &RateFit::floored)
      .def_readonly("window_begin", &RateFit::window_begin)
      .def_readonly("window_end", &RateFit::window_end);
  m.def("empirical_rate", &empirical_rate, py::arg("err"));

  py::class_<IsometryReport>(m, "IsometryReport")
      .def_readonly("name", &IsometryReport::name)
      .def_readonly("max_violation", &IsometryReport::max_violation)
      .def_readonly("bound", &IsometryReport::bound)
      .def_readonly("trials", &IsometryReport::trials)
      .def_readonly("passed", &IsometryReport::pass);
  py::class_<ContractionReport>(m, "ContractionReport")
      .def_readonly("name", &ContractionReport::name)
      .def_readonly("max_ratio", &ContractionReport::max_ratio)
      .def_readonly("bound", &ContractionReport::bound)
      .def_readonly("aligned_ratio", &ContractionReport::aligned_ratio)
      .def_readonly("trials", &ContractionReport::trials)
      .def_readonly("passed", &ContractionReport::pass)
      .def_readonly("contractive", &ContractionReport::contractive);
  py::class_<ProxMixReport>(m, "ProxMixReport")
      .def_readonly("max_prox_ratio", &ProxMixReport::max_prox_ratio)
      .def_readonly("max_mix_violation", &ProxMixReport::max_mix_violation)
      .def_readonly("trials", &ProxMixReport::trials)
      .def_readonly("passed", &ProxMixReport::pass);
  py::class_<ChainReport>(m, "ChainReport")
      .def_readonly("max_ratio", &ChainReport::max_ratio)
      .def_readonly("lambda_", &ChainReport::lambda)
      .def_readonly("trials", &ChainReport::trials)
      .def_readonly("passed", &ChainReport::pass)
      .def_readonly("witness_gap", &ChainReport::witness_gap);
  m.def("verify_consensus_isometry", &verify_consensus_isometry, py::arg("triple"), py::arg("trials"),
        py::arg("seed"));
  m.def("verify_gradient_contraction", &verify_gradient_contraction, py::arg("triple"), py::arg("problem"),
        py::arg("gamma"), py::arg("trials"), py::arg("seed"));
  m.def("verify_prox_and_mixing", &verify_prox_and_mixing, py::arg("triple"),
        py::arg("problem"), py::arg("gamma"), py::arg("trials"),
        py::arg("seed"));
  m.def("verify_chain", &verify_chain, py::arg("triple"), py::arg("problem"),
        py::arg("gamma"), py::arg("trials"), py::arg("seed"),
        py::arg("project_lower") = true);

  m.def("rho_opt", &rho_opt, py::arg("kappa"));
  m.def("chebyshev_rate", &chebyshev_rate, py::arg("rho_com"), py::arg("k"));
  m.def("rounds_plain", &rounds_plain, py::arg("rho_com"), py::arg("rho_opt"));
  m.def("rounds_chebyshev", &rounds_chebyshev, py::arg("rho_com"),
        py::arg("rho_opt"));
  m.def("rounds_baseline", &rounds_baseline, py::arg("rho_com"),
        py::arg("rho_opt"));
  py::class_<TradeoffPoint>(m, "TradeoffPoint")
      .def_readonly("rho_com", &TradeoffPoint::rho_com)
      .def_readonly("rho_opt", &TradeoffPoint::rho_opt)
      .def_readonly("k_plain", &TradeoffPoint::k_plain)
      .def_readonly("k_cheby", &TradeoffPoint::k_cheby)
      .def_readonly("k_baseline", &TradeoffPoint::k_baseline);
  m.def("sweep", &sweep, py::arg("rho_com_grid"), py::arg("rho_opt_grid"));
  m.def("default_grid", &default_grid);

  py::class_<CentralizedRun>(m, "CentralizedRun")
      .def_readonly("trajectory", &CentralizedRun::trajectory)
      .def_readonly("gamma", &CentralizedRun::gamma)
      .def_readonly("rho_opt_target", &CentralizedRun::rho_opt_target)
      .def("error_sq", &CentralizedRun::error_sq, py::arg("x_star"));
  m.def("prox_grad_run", &prox_grad_run, py::arg("problem"), py::arg("gamma"),
        py::arg("iters"), py::arg("x0"));
}
