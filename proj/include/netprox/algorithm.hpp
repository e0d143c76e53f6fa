#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "netprox/graph.hpp"
#include "netprox/linalg.hpp"
#include "netprox/problem.hpp"

namespace netprox {

// Thrown when an iterate leaves the finite range; the CLI maps it to its own
// exit code.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, long iteration)
      : std::runtime_error(what), iteration(iteration) {}
  long iteration;
};

// Weight matrices of the primal-dual iterate together with the factor D such
// that A = B D. D is supplied explicitly by constructors; presets compute it,
// custom triples must provide it.
struct WeightTriple {
  Matrix A, B, C, D;
  Matrix sqrt_c;  // PSD square root of C, cached at construction
  std::string label = "custom";

  int size() const { return static_cast<int>(A.rows()); }
};

WeightTriple make_triple(Matrix a, Matrix b, Matrix c, Matrix d,
                         std::string label = "custom");

struct ConditionCheck {
  std::string name;
  bool pass;
  double margin;  // how far inside (positive) or outside (negative) the bound
};

struct TripleReport {
  std::vector<ConditionCheck> checks;
  bool ok() const;
  std::string first_failure() const;
};

// Certificate report for the structural and step-size assumptions, with the
// curvature-dependent condition evaluated at the given (mu, L).
TripleReport validate_triple(const WeightTriple& t, double mu, double L);

struct PresetParams {
  double b = 0.5;      // jakovetic
  double alpha = 0.5;  // alghunaim
  int hops = 2;        // mansoori / chebyshev round count
};

// Table of named parameterizations reproducing existing distributed schemes.
// Names: extra, nids_exact_diffusion (nids), next_augdgm (next, augdgm),
// diging, jakovetic, mansoori, alghunaim, case1, case2, chebyshev.
WeightTriple make_preset(const std::string& name, const GossipMatrix& w,
                         const PresetParams& params = {});

struct RatePrediction {
  double gamma_lo = 0.0;
  double gamma_hi = 0.0;
  double gamma_star = 0.0;
  double gamma_used = 0.0;
  double q = 0.0;           // gradient-map contraction factor at gamma_used
  double q_star = 0.0;      // its minimum over admissible step sizes
  double lambda = 0.0;      // max(lambda_opt, lambda_comm)
  double lambda_opt = 0.0;  // q^2 * max_eig(B^2 (I-C)^{-1})
  double lambda_comm = 0.0; // 1 - lambda_2(C)
  double lambda2_c = 0.0;
  double b2_ic_inv = 0.0;   // max_eig(B^2 (I-C)^{-1})
};

// Admissible step-size interval, optimal step size, and the predicted linear
// rate. `gamma` defaults to the optimal step size. Throws on invalid triples.
RatePrediction rate_prediction(const WeightTriple& t, double mu, double L,
                               std::optional<double> gamma = {});

struct AlgorithmState {
  Matrix x, z, y;
  long k = 0;
};

// x = prox of z0; y0 must have zero column sums (it lies in span(C)).
AlgorithmState make_state(const WeightTriple& t, const CompositeProblem& p,
                          double gamma, const Matrix& z0, const Matrix& y0);

// One primal-dual update. Pure; the returned state carries the x that was
// produced from the current z before mixing.
AlgorithmState step(const WeightTriple& t, const CompositeProblem& p,
                    double gamma, const AlgorithmState& s);

// Dual-free two-step recursion equivalent to two consecutive applications of
// step for matching histories. Returns the next z; x follows by prox.
Matrix step_eliminated(const WeightTriple& t, const CompositeProblem& p,
                       double gamma, const Matrix& z_prev, const Matrix& z_curr,
                       const Matrix& x_prev, const Matrix& x_curr);

struct IterationMetrics {
  long iter = 0;
  double err_sq = 0.0;      // ||x^k - 1 x*'||_F^2
  double consensus = 0.0;   // ||x^k - mean row||_F
  double obj_gap = 0.0;     // objective at the mean row minus optimum
  double kkt_primal = 0.0;
  double kkt_dual = 0.0;
};

struct RunResult {
  std::vector<IterationMetrics> metrics;
  AlgorithmState final_state;
  Vector x_star;
  double max_dual_colsum = 0.0;  // max over iterations of max |1'y|
  std::vector<double> err_sq() const;
};

RunResult run(const WeightTriple& t, const CompositeProblem& p, double gamma,
              long iters, const Matrix& z0, const Matrix& y0);

// Convenience overload starting from z0 = 0, y0 = 0.
RunResult run(const WeightTriple& t, const CompositeProblem& p, double gamma,
              long iters);

}  // namespace netprox
