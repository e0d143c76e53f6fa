#pragma once

#include <optional>
#include <vector>

#include "netprox/linalg.hpp"
#include "netprox/problem.hpp"

namespace netprox {

struct WeightTriple;  // algorithm.hpp

// Spectral pieces of a consensus matrix C, precomputed once so residuals can
// be evaluated per iteration cheaply.
struct ConsensusOps {
  Matrix c;
  Matrix sqrt_c;
  Matrix pinv_sqrt_c;
  double lambda2 = 0.0;  // second-smallest eigenvalue of C

  explicit ConsensusOps(const Matrix& c_matrix);
};

struct KktResidual {
  double primal = 0.0;  // ||sqrt(C) x||
  double dual = 0.0;    // distance of -(grad f + sqrt(C) y) to the subdifferential
  Matrix y_used;
  bool y_projected = false;  // the supplied y was projected onto span(C)
  bool domain_violation = false;  // some row left the domain of g
};

// Stationarity certificate residuals. When y is omitted it is recovered by
// least squares restricted to span(sqrt(C)), with the subgradient selection
// chosen coordinatewise to minimize the aggregate defect.
KktResidual kkt_residual(const CompositeProblem& p, const ConsensusOps& ops,
                         const Matrix& x,
                         const std::optional<Matrix>& y = {});
KktResidual kkt_residual(const CompositeProblem& p, const Matrix& c_matrix,
                         const Matrix& x,
                         const std::optional<Matrix>& y = {});

struct FixResidual {
  double consensus = 0.0;  // ||C x||
  double aggregate = 0.0;  // stationarity defect of the summed iterate map
  bool domain_violation = false;
};

// Distance of x from the fixed-point set of the iterate with this triple and
// step size; the minimizing subgradient selection is closed-form.
FixResidual fix_residual(const WeightTriple& t, const CompositeProblem& p,
                         double gamma, const Matrix& x);

struct RateFit {
  double lambda = 0.0;  // exp(slope)
  double slope = 0.0;   // least-squares slope of log(err) per iteration
  double lambda_lo = 0.0, lambda_hi = 0.0;  // slope +- 2 standard errors
  bool contractive = false;
  bool floored = false;  // trajectory hit the numerical floor; window truncated
  int window_begin = 0, window_end = 0;
  int points = 0;
};

// Fits the decay factor of an error trajectory over its tail (last half of the
// iterations), ignoring values at or below the 1e-24 numerical floor.
RateFit empirical_rate(const std::vector<double>& err);

}  // namespace netprox
