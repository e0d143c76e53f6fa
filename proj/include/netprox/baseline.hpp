#pragma once

#include <vector>

#include "netprox/linalg.hpp"
#include "netprox/problem.hpp"

namespace netprox {

// Centralized proximal-gradient trajectory on F + G; the comparison target
// for the distributed runs and the rate-matching experiments.
struct CentralizedRun {
  std::vector<Vector> trajectory;  // x^0 .. x^iters
  double gamma = 0.0;
  double rho_opt_target = 0.0;  // (kappa - 1)/(kappa + 1) of the problem

  std::vector<double> error_sq(const Vector& x_star) const;
};

CentralizedRun prox_grad_run(const CompositeProblem& p, double gamma,
                             long iters, const Vector& x0);

}  // namespace netprox
