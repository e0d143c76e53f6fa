#include "netprox/baseline.hpp"

#include <cmath>

#include "netprox/algorithm.hpp"
#include "netprox/tradeoff.hpp"

namespace netprox {

CentralizedRun prox_grad_run(const CompositeProblem& p, double gamma,
                             long iters, const Vector& x0) {
  if (gamma <= 0.0) throw std::invalid_argument("needs gamma > 0");
  if (iters < 0) throw std::invalid_argument("iters must be >= 0");
  if (x0.size() != p.d) throw std::invalid_argument("x0 dimension mismatch");
  const Matrix q_mean = p.mean_hessian();
  const Vector b_mean = p.mean_offset();

  CentralizedRun run;
  run.gamma = gamma;
  run.rho_opt_target = rho_opt(p.kappa());
  run.trajectory.reserve(static_cast<std::size_t>(iters) + 1);
  Vector x = x0;
  run.trajectory.push_back(x);
  for (long k = 0; k < iters; ++k) {
    x = p.nonsmooth.prox(gamma, x - gamma * (q_mean * x - b_mean));
    const double peak = x.cwiseAbs().maxCoeff();
    if (!std::isfinite(peak) || peak > 1e12) {
      throw DivergenceError("divergence in centralized run at iteration " +
                                std::to_string(k + 1),
                            k + 1);
    }
    run.trajectory.push_back(x);
  }
  return run;
}

std::vector<double> CentralizedRun::error_sq(const Vector& x_star) const {
  std::vector<double> out;
  out.reserve(trajectory.size());
  for (const auto& x : trajectory) out.push_back((x - x_star).squaredNorm());
  return out;
}

}  // namespace netprox
