#pragma once

// Shared fixtures and independent oracles for the test suites. The standalone
// recursions below are coded directly from each method's own defining update
// and serve as references for the unified iterate; they must not reuse the
// production step.

#include <utility>
#include <vector>

#include "netprox/algorithm.hpp"
#include "netprox/graph.hpp"
#include "netprox/problem.hpp"

namespace netprox::testing {

inline GossipMatrix ring_metropolis(int m) {
  return GossipMatrix::metropolis(Graph::ring(m));
}

inline GossipMatrix ring_lazy(int m) { return lazy(ring_metropolis(m)); }

inline GossipMatrix path3_metropolis() {
  return GossipMatrix::metropolis(Graph::path(3));
}

inline CompositeProblem quad_problem(int m, int d, double mu, double L,
                                     std::uint64_t seed,
                                     NonsmoothTerm g = NonsmoothTerm::zero()) {
  RandomProblemOptions opts;
  opts.mu = mu;
  opts.L = L;
  opts.seed = seed;
  return make_random_problem(m, d, opts, std::move(g));
}

// x^{t+1} = W x^t - gamma grad f(x^t) for the first step, then the two-step
// correction x^{t+2} = (I+W) x^{t+1} - (I+W)/2 x^t - gamma (grad^{t+1} - grad^t).
inline std::vector<Matrix> extra_recursion(const Matrix& W,
                                           const CompositeProblem& p,
                                           double gamma, const Matrix& x0,
                                           int iters) {
  const Matrix I = Matrix::Identity(W.rows(), W.cols());
  const Matrix w_bar = 0.5 * (I + W);
  std::vector<Matrix> xs{x0};
  xs.push_back(W * x0 - gamma * gradient_stack(p, x0));
  while (static_cast<int>(xs.size()) <= iters) {
    const Matrix& cur = xs[xs.size() - 1];
    const Matrix& prev = xs[xs.size() - 2];
    xs.push_back((I + W) * cur - w_bar * prev -
                 gamma * (gradient_stack(p, cur) - gradient_stack(p, prev)));
  }
  return xs;
}

// x^1 = x^0 - gamma grad f(x^0), then
// x^{t+2} = (I+W)/2 (2 x^{t+1} - x^t - gamma (grad^{t+1} - grad^t)).
inline std::vector<Matrix> nids_recursion(const Matrix& W,
                                          const CompositeProblem& p,
                                          double gamma, const Matrix& x0,
                                          int iters) {
  const Matrix I = Matrix::Identity(W.rows(), W.cols());
  const Matrix w_bar = 0.5 * (I + W);
  std::vector<Matrix> xs{x0};
  xs.push_back(x0 - gamma * gradient_stack(p, x0));
  while (static_cast<int>(xs.size()) <= iters) {
    const Matrix& cur = xs[xs.size() - 1];
    const Matrix& prev = xs[xs.size() - 2];
    xs.push_back(w_bar *
                 (2.0 * cur - prev -
                  gamma * (gradient_stack(p, cur) - gradient_stack(p, prev))));
  }
  return xs;
}

// Gradient tracking: x^{t+1} = W x^t - gamma v^t,
// v^{t+1} = W v^t + grad^{t+1} - grad^t, v^0 = grad^0.
inline std::vector<Matrix> diging_recursion(const Matrix& W,
                                            const CompositeProblem& p,
                                            double gamma, const Matrix& x0,
                                            int iters) {
  std::vector<Matrix> xs{x0};
  Matrix v = gradient_stack(p, x0);
  Matrix grad_prev = v;
  for (int t = 0; t < iters; ++t) {
    Matrix next = W * xs.back() - gamma * v;
    Matrix grad_next = gradient_stack(p, next);
    v = W * v + grad_next - grad_prev;
    grad_prev = std::move(grad_next);
    xs.push_back(std::move(next));
  }
  return xs;
}

// Dual starts that make the unified iterate reproduce the recursions above
// iterate-for-iterate from z^0 = x^0.
inline Matrix extra_matched_y0(const WeightTriple& t, const Matrix& x0) {
  return t.C * x0;
}

inline Matrix nids_matched_y0(const WeightTriple& t, const CompositeProblem& p,
                              double gamma, const Matrix& x0) {
  return -t.C * (x0 - gamma * gradient_stack(p, x0));
}

inline Matrix diging_matched_y0(const GossipMatrix& w, const Matrix& x0) {
  const Matrix& W = w.entries();
  return (W * W - W) * x0;
}

// x-sequence of the unified iterate.
inline std::vector<Matrix> unified_sequence(const WeightTriple& t,
                                            const CompositeProblem& p,
                                            double gamma, const Matrix& z0,
                                            const Matrix& y0, int iters) {
  std::vector<Matrix> xs;
  AlgorithmState s = make_state(t, p, gamma, z0, y0);
  xs.push_back(s.x);
  for (int k = 0; k < iters; ++k) {
    s = step(t, p, gamma, s);
    xs.push_back(s.x);
  }
  return xs;
}

// Exact fixed point of the iterate at the optimum: consensual z with the
// optimal subgradient folded in, and the matching dual.
inline std::pair<Matrix, Matrix> optimal_fixed_point(const WeightTriple& t,
                                                     const CompositeProblem& p,
                                                     double gamma) {
  const Vector x_bar = reference_solution(p, 1e-12);
  const Vector grad_f =
      p.mean_hessian() * x_bar - p.mean_offset();  // gradient of F
  const Vector s = -grad_f;
  const int m = t.size();
  const Matrix x_stack = Vector::Ones(m) * x_bar.transpose();
  const Matrix z0 = Vector::Ones(m) * (x_bar + gamma * s).transpose();
  const Matrix y0 =
      t.A * x_stack - gamma * (t.B * gradient_stack(p, x_stack)) - z0;
  return {z0, y0};
}

inline double max_sequence_gap(const std::vector<Matrix>& a,
                               const std::vector<Matrix>& b, int count) {
  double gap = 0.0;
  for (int k = 0; k < count; ++k) {
    gap = std::max(gap, (a[static_cast<std::size_t>(k)] -
                         b[static_cast<std::size_t>(k)])
                            .cwiseAbs()
                            .maxCoeff());
  }
  return gap;
}

}  // namespace netprox::testing
