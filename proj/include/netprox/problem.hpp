#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "netprox/linalg.hpp"

namespace netprox {

// Smooth local cost f_i(x) = x'Q x / 2 - b'x with Q symmetric positive
// definite, so the strong convexity and smoothness constants are exact.
struct QuadraticCost {
  Matrix Q;
  Vector b;

  double strong_convexity() const;  // lambda_min(Q)
  double smoothness() const;        // lambda_max(Q)
  Vector gradient(const Vector& x) const { return Q * x - b; }
  double value(const Vector& x) const { return 0.5 * x.dot(Q * x) - b.dot(x); }
};

// Shared nonsmooth convex term with a closed-form proximal map.
class NonsmoothTerm {
 public:
  enum class Kind { zero, l1, box };

  static NonsmoothTerm zero();
  static NonsmoothTerm l1(double weight);
  static NonsmoothTerm box(Vector lower, Vector upper);

  Kind kind() const { return kind_; }
  double weight() const { return weight_; }
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }

  double value(const Vector& x) const;  // +inf outside a box
  Vector prox(double gamma, const Vector& v) const;
  // Coordinatewise subdifferential interval [lo, hi] at x; +-inf at active box
  // bounds. Returns false when x is outside the domain (empty subdifferential).
  bool subgradient_interval(const Vector& x, Vector& lo, Vector& hi) const;

 private:
  Kind kind_ = Kind::zero;
  double weight_ = 0.0;
  Vector lower_, upper_;
};

struct CompositeProblem {
  std::vector<QuadraticCost> costs;
  NonsmoothTerm nonsmooth;
  int d = 0;
  double mu = 0.0;  // min_i lambda_min(Q_i)
  double L = 0.0;   // max_i lambda_max(Q_i)

  CompositeProblem(std::vector<QuadraticCost> costs, NonsmoothTerm g);

  int agent_count() const { return static_cast<int>(costs.size()); }
  double kappa() const { return L / mu; }
  // F(x) = (1/m) sum_i f_i(x); averaged Hessian and offset.
  Matrix mean_hessian() const;
  Vector mean_offset() const;
};

struct RandomProblemOptions {
  double mu = 1.0;
  double L = 10.0;
  std::uint64_t seed = 0;
  // When set, all agents share one eigenbasis with the extreme eigenvalues
  // pinned at mu and L in fixed coordinates, so the averaged Hessian attains
  // (mu, L) exactly and centralized rate targets are tight.
  bool shared_basis = false;
};

// Every agent's spectrum is affinely rescaled to [mu, L] exactly.
CompositeProblem make_random_problem(int m, int d,
                                     const RandomProblemOptions& opts,
                                     NonsmoothTerm g = NonsmoothTerm::zero());

// Row i of the result is grad f_i applied to row i of x.
Matrix gradient_stack(const CompositeProblem& p, const Matrix& x);

// prox of the separable sum g(X) = sum_i G(x_i): the prox of G per row.
Matrix prox_rowwise(const CompositeProblem& p, double gamma, const Matrix& z);

double objective(const CompositeProblem& p, const Vector& x);

// High-precision minimizer of F + G via centralized proximal gradient with
// gamma = 2/(L+mu); cross-checked against the closed-form solve when G = 0.
Vector reference_solution(const CompositeProblem& p, double tol);

nlohmann::json problem_to_json(const CompositeProblem& p);
CompositeProblem problem_from_json(const nlohmann::json& j);

}  // namespace netprox
