#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "netprox/problem.hpp"

using namespace netprox;

namespace {

CompositeProblem identity_problem(int m, int d) {
  std::vector<QuadraticCost> costs(m);
  for (auto& c : costs) {
    c.Q = Matrix::Identity(d, d);
    c.b = Vector::Zero(d);
  }
  return CompositeProblem(std::move(costs), NonsmoothTerm::zero());
}

}  // namespace

TEST_SUITE("problem") {

TEST_CASE("gradient stack") {
  SUBCASE("identity quadratic maps x to itself") {
    const CompositeProblem p = identity_problem(3, 2);
    Matrix x(3, 2);
    x << 1, 2, 3, 4, 5, 6;
    CHECK((gradient_stack(p, x) - x).norm() == 0.0);
  }
  SUBCASE("scaled quadratic with offset") {
    std::vector<QuadraticCost> costs(1);
    costs[0].Q = 2.0 * Matrix::Identity(2, 2);
    costs[0].b = Vector(2);
    costs[0].b << 2, 0;
    const CompositeProblem p(std::move(costs), NonsmoothTerm::zero());
    Matrix x(1, 2);
    x << 1, 1;
    const Matrix g = gradient_stack(p, x);
    CHECK(g(0, 0) == 0.0);
    CHECK(g(0, 1) == 2.0);
  }
  SUBCASE("wrong column count is rejected") {
    const CompositeProblem p = identity_problem(2, 3);
    CHECK_THROWS_AS(gradient_stack(p, Matrix::Zero(2, 2)),
                    std::invalid_argument);
  }
  SUBCASE("gradient of a quadratic is affine in the iterate") {
    RandomProblemOptions opts;
    opts.mu = 0.5;
    opts.L = 7.0;
    opts.seed = 11;
    const CompositeProblem p = make_random_problem(4, 3, opts);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 20; ++trial) {
      Matrix x(4, 3), y(4, 3);
      for (int i = 0; i < 4; ++i)
        for (int c = 0; c < 3; ++c) {
          x(i, c) = gauss(rng);
          y(i, c) = gauss(rng);
        }
      const double a = gauss(rng), b = gauss(rng);
      const Matrix lhs = gradient_stack(p, a * x + b * y);
      const Matrix rhs = a * gradient_stack(p, x) + b * gradient_stack(p, y) -
                         (a + b - 1.0) * gradient_stack(p, Matrix::Zero(4, 3));
      CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }
}

TEST_CASE("rowwise prox") {
  SUBCASE("zero term is the identity") {
    const CompositeProblem p = identity_problem(2, 3);
    Matrix z(2, 3);
    z << 1, -2, 3, -4, 5, -6;
    CHECK((prox_rowwise(p, 0.7, z) - z).norm() == 0.0);
    CHECK_THROWS_AS(prox_rowwise(p, 0.0, z), std::invalid_argument);
  }
  SUBCASE("soft threshold at unit level") {
    std::vector<QuadraticCost> costs(1);
    costs[0].Q = Matrix::Identity(3, 3);
    costs[0].b = Vector::Zero(3);
    const CompositeProblem p(std::move(costs), NonsmoothTerm::l1(1.0));
    Matrix z(1, 3);
    z << 3, -0.5, 0;
    const Matrix out = prox_rowwise(p, 1.0, z);
    CHECK(out(0, 0) == 2.0);
    CHECK(out(0, 1) == 0.0);
    CHECK(out(0, 2) == 0.0);
  }
  SUBCASE("box clamp") {
    std::vector<QuadraticCost> costs(1);
    costs[0].Q = Matrix::Identity(2, 2);
    costs[0].b = Vector::Zero(2);
    Vector lo = Vector::Zero(2), hi = Vector::Ones(2);
    const CompositeProblem p(std::move(costs), NonsmoothTerm::box(lo, hi));
    Matrix z(1, 2);
    z << -2, 0.5;
    const Matrix out = prox_rowwise(p, 0.3, z);
    CHECK(out(0, 0) == 0.0);
    CHECK(out(0, 1) == 0.5);
  }
  SUBCASE("prox is firmly nonexpansive") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> gauss(0.0, 2.0);
    const auto kinds = {NonsmoothTerm::zero(), NonsmoothTerm::l1(0.8),
                        NonsmoothTerm::box(-Vector::Ones(4), Vector::Ones(4))};
    for (const auto& g : kinds) {
      for (int trial = 0; trial < 50; ++trial) {
        Vector u(4), v(4);
        for (int c = 0; c < 4; ++c) {
          u(c) = gauss(rng);
          v(c) = gauss(rng);
        }
        const Vector pu = g.prox(0.9, u), pv = g.prox(0.9, v);
        const double lhs = (pu - pv).squaredNorm();
        const double rhs = (pu - pv).dot(u - v);
        CHECK(lhs <= rhs + 1e-12);
      }
    }
  }
}

TEST_CASE("objective") {
  SUBCASE("single identity agent at the origin") {
    const CompositeProblem p = identity_problem(1, 1);
    CHECK(objective(p, Vector::Zero(1)) == 0.0);
  }
  SUBCASE("two agents average their costs") {
    std::vector<QuadraticCost> costs(2);
    costs[0].Q = Matrix::Identity(1, 1);
    costs[0].b = Vector::Constant(1, 2.0);
    costs[1].Q = Matrix::Identity(1, 1);
    costs[1].b = Vector::Zero(1);
    const CompositeProblem p(std::move(costs), NonsmoothTerm::zero());
    CHECK(objective(p, Vector::Constant(1, 1.0)) == doctest::Approx(-0.5));
  }
  SUBCASE("outside a box the value is infinite") {
    std::vector<QuadraticCost> costs(1);
    costs[0].Q = Matrix::Identity(1, 1);
    costs[0].b = Vector::Zero(1);
    const CompositeProblem p(
        std::move(costs),
        NonsmoothTerm::box(Vector::Zero(1), Vector::Ones(1)));
    CHECK(std::isinf(objective(p, Vector::Constant(1, 2.0))));
  }
}

TEST_CASE("reference solution") {
  SUBCASE("single agent closed form") {
    std::vector<QuadraticCost> costs(1);
    costs[0].Q = Matrix::Identity(1, 1);
    costs[0].b = Vector::Constant(1, 1.0);
    const CompositeProblem p(std::move(costs), NonsmoothTerm::zero());
    CHECK(reference_solution(p, 1e-12)(0) == doctest::Approx(1.0).epsilon(1e-10));
  }
  SUBCASE("two agents average the targets") {
    std::vector<QuadraticCost> costs(2);
    costs[0].Q = Matrix::Identity(1, 1);
    costs[0].b = Vector::Constant(1, 2.0);
    costs[1].Q = Matrix::Identity(1, 1);
    costs[1].b = Vector::Zero(1);
    const CompositeProblem p(std::move(costs), NonsmoothTerm::zero());
    CHECK(reference_solution(p, 1e-12)(0) == doctest::Approx(1.0).epsilon(1e-10));
  }
  SUBCASE("l1 at the threshold boundary lands on zero") {
    std::vector<QuadraticCost> costs(1);
    costs[0].Q = Matrix::Identity(1, 1);
    costs[0].b = Vector::Constant(1, 1.0);
    const CompositeProblem p(std::move(costs), NonsmoothTerm::l1(1.0));
    CHECK(std::abs(reference_solution(p, 1e-12)(0)) <= 1e-10);
  }
  SUBCASE("returned point is a fixed point of the prox-gradient map") {
    RandomProblemOptions opts;
    opts.mu = 1.0;
    opts.L = 10.0;
    opts.seed = 21;
    const CompositeProblem p =
        make_random_problem(5, 4, opts, NonsmoothTerm::l1(0.1));
    const double tol = 1e-9;
    const Vector x = reference_solution(p, tol);
    const double gamma = 2.0 / (p.L + p.mu);
    const Vector mapped = p.nonsmooth.prox(
        gamma, x - gamma * (p.mean_hessian() * x - p.mean_offset()));
    CHECK((x - mapped).norm() <= 2.0 * tol);
  }
}

TEST_CASE("random instances hit the requested curvature exactly") {
  RandomProblemOptions opts;
  opts.mu = 2.0;
  opts.L = 9.0;
  opts.seed = 77;
  const CompositeProblem p = make_random_problem(6, 4, opts);
  CHECK(p.mu == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(p.L == doctest::Approx(9.0).epsilon(1e-9));
  for (const auto& c : p.costs) {
    CHECK(c.strong_convexity() == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(c.smoothness() == doctest::Approx(9.0).epsilon(1e-9));
  }
  const CompositeProblem again = make_random_problem(6, 4, opts);
  for (int i = 0; i < 6; ++i) {
    CHECK((p.costs[i].Q - again.costs[i].Q).norm() == 0.0);
    CHECK((p.costs[i].b - again.costs[i].b).norm() == 0.0);
  }

  SUBCASE("shared basis pins the averaged curvature too") {
    opts.shared_basis = true;
    const CompositeProblem shared = make_random_problem(6, 4, opts);
    const Vector mean_eigs = sym_eig(shared.mean_hessian()).values;
    CHECK(mean_eigs.minCoeff() == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(mean_eigs.maxCoeff() == doctest::Approx(9.0).epsilon(1e-9));
  }
}

TEST_CASE("json round trip is bit exact for explicit arrays") {
  RandomProblemOptions opts;
  opts.mu = 1.0;
  opts.L = 4.0;
  opts.seed = 3;
  const CompositeProblem p =
      make_random_problem(3, 2, opts, NonsmoothTerm::l1(0.25));
  const nlohmann::json j = problem_to_json(p);
  const std::string text = j.dump();
  const CompositeProblem back = problem_from_json(nlohmann::json::parse(text));
  REQUIRE(back.agent_count() == p.agent_count());
  for (int i = 0; i < p.agent_count(); ++i) {
    CHECK((back.costs[i].Q - p.costs[i].Q).norm() == 0.0);
    CHECK((back.costs[i].b - p.costs[i].b).norm() == 0.0);
  }
  CHECK(back.nonsmooth.kind() == p.nonsmooth.kind());
  CHECK(back.nonsmooth.weight() == p.nonsmooth.weight());

  SUBCASE("generator form reproduces the instance from the seed") {
    nlohmann::json gen = {{"m", 3}, {"d", 2}, {"mu", 1.0}, {"L", 4.0},
                          {"seed", 3}};
    const CompositeProblem from_seed = problem_from_json(gen);
    CHECK((from_seed.costs[0].Q - p.costs[0].Q).norm() == 0.0);
  }
}

}  // TEST_SUITE
