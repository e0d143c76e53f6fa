#include "netprox/problem.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace netprox {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool near_bound(double x, double bound) {
  return std::abs(x - bound) <= 1e-12 * (1.0 + std::abs(bound));
}

}  // namespace

double QuadraticCost::strong_convexity() const {
  return sym_eig(Q).values.minCoeff();
}

double QuadraticCost::smoothness() const {
  return sym_eig(Q).values.maxCoeff();
}

NonsmoothTerm NonsmoothTerm::zero() { return NonsmoothTerm{}; }

NonsmoothTerm NonsmoothTerm::l1(double weight) {
  if (weight < 0.0) throw std::invalid_argument("l1 weight must be >= 0");
  NonsmoothTerm g;
  g.kind_ = Kind::l1;
  g.weight_ = weight;
  return g;
}

NonsmoothTerm NonsmoothTerm::box(Vector lower, Vector upper) {
  if (lower.size() != upper.size()) {
    throw std::invalid_argument("box bounds length mismatch");
  }
  if ((upper - lower).minCoeff() < 0.0) {
    throw std::invalid_argument("box requires lower <= upper");
  }
  NonsmoothTerm g;
  g.kind_ = Kind::box;
  g.lower_ = std::move(lower);
  g.upper_ = std::move(upper);
  return g;
}

double NonsmoothTerm::value(const Vector& x) const {
  switch (kind_) {
    case Kind::zero:
      return 0.0;
    case Kind::l1:
      return weight_ * x.cwiseAbs().sum();
    case Kind::box:
      for (Eigen::Index c = 0; c < x.size(); ++c) {
        if (x(c) < lower_(c) - 1e-12 * (1.0 + std::abs(lower_(c))) ||
            x(c) > upper_(c) + 1e-12 * (1.0 + std::abs(upper_(c)))) {
          return kInf;
        }
      }
      return 0.0;
  }
  return 0.0;
}

Vector NonsmoothTerm::prox(double gamma, const Vector& v) const {
  if (gamma <= 0.0) throw std::invalid_argument("prox needs gamma > 0");
  switch (kind_) {
    case Kind::zero:
      return v;
    case Kind::l1: {
      const double t = gamma * weight_;
      return v.unaryExpr([t](double a) {
        const double mag = std::abs(a) - t;
        return mag > 0.0 ? (a > 0.0 ? mag : -mag) : 0.0;
      });
    }
    case Kind::box:
      return v.cwiseMax(lower_).cwiseMin(upper_);
  }
  return v;
}

bool NonsmoothTerm::subgradient_interval(const Vector& x, Vector& lo,
                                         Vector& hi) const {
  const Eigen::Index n = x.size();
  lo = Vector::Zero(n);
  hi = Vector::Zero(n);
  switch (kind_) {
    case Kind::zero:
      return true;
    case Kind::l1:
      for (Eigen::Index c = 0; c < n; ++c) {
        if (x(c) == 0.0) {
          lo(c) = -weight_;
          hi(c) = weight_;
        } else {
          lo(c) = hi(c) = x(c) > 0.0 ? weight_ : -weight_;
        }
      }
      return true;
    case Kind::box:
      for (Eigen::Index c = 0; c < n; ++c) {
        const bool at_lo = near_bound(x(c), lower_(c));
        const bool at_hi = near_bound(x(c), upper_(c));
        if (!at_lo && !at_hi &&
            (x(c) < lower_(c) || x(c) > upper_(c))) {
          return false;  // outside the domain, empty subdifferential
        }
        lo(c) = at_lo ? -kInf : 0.0;
        hi(c) = at_hi ? kInf : 0.0;
      }
      return true;
  }
  return true;
}

CompositeProblem::CompositeProblem(std::vector<QuadraticCost> c,
                                   NonsmoothTerm g)
    : costs(std::move(c)), nonsmooth(std::move(g)) {
  if (costs.empty()) throw std::invalid_argument("problem needs agents");
  d = static_cast<int>(costs[0].Q.rows());
  mu = kInf;
  L = -kInf;
  for (auto& cost : costs) {
    if (cost.Q.rows() != d || cost.Q.cols() != d || cost.b.size() != d) {
      throw std::invalid_argument("cost dimension mismatch");
    }
    if (!is_symmetric(cost.Q, 1e-9)) {
      throw std::invalid_argument("cost matrix not symmetric");
    }
    cost.Q = 0.5 * (cost.Q + cost.Q.transpose());
    mu = std::min(mu, cost.strong_convexity());
    L = std::max(L, cost.smoothness());
  }
  if (mu <= 0.0) {
    throw std::invalid_argument("costs must be strongly convex (mu > 0)");
  }
  if (nonsmooth.kind() == NonsmoothTerm::Kind::box &&
      nonsmooth.lower().size() != d) {
    throw std::invalid_argument("box bounds dimension mismatch");
  }
}

Matrix CompositeProblem::mean_hessian() const {
  Matrix q = Matrix::Zero(d, d);
  for (const auto& c : costs) q += c.Q;
  return q / static_cast<double>(costs.size());
}

Vector CompositeProblem::mean_offset() const {
  Vector b = Vector::Zero(d);
  for (const auto& c : costs) b += c.b;
  return b / static_cast<double>(costs.size());
}

CompositeProblem make_random_problem(int m, int d,
                                     const RandomProblemOptions& opts,
                                     NonsmoothTerm g) {
  if (m < 1 || d < 1) throw std::invalid_argument("need m >= 1 and d >= 1");
  if (opts.mu <= 0.0 || opts.L < opts.mu) {
    throw std::invalid_argument("need 0 < mu <= L");
  }
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(opts.mu, opts.L);
  const double span = opts.L - opts.mu;

  std::vector<QuadraticCost> costs(m);
  if (d == 1) {
    if (m == 1 && span > 0.0) {
      throw std::invalid_argument(
          "d = 1 with a single agent cannot attain distinct mu and L");
    }
    for (int i = 0; i < m; ++i) {
      double q = i == 0 ? opts.mu : (i == m - 1 ? opts.L : unif(rng));
      costs[i].Q = Matrix::Constant(1, 1, q);
    }
  } else if (opts.shared_basis) {
    Matrix raw(d, d);
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) raw(r, c) = gauss(rng);
    const Matrix basis = Eigen::HouseholderQR<Matrix>(raw).householderQ();
    for (int i = 0; i < m; ++i) {
      Vector eigs(d);
      eigs(0) = opts.mu;
      eigs(d - 1) = opts.L;
      for (int c = 1; c + 1 < d; ++c) eigs(c) = unif(rng);
      Matrix q = basis * eigs.asDiagonal() * basis.transpose();
      costs[i].Q = 0.5 * (q + q.transpose());
    }
  } else {
    for (int i = 0; i < m; ++i) {
      Matrix q;
      for (;;) {
        Matrix raw(d, d);
        for (int r = 0; r < d; ++r)
          for (int c = 0; c < d; ++c) raw(r, c) = gauss(rng);
        const Matrix gram = raw.transpose() * raw;
        const Vector eigs = sym_eig(gram).values;
        const double lo = eigs.minCoeff(), hi = eigs.maxCoeff();
        if (hi - lo <= 1e-10 * (1.0 + hi)) continue;  // degenerate draw
        if (span == 0.0) {
          q = opts.mu * Matrix::Identity(d, d);
        } else {
          q = opts.mu * Matrix::Identity(d, d) +
              (span / (hi - lo)) * (gram - lo * Matrix::Identity(d, d));
        }
        break;
      }
      costs[i].Q = 0.5 * (q + q.transpose());
    }
  }
  for (int i = 0; i < m; ++i) {
    costs[i].b = Vector::Zero(d);
    for (int c = 0; c < d; ++c) costs[i].b(c) = gauss(rng);
  }
  return CompositeProblem(std::move(costs), std::move(g));
}

Matrix gradient_stack(const CompositeProblem& p, const Matrix& x) {
  const int m = p.agent_count();
  if (x.rows() != m || x.cols() != p.d) {
    throw std::invalid_argument("iterate shape mismatch: expected " +
                                std::to_string(m) + "x" + std::to_string(p.d));
  }
  Matrix g(m, p.d);
  for (int i = 0; i < m; ++i) {
    g.row(i) = (p.costs[i].Q * x.row(i).transpose() - p.costs[i].b).transpose();
  }
  return g;
}

Matrix prox_rowwise(const CompositeProblem& p, double gamma, const Matrix& z) {
  if (gamma <= 0.0) throw std::invalid_argument("prox needs gamma > 0");
  if (z.cols() != p.d) throw std::invalid_argument("iterate shape mismatch");
  Matrix out(z.rows(), z.cols());
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    out.row(i) = p.nonsmooth.prox(gamma, z.row(i).transpose()).transpose();
  }
  return out;
}

double objective(const CompositeProblem& p, const Vector& x) {
  double smooth = 0.0;
  for (const auto& c : p.costs) smooth += c.value(x);
  return smooth / static_cast<double>(p.agent_count()) + p.nonsmooth.value(x);
}

Vector reference_solution(const CompositeProblem& p, double tol) {
  if (tol <= 0.0) throw std::invalid_argument("tol must be positive");
  const double gamma = 2.0 / (p.L + p.mu);
  const Matrix q_mean = p.mean_hessian();
  const Vector b_mean = p.mean_offset();
  Vector x = Vector::Zero(p.d);
  constexpr long kMaxIters = 1000000;
  for (long k = 0; k < kMaxIters; ++k) {
    Vector next = p.nonsmooth.prox(gamma, x - gamma * (q_mean * x - b_mean));
    const double move = (next - x).norm();
    x = std::move(next);
    if (move <= tol * gamma) {
      if (p.nonsmooth.kind() == NonsmoothTerm::Kind::zero) {
        const Vector closed =
            p.mean_hessian().ldlt().solve(b_mean);
        if ((x - closed).norm() > 10.0 * tol) {
          throw std::runtime_error(
              "reference solution disagrees with closed-form solve");
        }
      }
      return x;
    }
  }
  throw std::runtime_error("reference solution: iteration cap exceeded");
}

nlohmann::json problem_to_json(const CompositeProblem& p) {
  nlohmann::json j;
  j["m"] = p.agent_count();
  j["d"] = p.d;
  nlohmann::json costs = nlohmann::json::array();
  for (const auto& c : p.costs) {
    nlohmann::json q_rows = nlohmann::json::array();
    for (int r = 0; r < p.d; ++r) {
      std::vector<double> row(c.Q.row(r).begin(), c.Q.row(r).end());
      q_rows.push_back(row);
    }
    std::vector<double> b(c.b.begin(), c.b.end());
    costs.push_back({{"Q", q_rows}, {"b", b}});
  }
  j["costs"] = costs;
  nlohmann::json g;
  switch (p.nonsmooth.kind()) {
    case NonsmoothTerm::Kind::zero:
      g["kind"] = "zero";
      break;
    case NonsmoothTerm::Kind::l1:
      g["kind"] = "l1";
      g["weight"] = p.nonsmooth.weight();
      break;
    case NonsmoothTerm::Kind::box:
      g["kind"] = "box";
      g["lower"] = std::vector<double>(p.nonsmooth.lower().begin(),
                                       p.nonsmooth.lower().end());
      g["upper"] = std::vector<double>(p.nonsmooth.upper().begin(),
                                       p.nonsmooth.upper().end());
      break;
  }
  j["nonsmooth"] = g;
  return j;
}

namespace {

NonsmoothTerm nonsmooth_from_json(const nlohmann::json& j) {
  if (j.is_null()) return NonsmoothTerm::zero();
  const std::string kind = j.value("kind", "zero");
  if (kind == "zero") return NonsmoothTerm::zero();
  if (kind == "l1") return NonsmoothTerm::l1(j.at("weight").get<double>());
  if (kind == "box") {
    const auto lo = j.at("lower").get<std::vector<double>>();
    const auto hi = j.at("upper").get<std::vector<double>>();
    return NonsmoothTerm::box(
        Eigen::Map<const Vector>(lo.data(), static_cast<Eigen::Index>(lo.size())),
        Eigen::Map<const Vector>(hi.data(), static_cast<Eigen::Index>(hi.size())));
  }
  throw std::invalid_argument("unknown nonsmooth kind: " + kind);
}

}  // namespace

CompositeProblem problem_from_json(const nlohmann::json& j) {
  NonsmoothTerm g = nonsmooth_from_json(
      j.contains("nonsmooth") ? j.at("nonsmooth") : nlohmann::json());
  if (j.contains("costs")) {
    const int d = j.at("d").get<int>();
    std::vector<QuadraticCost> costs;
    for (const auto& cj : j.at("costs")) {
      QuadraticCost c;
      c.Q = Matrix(d, d);
      const auto& rows = cj.at("Q");
      for (int r = 0; r < d; ++r) {
        for (int col = 0; col < d; ++col) {
          c.Q(r, col) = rows.at(r).at(col).get<double>();
        }
      }
      const auto b = cj.at("b").get<std::vector<double>>();
      c.b = Eigen::Map<const Vector>(b.data(), static_cast<Eigen::Index>(b.size()));
      costs.push_back(std::move(c));
    }
    if (j.contains("m") &&
        j.at("m").get<int>() != static_cast<int>(costs.size())) {
      throw std::invalid_argument("m does not match the cost list");
    }
    return CompositeProblem(std::move(costs), std::move(g));
  }
  RandomProblemOptions opts;
  opts.mu = j.at("mu").get<double>();
  opts.L = j.at("L").get<double>();
  opts.seed = j.value("seed", std::uint64_t{0});
  opts.shared_basis = j.value("shared_basis", false);
  return make_random_problem(j.at("m").get<int>(), j.at("d").get<int>(), opts,
                             std::move(g));
}

}  // namespace netprox
