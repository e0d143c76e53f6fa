#include "netprox/lifted.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace netprox {

namespace {

Matrix gaussian_matrix(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = gauss(rng);
  return m;
}

void project_lower_block(LiftedState& s) {
  s.lower() -= row_mean_replicated(s.lower());
}

}  // namespace

double BlockNorm::norm_sq(const Matrix& u2m) const {
  const Eigen::Index m = u2m.rows() / 2;
  const Matrix up = u2m.topRows(m);
  const Matrix low = u2m.bottomRows(m);
  return (upper_w * up).cwiseProduct(up).sum() +
         (lower_w * low).cwiseProduct(low).sum();
}

double BlockNorm::norm_sq(const LiftedState& s) const { return norm_sq(s.u); }

BlockNorm BlockNorm::lambda_c(const Matrix& c) {
  const Matrix I = Matrix::Identity(c.rows(), c.cols());
  return {I - c, I};
}

BlockNorm BlockNorm::v_c(const Matrix& c) {
  const Matrix I = Matrix::Identity(c.rows(), c.cols());
  return {I, I - c};
}

BlockNorm BlockNorm::q_f(double q, int m) {
  const Matrix I = Matrix::Identity(m, m);
  return {q * q * I, I};
}

BlockNorm BlockNorm::lambda_b(const Matrix& b) {
  const Matrix I = Matrix::Identity(b.rows(), b.cols());
  return {b * b, I};
}

LiftResult lift(const WeightTriple& t, const CompositeProblem& p, double gamma,
                const Matrix& x0) {
  const int m = t.size();
  if (x0.rows() != m || x0.cols() != p.d) {
    throw std::invalid_argument("lift: iterate shape mismatch");
  }
  LiftResult res;
  const Matrix z1 = t.D * x0 - gamma * gradient_stack(p, x0);
  res.u1.u.resize(2 * m, p.d);
  res.u1.upper() = z1;
  res.u1.lower() = t.sqrt_c * z1;
  res.recon_z = t.B;
  res.recon_y = t.B * t.sqrt_c;
  return res;
}

std::pair<Matrix, Matrix> LiftResult::reconstruct(const LiftedState& s) const {
  return {recon_z * s.upper(), recon_y * s.lower()};
}

LiftedState apply_mix_b(const WeightTriple& t, LiftedState s) {
  s.upper() = t.B * s.upper();
  return s;
}

LiftedState apply_prox(const CompositeProblem& p, double gamma,
                       LiftedState s) {
  s.upper() = prox_rowwise(p, gamma, s.upper());
  return s;
}

LiftedState apply_gradient(const WeightTriple& t, const CompositeProblem& p,
                           double gamma, LiftedState s) {
  s.upper() = t.D * s.upper() - gamma * gradient_stack(p, s.upper());
  return s;
}

LiftedState apply_consensus(const WeightTriple& t, LiftedState s) {
  const Matrix up = s.upper();
  const Matrix low = s.lower();
  s.upper() = up - t.sqrt_c * low;
  s.lower() = t.sqrt_c * up + low - t.C * low;
  return s;
}

LiftedState apply_T(const WeightTriple& t, const CompositeProblem& p,
                    double gamma, const LiftedState& s) {
  return apply_consensus(
      t, apply_gradient(t, p, gamma, apply_prox(p, gamma, apply_mix_b(t, s))));
}

IsometryReport verify_consensus_isometry(const WeightTriple& t, int trials,
                          std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int m = t.size();
  const int d = 3;
  const BlockNorm lam_c = BlockNorm::lambda_c(t.C);
  const BlockNorm v_c = BlockNorm::v_c(t.C);
  IsometryReport rep;
  rep.name = "consensus factor norm identity";
  rep.trials = trials;
  for (int trial = 0; trial < trials; ++trial) {
    LiftedState x{gaussian_matrix(2 * m, d, rng)};
    LiftedState y{gaussian_matrix(2 * m, d, rng)};
    const double lhs =
        lam_c.norm_sq(apply_consensus(t, x).u - apply_consensus(t, y).u);
    const double rhs = v_c.norm_sq(x.u - y.u);
    const double violation = std::abs(lhs - rhs) / (1.0 + rhs);
    rep.max_violation = std::max(rep.max_violation, violation);
  }
  rep.bound = 1e-9;
  rep.pass = rep.max_violation <= rep.bound;
  return rep;
}

ContractionReport verify_gradient_contraction(const WeightTriple& t,
                                const CompositeProblem& p, double gamma,
                                int trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int m = t.size();
  const RatePrediction rate = rate_prediction(t, p.mu, p.L, gamma);
  ContractionReport rep;
  rep.name = "gradient factor contraction";
  rep.trials = trials;
  rep.bound = rate.q * rate.q;
  rep.contractive = rep.bound < 1.0;
  for (int trial = 0; trial < trials; ++trial) {
    LiftedState x{gaussian_matrix(2 * m, p.d, rng)};
    LiftedState y{gaussian_matrix(2 * m, p.d, rng)};
    const LiftedState tx = apply_gradient(t, p, gamma, x);
    const LiftedState ty = apply_gradient(t, p, gamma, y);
    const double denom = (x.upper() - y.upper()).squaredNorm();
    if (denom == 0.0) continue;
    const double ratio = (tx.upper() - ty.upper()).squaredNorm() / denom;
    rep.max_ratio = std::max(rep.max_ratio, ratio);
  }

  rep.aligned_ratio = std::numeric_limits<double>::quiet_NaN();
  const double d_mean = t.D.trace() / m;
  const Matrix scalar_gap = t.D - d_mean * Matrix::Identity(m, m);
  if (scalar_gap.norm() <= 1e-9 * (1.0 + std::abs(d_mean))) {
    // D = c I: a difference supported on one agent along an extreme
    // eigenvector of its curvature attains the bound exactly.
    double best = -1.0;
    for (double target : {p.mu, p.L}) {
      for (int i = 0; i < m; ++i) {
        const SymEig eig = sym_eig(p.costs[i].Q);
        for (int c = 0; c < p.d; ++c) {
          if (std::abs(eig.values(c) - target) > 1e-9 * (1.0 + target)) continue;
          LiftedState x{Matrix::Zero(2 * m, p.d)};
          LiftedState y{Matrix::Zero(2 * m, p.d)};
          x.u.row(i) = eig.vectors.col(c).transpose();
          const LiftedState tx = apply_gradient(t, p, gamma, x);
          const LiftedState ty = apply_gradient(t, p, gamma, y);
          best = std::max(best, (tx.upper() - ty.upper()).squaredNorm());
        }
      }
    }
    if (best >= 0.0) rep.aligned_ratio = best;
  }
  rep.pass = rep.max_ratio <= rep.bound + 1e-9;
  return rep;
}

ProxMixReport verify_prox_and_mixing(const WeightTriple& t,
                                   const CompositeProblem& p, double gamma,
                                   int trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int m = t.size();
  const Matrix b_sq = t.B * t.B;
  ProxMixReport rep;
  rep.trials = trials;
  for (int trial = 0; trial < trials; ++trial) {
    LiftedState x{gaussian_matrix(2 * m, p.d, rng)};
    LiftedState y{gaussian_matrix(2 * m, p.d, rng)};
    const LiftedState gx = apply_prox(p, gamma, x);
    const LiftedState gy = apply_prox(p, gamma, y);
    const double denom = (x.upper() - y.upper()).squaredNorm();
    if (denom > 0.0) {
      rep.max_prox_ratio =
          std::max(rep.max_prox_ratio,
                   (gx.upper() - gy.upper()).squaredNorm() / denom);
    }
    const LiftedState bx = apply_mix_b(t, x);
    const double lhs = bx.upper().squaredNorm();
    const double rhs = (b_sq * x.upper()).cwiseProduct(x.upper()).sum();
    rep.max_mix_violation = std::max(rep.max_mix_violation,
                                     std::abs(lhs - rhs) / (1.0 + rhs));
    // Lower blocks are untouched by both factors.
    if ((gx.lower() - x.lower()).norm() != 0.0 ||
        (bx.lower() - x.lower()).norm() != 0.0) {
      rep.max_mix_violation = std::numeric_limits<double>::infinity();
    }
  }
  rep.pass = rep.max_prox_ratio <= 1.0 + 1e-9 && rep.max_mix_violation <= 1e-9;
  return rep;
}

ChainReport verify_chain(const WeightTriple& t, const CompositeProblem& p,
                         double gamma, int trials, std::uint64_t seed,
                         bool project_lower) {
  std::mt19937_64 rng(seed);
  const int m = t.size();
  const RatePrediction rate = rate_prediction(t, p.mu, p.L, gamma);
  const BlockNorm lam_c = BlockNorm::lambda_c(t.C);
  ChainReport rep;
  rep.trials = trials;
  rep.lambda = rate.lambda;
  for (int trial = 0; trial < trials; ++trial) {
    LiftedState x{gaussian_matrix(2 * m, p.d, rng)};
    LiftedState y{gaussian_matrix(2 * m, p.d, rng)};
    if (project_lower) {
      project_lower_block(x);
      project_lower_block(y);
    } else if (trial == 0) {
      // The side condition matters: a lower-block difference along the
      // all-ones direction passes through the consensus factor untouched.
      x.u.setZero();
      y.u.setZero();
      x.lower() = Matrix::Ones(m, p.d);
    }
    const double before = lam_c.norm_sq(x.u - y.u);
    if (before == 0.0) continue;
    const double after =
        lam_c.norm_sq(apply_T(t, p, gamma, x).u - apply_T(t, p, gamma, y).u);
    rep.max_ratio = std::max(rep.max_ratio, after / before);
  }
  {
    // Tightness witness for the eigenvalue bound inside the chain: along the
    // top eigenvector of (I-C)^{-1/2} B^2 (I-C)^{-1/2} the inequality
    // q^2 ||v||_{B^2}^2 <= q^2 max_eig ||v||_{I-C}^2 holds with equality.
    const Matrix ic = Matrix::Identity(m, m) - t.C;
    const Matrix ic_inv_sqrt = sym_pinv_sqrt(ic);
    const Matrix sym = ic_inv_sqrt * t.B * t.B * ic_inv_sqrt;
    const SymEig eig = sym_eig(sym);
    const Vector v = ic_inv_sqrt * eig.vectors.col(m - 1);
    const double lhs = (t.B * v).squaredNorm();
    const double rhs = rate.b2_ic_inv * v.dot(ic * v);
    rep.witness_gap = std::abs(lhs - rhs) / (1.0 + std::abs(rhs));
  }
  rep.pass = rep.max_ratio <= rep.lambda + 1e-9;
  return rep;
}

}  // namespace netprox
