#include "netprox/algorithm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "netprox/certify.hpp"

namespace netprox {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDivergenceCap = 1e12;

Matrix matrix_power(const Matrix& w, int k) {
  Matrix acc = Matrix::Identity(w.rows(), w.cols());
  for (int i = 0; i < k; ++i) acc = acc * w;
  return 0.5 * (acc + acc.transpose());
}

void check_finite(const Matrix& m, const char* which, long iteration) {
  const double peak = m.cwiseAbs().maxCoeff();
  if (!std::isfinite(peak) || peak > kDivergenceCap) {
    throw DivergenceError(std::string("divergence in ") + which +
                              " at iteration " + std::to_string(iteration),
                          iteration);
  }
}

}  // namespace

WeightTriple make_triple(Matrix a, Matrix b, Matrix c, Matrix d,
                         std::string label) {
  const auto n = a.rows();
  if (n < 2) {
    throw std::invalid_argument(
        "weight triples need m >= 2 agents (a consensus matrix with null "
        "space span(1) does not exist at m = 1)");
  }
  if (a.cols() != n || b.rows() != n || b.cols() != n || c.rows() != n ||
      c.cols() != n || d.rows() != n || d.cols() != n) {
    throw std::invalid_argument("weight matrices must be square, same size");
  }
  WeightTriple t;
  t.A = std::move(a);
  t.B = std::move(b);
  t.C = std::move(c);
  t.D = std::move(d);
  t.sqrt_c = sym_sqrt(t.C);
  t.label = std::move(label);
  return t;
}

bool TripleReport::ok() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const ConditionCheck& c) { return c.pass; });
}

std::string TripleReport::first_failure() const {
  for (const auto& c : checks) {
    if (!c.pass) return c.name;
  }
  return {};
}

TripleReport validate_triple(const WeightTriple& t, double mu, double L) {
  if (mu <= 0.0 || L < mu) throw std::invalid_argument("need 0 < mu <= L");
  const int m = t.size();
  const Vector ones = Vector::Ones(m);
  TripleReport report;
  auto add = [&report](std::string name, bool pass, double margin) {
    report.checks.push_back({std::move(name), pass, margin});
  };

  {
    const double defect = std::abs(ones.dot(t.A * ones) - m);
    add("sum(A) = m", defect <= 1e-9 * m, 1e-9 * m - defect);
  }
  {
    const double defect =
        (t.B.transpose() * ones - ones).cwiseAbs().maxCoeff();
    add("1'B = 1'", defect <= 1e-9, 1e-9 - defect);
  }
  add("B symmetric", is_symmetric(t.B), 0.0);
  add("C symmetric", is_symmetric(t.C), 0.0);
  add("D symmetric", is_symmetric(t.D), 0.0);

  const Vector c_eigs = sym_eig(t.C).values;
  add("C positive semidefinite", snap(c_eigs(0), 0.0) >= 0.0, c_eigs(0));
  {
    const double null_defect = (t.C * ones).cwiseAbs().maxCoeff();
    const bool pass = null_defect <= 1e-9 && c_eigs(1) > 1e-9;
    add("null(C) = span(1)", pass, c_eigs(1) - 1e-9);
  }
  {
    const double defect = (t.A - t.B * t.D).norm();
    add("A = B D", defect <= 1e-9 * (1.0 + t.A.norm()), -defect);
  }
  const Vector d_eigs = sym_eig(t.D).values;
  add("-I < D <= I",
      d_eigs(0) > -1.0 + 1e-9 && snap(d_eigs(m - 1), 1.0) <= 1.0,
      std::min(d_eigs(0) + 1.0, 1.0 - d_eigs(m - 1)));
  const bool ic_pd = c_eigs(m - 1) < 1.0 - 1e-9;
  add("I - C positive definite", ic_pd, 1.0 - c_eigs(m - 1));
  {
    const Matrix comm = t.B * t.C - t.C * t.B;
    const double defect = comm.norm();
    const double scale = 1e-9 * (1.0 + t.B.norm() * t.C.norm());
    add("B and C commute", defect <= scale, scale - defect);
  }
  {
    // B^2 < ((L+mu)/(L lmax(D) - mu lmin(D)))^2 (I - C)
    bool pass = false;
    double margin = -kInf;
    const double denom = L * d_eigs(m - 1) - mu * d_eigs(0);
    if (!ic_pd) {
      pass = false;
    } else if (denom <= 0.0) {
      pass = true;  // the bound is vacuous
      margin = kInf;
    } else {
      const double bound = std::pow((L + mu) / denom, 2);
      const double top = max_eig_b2_ic_inv(t.B, t.C);
      margin = bound - top;
      pass = margin > 1e-9 * bound;
    }
    add("step-size window nonempty (condition on B^2 vs I-C)", pass, margin);
  }
  return report;
}

WeightTriple make_preset(const std::string& name, const GossipMatrix& w,
                         const PresetParams& params) {
  const int m = w.size();
  const Matrix& W = w.entries();
  const Matrix I = Matrix::Identity(m, m);

  if (name == "extra") {
    Matrix a = 0.5 * (I + W);
    return make_triple(a, I, 0.5 * (I - W), a, "extra");
  }
  if (name == "nids" || name == "nids_exact_diffusion" ||
      name == "exact_diffusion") {
    Matrix half = 0.5 * (I + W);
    return make_triple(half, half, 0.5 * (I - W), I, "nids_exact_diffusion");
  }
  if (name == "next" || name == "augdgm" || name == "next_augdgm") {
    Matrix w2 = matrix_power(W, 2);
    Matrix c = (I - W) * (I - W);
    return make_triple(w2, w2, 0.5 * (c + c.transpose()), I, "next_augdgm");
  }
  if (name == "diging") {
    Matrix w2 = matrix_power(W, 2);
    Matrix c = (I - W) * (I - W);
    return make_triple(w2, I, 0.5 * (c + c.transpose()), w2, "diging");
  }
  if (name == "jakovetic") {
    const double b = params.b;
    Matrix w2 = matrix_power(W, 2);
    Matrix a = b * w2 + (1.0 - b) * W;
    Matrix c = b * w2 - (1.0 + b) * W + I;
    return make_triple(a, I, std::move(c), a, "jakovetic");
  }
  if (name == "mansoori") {
    const int k = params.hops;
    if (k < 2) throw std::invalid_argument("mansoori needs K >= 2");
    Matrix a = matrix_power(W, k);
    Matrix b = Matrix::Zero(m, m);
    Matrix pw = W;
    for (int i = 1; i <= k - 1; ++i) {
      b += pw;
      pw = pw * W;
    }
    b = 0.5 * (b + b.transpose());
    const Vector b_eigs = sym_eig(b).values;
    if (b_eigs.cwiseAbs().minCoeff() <= 1e-9) {
      throw std::invalid_argument("mansoori: B is singular for this W");
    }
    Matrix d = b.ldlt().solve(a);
    return make_triple(a, std::move(b), W - a, std::move(d), "mansoori");
  }
  if (name == "alghunaim") {
    return make_triple(W, I, params.alpha * (I - W), W, "alghunaim");
  }
  if (name == "case1") {
    const Vector eigs = sym_eig(W).values;
    if (eigs(0) <= 1e-9) {
      throw std::invalid_argument("case1 requires W positive definite");
    }
    return make_triple(W, W, I - W, I, "case1");
  }
  if (name == "case2") {
    const Vector eigs = sym_eig(W).values;
    if (eigs.cwiseAbs().minCoeff() <= 1e-9) {
      throw std::invalid_argument("case2 requires W nonsingular");
    }
    Matrix w2 = matrix_power(W, 2);
    return make_triple(W, W, I - w2, I, "case2");
  }
  if (name == "chebyshev") {
    const Matrix p = chebyshev_matrix(w, params.hops).entries();
    Matrix p2 = p * p;
    p2 = 0.5 * (p2 + p2.transpose());
    return make_triple(p, p, I - p2, I, "chebyshev");
  }
  throw std::invalid_argument("unknown preset: " + name);
}

RatePrediction rate_prediction(const WeightTriple& t, double mu, double L,
                               std::optional<double> gamma) {
  TripleReport report = validate_triple(t, mu, L);
  if (!report.ok()) {
    throw std::invalid_argument("invalid weight triple: " +
                                report.first_failure());
  }
  const int m = t.size();
  const Vector d_eigs = sym_eig(t.D).values;
  const double d_lo = d_eigs(0), d_hi = d_eigs(m - 1);

  RatePrediction r;
  r.b2_ic_inv = max_eig_b2_ic_inv(t.B, t.C);
  const double beta = 1.0 / std::sqrt(r.b2_ic_inv);
  r.gamma_lo = std::max(0.0, d_hi - beta) / mu;
  r.gamma_hi = (d_lo + beta) / L;
  r.gamma_star = (d_hi + d_lo) / (L + mu);
  r.gamma_used = gamma.value_or(r.gamma_star);
  r.q = std::max(std::abs(d_lo - r.gamma_used * L),
                 std::abs(d_hi - r.gamma_used * mu));
  r.q_star = (L * d_hi - mu * d_lo) / (L + mu);
  r.lambda_opt = r.q * r.q * r.b2_ic_inv;
  r.lambda2_c = sym_eig(t.C).values(1);
  r.lambda_comm = 1.0 - r.lambda2_c;
  r.lambda = std::max(r.lambda_opt, r.lambda_comm);
  return r;
}

AlgorithmState make_state(const WeightTriple& t, const CompositeProblem& p,
                          double gamma, const Matrix& z0, const Matrix& y0) {
  const int m = t.size();
  if (p.agent_count() != m) {
    throw std::invalid_argument("problem and triple disagree on agent count");
  }
  if (z0.rows() != m || z0.cols() != p.d || y0.rows() != m ||
      y0.cols() != p.d) {
    throw std::invalid_argument("state shape mismatch");
  }
  const double colsum = y0.colwise().sum().cwiseAbs().maxCoeff();
  if (colsum > 1e-9 * (1.0 + y0.norm())) {
    throw std::invalid_argument(
        "y0 must lie in span(C): column sums must vanish");
  }
  AlgorithmState s;
  s.z = z0;
  s.y = y0;
  s.x = prox_rowwise(p, gamma, z0);
  s.k = 0;
  return s;
}

AlgorithmState step(const WeightTriple& t, const CompositeProblem& p,
                    double gamma, const AlgorithmState& s) {
  if (gamma <= 0.0) throw std::invalid_argument("step needs gamma > 0");
  AlgorithmState next;
  const Matrix grad = gradient_stack(p, s.x);
  next.z = t.A * s.x - gamma * (t.B * grad) - s.y;
  check_finite(next.z, "z", s.k + 1);
  // C annihilates the mean row; feeding it the consensus error keeps the
  // column sums of y at roundoff over long runs.
  next.y = s.y + t.C * (next.z - row_mean_replicated(next.z));
  check_finite(next.y, "y", s.k + 1);
  next.x = prox_rowwise(p, gamma, next.z);
  check_finite(next.x, "x", s.k + 1);
  next.k = s.k + 1;
  return next;
}

Matrix step_eliminated(const WeightTriple& t, const CompositeProblem& p,
                       double gamma, const Matrix& z_prev, const Matrix& z_curr,
                       const Matrix& x_prev, const Matrix& x_curr) {
  if (gamma <= 0.0) throw std::invalid_argument("needs gamma > 0");
  const double scale = 1.0 + x_curr.norm();
  if ((prox_rowwise(p, gamma, z_prev) - x_prev).norm() > 1e-9 * scale ||
      (prox_rowwise(p, gamma, z_curr) - x_curr).norm() > 1e-9 * scale) {
    throw std::invalid_argument(
        "inconsistent history: x must be the prox of the matching z");
  }
  const Matrix grad_diff =
      gradient_stack(p, x_curr) - gradient_stack(p, x_prev);
  return z_curr - t.C * (z_curr - row_mean_replicated(z_curr)) +
         t.A * (x_curr - x_prev) - gamma * (t.B * grad_diff);
}

RunResult run(const WeightTriple& t, const CompositeProblem& p, double gamma,
              long iters, const Matrix& z0, const Matrix& y0) {
  if (iters < 0) throw std::invalid_argument("iters must be >= 0");
  RunResult result;
  result.x_star = reference_solution(p, 1e-13);
  const double f_star = objective(p, result.x_star);
  const ConsensusOps ops(t.C);
  const Matrix x_star_stack =
      Vector::Ones(t.size()) * result.x_star.transpose();

  AlgorithmState s = make_state(t, p, gamma, z0, y0);
  result.metrics.reserve(static_cast<std::size_t>(iters));
  for (long k = 0; k < iters; ++k) {
    IterationMetrics mtr;
    mtr.iter = k;
    mtr.err_sq = (s.x - x_star_stack).squaredNorm();
    mtr.consensus = (s.x - row_mean_replicated(s.x)).norm();
    const Vector mean_row = s.x.colwise().mean().transpose();
    mtr.obj_gap = objective(p, mean_row) - f_star;
    const KktResidual kkt = kkt_residual(p, ops, s.x);
    mtr.kkt_primal = kkt.primal;
    mtr.kkt_dual = kkt.dual;
    result.metrics.push_back(mtr);

    s = step(t, p, gamma, s);
    result.max_dual_colsum =
        std::max(result.max_dual_colsum,
                 s.y.colwise().sum().cwiseAbs().maxCoeff());
  }
  result.final_state = std::move(s);
  return result;
}

RunResult run(const WeightTriple& t, const CompositeProblem& p, double gamma,
              long iters) {
  const Matrix zeros = Matrix::Zero(t.size(), p.d);
  return run(t, p, gamma, iters, zeros, zeros);
}

std::vector<double> RunResult::err_sq() const {
  std::vector<double> out;
  out.reserve(metrics.size());
  for (const auto& m : metrics) out.push_back(m.err_sq);
  return out;
}

}  // namespace netprox
