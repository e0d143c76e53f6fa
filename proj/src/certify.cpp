#include "netprox/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "netprox/algorithm.hpp"

namespace netprox {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFloor = 1e-24;

// Coordinatewise subdifferential intervals of g at the stacked iterate.
// Returns false when some row leaves the domain.
bool stacked_intervals(const CompositeProblem& p, const Matrix& x, Matrix& lo,
                       Matrix& hi) {
  const Eigen::Index m = x.rows();
  lo.resize(m, x.cols());
  hi.resize(m, x.cols());
  Vector row_lo, row_hi;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (!p.nonsmooth.subgradient_interval(x.row(i).transpose(), row_lo,
                                          row_hi)) {
      return false;
    }
    lo.row(i) = row_lo.transpose();
    hi.row(i) = row_hi.transpose();
  }
  return true;
}

double clamp(double v, double lo, double hi) {
  return std::min(std::max(v, lo), hi);
}

// A concrete selection s with rows in the subdifferential intervals and
// column sums as close as possible to `target`.
Matrix select_subgradients(const Matrix& lo, const Matrix& hi,
                           const Eigen::RowVectorXd& target) {
  const Eigen::Index m = lo.rows(), d = lo.cols();
  Matrix s(m, d);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index c = 0; c < d; ++c) s(i, c) = clamp(0.0, lo(i, c), hi(i, c));
  for (Eigen::Index c = 0; c < d; ++c) {
    double rem = clamp(target(c), lo.col(c).sum(), hi.col(c).sum()) -
                 s.col(c).sum();
    for (Eigen::Index i = 0; i < m && rem != 0.0; ++i) {
      if (rem > 0.0) {
        const double room = hi(i, c) - s(i, c);
        const double take = std::min(rem, room);
        s(i, c) += take;
        rem -= take;
      } else {
        const double room = s(i, c) - lo(i, c);
        const double take = std::min(-rem, room);
        s(i, c) -= take;
        rem += take;
      }
    }
  }
  return s;
}

double interval_distance(const Matrix& v, const Matrix& lo, const Matrix& hi) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    for (Eigen::Index c = 0; c < v.cols(); ++c) {
      const double gap =
          std::max({lo(i, c) - v(i, c), v(i, c) - hi(i, c), 0.0});
      acc += gap * gap;
    }
  }
  return std::sqrt(acc);
}

}  // namespace

ConsensusOps::ConsensusOps(const Matrix& c_matrix) : c(c_matrix) {
  SymEig eig = sym_eig(c);
  Vector roots = eig.values.unaryExpr(
      [](double v) { return v > 1e-12 ? std::sqrt(v) : 0.0; });
  Vector inv = eig.values.unaryExpr(
      [](double v) { return v > 1e-12 ? 1.0 / std::sqrt(v) : 0.0; });
  sqrt_c = eig.vectors * roots.asDiagonal() * eig.vectors.transpose();
  pinv_sqrt_c = eig.vectors * inv.asDiagonal() * eig.vectors.transpose();
  lambda2 = eig.values.size() > 1 ? eig.values(1) : 0.0;
}

KktResidual kkt_residual(const CompositeProblem& p, const ConsensusOps& ops,
                         const Matrix& x, const std::optional<Matrix>& y) {
  if (x.rows() != ops.c.rows() || x.cols() != p.d) {
    throw std::invalid_argument("kkt_residual: iterate shape mismatch");
  }
  KktResidual res;
  res.primal = (ops.sqrt_c * x).norm();

  const Matrix grad = gradient_stack(p, x);
  Matrix lo, hi;
  if (!stacked_intervals(p, x, lo, hi)) {
    res.dual = kInf;
    res.domain_violation = true;
    res.y_used = Matrix::Zero(x.rows(), x.cols());
    return res;
  }

  if (y.has_value()) {
    res.y_used = *y;
    const Matrix mean = row_mean_replicated(res.y_used);
    if (mean.norm() > 1e-12 * (1.0 + res.y_used.norm())) {
      res.y_used -= mean;  // project onto span(C)
      res.y_projected = true;
    }
  } else {
    // Least-squares recovery: pick the subgradient selection that minimizes
    // the columnwise mean of grad + s, then match the mean-free part exactly
    // through sqrt(C).
    const Matrix s = select_subgradients(lo, hi, -grad.colwise().sum());
    Matrix w = -grad - s;
    w -= row_mean_replicated(w);
    res.y_used = ops.pinv_sqrt_c * w;
  }
  const Matrix v = -(grad + ops.sqrt_c * res.y_used);
  res.dual = interval_distance(v, lo, hi);
  return res;
}

KktResidual kkt_residual(const CompositeProblem& p, const Matrix& c_matrix,
                         const Matrix& x, const std::optional<Matrix>& y) {
  return kkt_residual(p, ConsensusOps(c_matrix), x, y);
}

FixResidual fix_residual(const WeightTriple& t, const CompositeProblem& p,
                         double gamma, const Matrix& x) {
  if (gamma <= 0.0) throw std::invalid_argument("fix_residual needs gamma > 0");
  FixResidual res;
  res.consensus = (t.C * x).norm();

  const Matrix grad = gradient_stack(p, x);
  Matrix lo, hi;
  if (!stacked_intervals(p, x, lo, hi)) {
    res.aggregate = kInf;
    res.domain_violation = true;
    return res;
  }
  const Eigen::RowVectorXd r0 =
      (x - t.A * x).colwise().sum() + gamma * (t.B * grad).colwise().sum();
  double acc = 0.0;
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const double s = clamp(-r0(c) / gamma, lo.col(c).sum(), hi.col(c).sum());
    const double defect = r0(c) + gamma * s;
    acc += defect * defect;
  }
  res.aggregate = std::sqrt(acc);
  return res;
}

RateFit empirical_rate(const std::vector<double>& err) {
  RateFit fit;
  const int n = static_cast<int>(err.size());
  int live = n;  // prefix of the trajectory above the numerical floor
  for (int k = 0; k < n; ++k) {
    if (!(err[k] > kFloor)) {
      live = k;
      break;
    }
  }
  fit.floored = live < n;
  fit.window_begin = live / 2;
  fit.window_end = live;
  fit.points = fit.window_end - fit.window_begin;
  if (fit.points < 2) {
    fit.lambda = fit.lambda_lo = fit.lambda_hi =
        std::numeric_limits<double>::quiet_NaN();
    fit.slope = std::numeric_limits<double>::quiet_NaN();
    return fit;
  }
  // Least-squares line through (k, log err_k) on the tail window.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int k = fit.window_begin; k < fit.window_end; ++k) {
    const double yv = std::log(err[k]);
    sx += k;
    sy += yv;
    sxx += static_cast<double>(k) * k;
    sxy += k * yv;
  }
  const double np = fit.points;
  const double denom = np * sxx - sx * sx;
  fit.slope = (np * sxy - sx * sy) / denom;
  const double intercept = (sy - fit.slope * sx) / np;
  double ss_res = 0.0;
  for (int k = fit.window_begin; k < fit.window_end; ++k) {
    const double r = std::log(err[k]) - (intercept + fit.slope * k);
    ss_res += r * r;
  }
  const double sigma2 = fit.points > 2 ? ss_res / (np - 2.0) : 0.0;
  const double se = std::sqrt(sigma2 * np / denom);
  fit.lambda = std::exp(fit.slope);
  fit.lambda_lo = std::exp(fit.slope - 2.0 * se);
  fit.lambda_hi = std::exp(fit.slope + 2.0 * se);
  fit.contractive = fit.slope < -1e-12;
  return fit;
}

}  // namespace netprox
