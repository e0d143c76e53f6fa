#include "netprox/tradeoff.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace netprox {

namespace {

// Relative slack absorbing floating-point boundary ties such as
// rho_c(1) = 0.6 vs a 0.6 target.
bool meets(double value, double target) {
  return value <= target * (1.0 + 1e-12) + 1e-300;
}

void check_inputs(double rho_com, double rho_opt) {
  if (rho_com < 0.0 || rho_com >= 1.0) {
    throw std::invalid_argument("rho_com must be in [0, 1)");
  }
  if (rho_opt <= 0.0 || rho_opt >= 1.0) {
    throw std::invalid_argument("rho_opt must be in (0, 1)");
  }
}

// Minimal K >= 1 with evaluate(K) <= target, starting from a closed-form
// guess and correcting by direct evaluation in both directions.
template <typename F>
int confirmed_rounds(int guess, double target, F evaluate) {
  int k = std::max(guess, 1);
  while (!meets(evaluate(k), target)) ++k;
  while (k > 1 && meets(evaluate(k - 1), target)) --k;
  return k;
}

}  // namespace

double rho_opt(double kappa) {
  if (kappa < 1.0) throw std::invalid_argument("kappa must be >= 1");
  return (kappa - 1.0) / (kappa + 1.0);
}

double chebyshev_rate(double rho_com, int k) {
  if (rho_com <= 0.0 || rho_com >= 1.0) {
    throw std::invalid_argument("rho_com must be in (0, 1)");
  }
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  const double theta = (1.0 + rho_com) / (1.0 - rho_com);
  const double c = (std::sqrt(theta) - 1.0) / (std::sqrt(theta) + 1.0);
  const double ck = std::pow(c, k);
  return 2.0 * ck / (1.0 + ck * ck);
}

int rounds_plain(double rho_com, double rho_opt) {
  check_inputs(rho_com, rho_opt);
  if (rho_com == 0.0) return 1;
  const double target = rho_opt * rho_opt;
  if (meets(rho_com, target)) return 1;
  const int guess =
      static_cast<int>(std::ceil(std::log(target) / std::log(rho_com)));
  return confirmed_rounds(guess, target,
                          [rho_com](int k) { return std::pow(rho_com, k); });
}

int rounds_chebyshev(double rho_com, double rho_opt) {
  check_inputs(rho_com, rho_opt);
  if (rho_com == 0.0) return 1;
  const double target = rho_opt * rho_opt;
  const double theta = (1.0 + rho_com) / (1.0 - rho_com);
  const double c = (std::sqrt(theta) - 1.0) / (std::sqrt(theta) + 1.0);
  // Solve 2c^K/(1+c^{2K}) = target for the root c^K < 1; the stated log-base-c
  // expression is negative under a plain reading, so the positive equivalent
  // ln(arg)/ln(1/c) is used and confirmed by direct evaluation.
  const double arg =
      1.0 / target + std::sqrt(std::max(1.0 / (target * target) - 1.0, 0.0));
  const int guess = static_cast<int>(std::ceil(std::log(arg) / std::log(1.0 / c)));
  return confirmed_rounds(guess, target, [rho_com](int k) {
    return chebyshev_rate(rho_com, k);
  });
}

int rounds_baseline(double rho_com, double rho_opt) {
  check_inputs(rho_com, rho_opt);
  if (rho_com == 0.0) return 1;
  const double target =
      0.5 * (std::sqrt(1.0 + rho_opt) - std::sqrt(1.0 - rho_opt));
  if (meets(rho_com, target)) return 1;
  const int guess =
      static_cast<int>(std::ceil(std::log(target) / std::log(rho_com)));
  return confirmed_rounds(guess, target,
                          [rho_com](int k) { return std::pow(rho_com, k); });
}

std::vector<TradeoffPoint> sweep(const std::vector<double>& rho_com_grid,
                                 const std::vector<double>& rho_opt_grid) {
  std::vector<TradeoffPoint> pts;
  pts.reserve(rho_com_grid.size() * rho_opt_grid.size());
  for (double rc : rho_com_grid) {
    for (double ro : rho_opt_grid) {
      TradeoffPoint p;
      p.rho_com = rc;
      p.rho_opt = ro;
      p.k_plain = rounds_plain(rc, ro);
      p.k_cheby = rc == 0.0 ? 1 : rounds_chebyshev(rc, ro);
      p.k_baseline = rounds_baseline(rc, ro);
      pts.push_back(p);
    }
  }
  return pts;
}

std::vector<double> default_grid() {
  std::vector<double> grid;
  for (int i = 1; i <= 19; ++i) grid.push_back(0.05 * i);
  return grid;
}

void write_sweep_csv(std::ostream& out, const std::vector<TradeoffPoint>& pts) {
  out << "rho_com,rho_opt,k_plain,k_cheby,k_baseline\n";
  for (const auto& p : pts) {
    out << p.rho_com << ',' << p.rho_opt << ',' << p.k_plain << ','
        << p.k_cheby << ',' << p.k_baseline << "\n";
  }
}

}  // namespace netprox
