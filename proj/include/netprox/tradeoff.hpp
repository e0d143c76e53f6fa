#pragma once

#include <iosfwd>
#include <vector>

namespace netprox {

// Rate of the centralized proximal-gradient method: (kappa - 1)/(kappa + 1).
double rho_opt(double kappa);

// Mixing factor of the degree-k Chebyshev polynomial of a matrix with mixing
// factor rho_com: 2 c^k / (1 + c^{2k}) with c = (sqrt(th)-1)/(sqrt(th)+1),
// th = (1+rho)/(1-rho).
double chebyshev_rate(double rho_com, int k);

// Smallest K with rho_com^K <= rho_opt^2 (at least one round).
int rounds_plain(double rho_com, double rho_opt);

// Smallest K whose Chebyshev mixing factor meets rho_opt^2; the closed-form
// ceiling is confirmed by direct evaluation to absorb boundary rounding.
int rounds_chebyshev(double rho_com, double rho_opt);

// Smallest K with rho_com^K <= (sqrt(1+rho_opt) - sqrt(1-rho_opt))/2, the
// round-count criterion of the multi-consensus scheme compared against.
int rounds_baseline(double rho_com, double rho_opt);

struct TradeoffPoint {
  double rho_com = 0.0;
  double rho_opt = 0.0;
  int k_plain = 0;
  int k_cheby = 0;
  int k_baseline = 0;
};

std::vector<TradeoffPoint> sweep(const std::vector<double>& rho_com_grid,
                                 const std::vector<double>& rho_opt_grid);

// 0.05, 0.10, ..., 0.95
std::vector<double> default_grid();

// CSV with header rho_com,rho_opt,k_plain,k_cheby,k_baseline.
void write_sweep_csv(std::ostream& out, const std::vector<TradeoffPoint>& pts);

}  // namespace netprox
