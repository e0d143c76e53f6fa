#pragma once

#include <cstdint>
#include <string>

#include "netprox/algorithm.hpp"
#include "netprox/linalg.hpp"
#include "netprox/problem.hpp"

namespace netprox {

// Stacked 2m x d state [upper; lower] of the lifted dynamics; the lower block
// carries sqrt(C) times the auxiliary dual iterate.
struct LiftedState {
  Matrix u;

  int half() const { return static_cast<int>(u.rows()) / 2; }
  auto upper() { return u.topRows(half()); }
  auto upper() const { return u.topRows(half()); }
  auto lower() { return u.bottomRows(half()); }
  auto lower() const { return u.bottomRows(half()); }
};

// Block-diagonal weighted norm ||X||_M^2 = <M X, X> with M = diag(Wu, Wl).
struct BlockNorm {
  Matrix upper_w, lower_w;

  double norm_sq(const LiftedState& s) const;
  double norm_sq(const Matrix& u2m) const;

  static BlockNorm lambda_c(const Matrix& c);  // diag(I - C, I)
  static BlockNorm v_c(const Matrix& c);       // diag(I, I - C)
  static BlockNorm q_f(double q, int m);       // diag(q^2 I, I)
  static BlockNorm lambda_b(const Matrix& b);  // diag(B^2, I)
};

struct LiftResult {
  LiftedState u1;     // state at iteration 1
  Matrix recon_z;     // z^k = recon_z * upper
  Matrix recon_y;     // y^k = recon_y * lower
  std::pair<Matrix, Matrix> reconstruct(const LiftedState& s) const;
};

// Lifts a starting iterate x0 (with zero dual start) into the auxiliary
// dynamics and returns the map back to the (z, y) pair.
LiftResult lift(const WeightTriple& t, const CompositeProblem& p, double gamma,
                const Matrix& x0);

// The four factors of the lifted iteration map and their composition.
LiftedState apply_mix_b(const WeightTriple& t, LiftedState s);
LiftedState apply_prox(const CompositeProblem& p, double gamma, LiftedState s);
LiftedState apply_gradient(const WeightTriple& t, const CompositeProblem& p,
                           double gamma, LiftedState s);
LiftedState apply_consensus(const WeightTriple& t, LiftedState s);
LiftedState apply_T(const WeightTriple& t, const CompositeProblem& p,
                    double gamma, const LiftedState& s);

struct IsometryReport {
  std::string name;
  double max_violation = 0.0;
  double bound = 0.0;
  int trials = 0;
  bool pass = false;
};

// Exact weighted-norm identity of the consensus factor.
IsometryReport verify_consensus_isometry(const WeightTriple& t, int trials,
                          std::uint64_t seed);

struct ContractionReport {
  std::string name;
  double max_ratio = 0.0;
  double bound = 0.0;          // q^2 for the gradient factor
  double aligned_ratio = 0.0;  // NaN when no tight alignment exists (D != cI)
  int trials = 0;
  bool pass = false;
  bool contractive = false;  // bound < 1
};

// Contraction of the gradient factor on the upper block; when D is a multiple
// of the identity the report includes the ratio along the extreme curvature
// eigenvector, which attains the bound.
ContractionReport verify_gradient_contraction(const WeightTriple& t,
                                const CompositeProblem& p, double gamma,
                                int trials, std::uint64_t seed);

struct ProxMixReport {
  double max_prox_ratio = 0.0;     // nonexpansiveness of the prox factor
  double max_mix_violation = 0.0;  // weighted-norm identity of the B factor
  int trials = 0;
  bool pass = false;
};

ProxMixReport verify_prox_and_mixing(const WeightTriple& t,
                                   const CompositeProblem& p, double gamma,
                                   int trials, std::uint64_t seed);

struct ChainReport {
  double max_ratio = 0.0;
  double lambda = 0.0;  // predicted end-to-end contraction factor
  int trials = 0;
  bool pass = false;
  // max over trials of the tightness defect of the top-eigenvector bound step
  double witness_gap = 0.0;
};

// End-to-end contraction of the composed map in the diag(I-C, I) norm over
// random pairs; lower blocks are projected onto span(sqrt(C)) unless
// project_lower is false (the bound can then fail, which is the point of the
// negative control).
ChainReport verify_chain(const WeightTriple& t, const CompositeProblem& p,
                         double gamma, int trials, std::uint64_t seed,
                         bool project_lower = true);

}  // namespace netprox
