#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "netprox/linalg.hpp"

namespace netprox {

// Undirected, static, connected communication graph over agents 0..m-1.
// Edges are stored normalized as (i, j) with i < j, sorted and deduplicated.
class Graph {
 public:
  Graph(int node_count, std::vector<std::pair<int, int>> edges);

  static Graph ring(int m);
  static Graph path(int m);
  static Graph complete(int m);
  // Points sampled uniformly in the unit square; nodes within `radius` are
  // connected. The radius grows by 10% until the graph is connected, so the
  // result is always valid and deterministic in the seed.
  static Graph random_geometric(int m, std::uint64_t seed, double radius = 0.0);

  // Edge-list text format: first line "m", then one "i j" line per edge.
  static Graph load(const std::string& path);
  static Graph read(std::istream& in);
  void save(const std::string& path) const;
  void write(std::ostream& out) const;

  int node_count() const { return m_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  int degree(int node) const { return degree_[node]; }
  bool has_edge(int i, int j) const;

  static int component_count(int node_count,
                             const std::vector<std::pair<int, int>>& edges);

 private:
  int m_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<int> degree_;
};

// Symmetric doubly stochastic mixing matrix tied to a graph. hop_order is the
// number of neighbor exchanges one multiplication costs.
class GossipMatrix {
 public:
  static GossipMatrix metropolis(const Graph& g);
  // Bypasses validation; for adversarial/test inputs.
  static GossipMatrix unchecked(Graph g, Matrix w, int hop_order = 1);

  const Matrix& entries() const { return w_; }
  const Graph& graph() const { return graph_; }
  int hop_order() const { return hop_; }
  int size() const { return static_cast<int>(w_.rows()); }

  friend GossipMatrix lazy(const GossipMatrix& w);
  friend GossipMatrix k_hop_power(const GossipMatrix& w, int k);
  friend GossipMatrix chebyshev_matrix(const GossipMatrix& w, int k);

 private:
  GossipMatrix(Graph g, Matrix w, int hop, bool validate);
  void validate() const;

  Graph graph_;
  Matrix w_;
  int hop_;
};

struct SpectralInfo {
  Vector eigenvalues;       // ascending spectrum of W
  double rho_com;           // max |eig(W - J)|, the mixing factor
  double lambda2_consensus; // second-smallest eigenvalue of I - W
  bool mixing_valid;        // rho_com < 1 - 1e-12
};

// (I + W) / 2; shifts the spectrum into (0, 1].
GossipMatrix lazy(const GossipMatrix& w);

// W^k; k consecutive communication rounds per application.
GossipMatrix k_hop_power(const GossipMatrix& w, int k);

// Degree-k Chebyshev polynomial of W normalized so P_k(1) = 1, evaluated by
// the three-term matrix recursion. Minimizes the mixing factor among degree-k
// polynomials. Requires rho_com(W) > 0.
GossipMatrix chebyshev_matrix(const GossipMatrix& w, int k);

SpectralInfo spectral_info(const GossipMatrix& w);

}  // namespace netprox
