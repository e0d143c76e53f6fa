#include "netprox/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace netprox {

namespace {

struct DisjointSet {
  std::vector<int> parent;
  explicit DisjointSet(int n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

Graph::Graph(int node_count, std::vector<std::pair<int, int>> edges)
    : m_(node_count) {
  if (m_ <= 0) throw std::invalid_argument("graph needs at least one node");
  for (auto& [i, j] : edges) {
    if (i == j) throw std::invalid_argument("self-loop on node " + std::to_string(i));
    if (i < 0 || j < 0 || i >= m_ || j >= m_) {
      throw std::invalid_argument("edge endpoint out of range");
    }
    if (i > j) std::swap(i, j);
  }
  std::sort(edges.begin(), edges.end());
  if (std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
    throw std::invalid_argument("duplicate edge in graph");
  }
  const int components = component_count(m_, edges);
  if (components != 1) {
    throw std::invalid_argument("graph is disconnected (" +
                                std::to_string(components) + " components)");
  }
  edges_ = std::move(edges);
  degree_.assign(m_, 0);
  for (const auto& [i, j] : edges_) {
    ++degree_[i];
    ++degree_[j];
  }
}

int Graph::component_count(int node_count,
                           const std::vector<std::pair<int, int>>& edges) {
  DisjointSet ds(node_count);
  for (const auto& [i, j] : edges) ds.unite(i, j);
  int count = 0;
  for (int v = 0; v < node_count; ++v) {
    if (ds.find(v) == v) ++count;
  }
  return count;
}

Graph Graph::ring(int m) {
  if (m < 3) {
    if (m == 2) return Graph(2, {{0, 1}});
    if (m == 1) return Graph(1, {});
    throw std::invalid_argument("ring needs m >= 1");
  }
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < m; ++i) edges.emplace_back(i, (i + 1) % m);
  return Graph(m, std::move(edges));
}

Graph Graph::path(int m) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i + 1 < m; ++i) edges.emplace_back(i, i + 1);
  return Graph(m, std::move(edges));
}

Graph Graph::complete(int m) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) edges.emplace_back(i, j);
  return Graph(m, std::move(edges));
}

Graph Graph::random_geometric(int m, std::uint64_t seed, double radius) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::pair<double, double>> pts(m);
  for (auto& p : pts) {
    p.first = unit(rng);
    p.second = unit(rng);
  }
  double r = radius > 0.0 ? radius
                          : std::sqrt(2.0 * std::log(std::max(m, 2)) / m);
  for (;;) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < m; ++i) {
      for (int j = i + 1; j < m; ++j) {
        const double dx = pts[i].first - pts[j].first;
        const double dy = pts[i].second - pts[j].second;
        if (dx * dx + dy * dy <= r * r) edges.emplace_back(i, j);
      }
    }
    if (component_count(m, edges) == 1) return Graph(m, std::move(edges));
    r *= 1.1;
  }
}

Graph Graph::read(std::istream& in) {
  int m = 0;
  if (!(in >> m)) throw std::invalid_argument("edge list: missing node count");
  std::vector<std::pair<int, int>> edges;
  int i, j;
  while (in >> i >> j) edges.emplace_back(i, j);
  return Graph(m, std::move(edges));
}

Graph Graph::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open graph file: " + path);
  return read(in);
}

void Graph::write(std::ostream& out) const {
  out << m_ << "\n";
  for (const auto& [i, j] : edges_) out << i << " " << j << "\n";
}

void Graph::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write graph file: " + path);
  write(out);
}

bool Graph::has_edge(int i, int j) const {
  if (i > j) std::swap(i, j);
  return std::binary_search(edges_.begin(), edges_.end(), std::make_pair(i, j));
}

GossipMatrix::GossipMatrix(Graph g, Matrix w, int hop, bool check)
    : graph_(std::move(g)), w_(std::move(w)), hop_(hop) {
  if (check) validate();
}

GossipMatrix GossipMatrix::unchecked(Graph g, Matrix w, int hop_order) {
  return GossipMatrix(std::move(g), std::move(w), hop_order, false);
}

void GossipMatrix::validate() const {
  const int m = static_cast<int>(w_.rows());
  if (w_.cols() != m || m != graph_.node_count()) {
    throw std::invalid_argument("gossip matrix shape mismatch");
  }
  if (!is_symmetric(w_, 1e-12)) {
    throw std::invalid_argument("gossip matrix not symmetric");
  }
  const Vector ones = Vector::Ones(m);
  if ((w_ * ones - ones).cwiseAbs().maxCoeff() > 1e-12 ||
      (w_.transpose() * ones - ones).cwiseAbs().maxCoeff() > 1e-12) {
    throw std::invalid_argument("gossip matrix not doubly stochastic");
  }
  if (m == 1) return;
  const Vector eigs = sym_eig(w_).values;
  if (snap(eigs(0), -1.0) <= -1.0) {
    throw std::invalid_argument("gossip matrix eigenvalue at or below -1");
  }
  if (snap(eigs(m - 1), 1.0) > 1.0) {
    throw std::invalid_argument("gossip matrix eigenvalue above 1");
  }
  if (eigs(m - 2) >= 1.0 - 1e-12) {
    throw std::invalid_argument("gossip matrix eigenvalue 1 not simple");
  }
}

GossipMatrix GossipMatrix::metropolis(const Graph& g) {
  const int m = g.node_count();
  Matrix w = Matrix::Zero(m, m);
  for (const auto& [i, j] : g.edges()) {
    const double v = 1.0 / (1.0 + std::max(g.degree(i), g.degree(j)));
    w(i, j) = v;
    w(j, i) = v;
  }
  for (int i = 0; i < m; ++i) {
    w(i, i) = 1.0 - w.row(i).sum();
  }
  return GossipMatrix(g, std::move(w), 1, true);
}

GossipMatrix lazy(const GossipMatrix& w) {
  const int m = w.size();
  Matrix half = 0.5 * (Matrix::Identity(m, m) + w.w_);
  return GossipMatrix(w.graph_, std::move(half), w.hop_, true);
}

GossipMatrix k_hop_power(const GossipMatrix& w, int k) {
  if (k < 1) throw std::invalid_argument("k_hop_power needs k >= 1");
  if (k == 1) return w;
  Matrix acc = w.w_;
  for (int i = 1; i < k; ++i) acc = acc * w.w_;
  acc = 0.5 * (acc + acc.transpose());  // keep exact symmetry
  return GossipMatrix(w.graph_, std::move(acc), k * w.hop_, true);
}

GossipMatrix chebyshev_matrix(const GossipMatrix& w, int k) {
  if (k < 1) throw std::invalid_argument("chebyshev_matrix needs k >= 1");
  const double rho = spectral_info(w).rho_com;
  if (rho <= 1e-12) {
    throw std::invalid_argument(
        "chebyshev acceleration undefined for rho_com = 0; use W directly");
  }
  if (rho >= 1.0 - 1e-12) {
    throw std::invalid_argument("mixing factor must be below 1");
  }
  const int m = w.size();
  // Normalized three-term recursion: p_j = T_j(W/rho) / T_j(1/rho), with the
  // scalar ratios r_j = T_{j-1}(1/rho) / T_j(1/rho) kept alongside so every
  // intermediate matrix stays O(1).
  Matrix p_prev = Matrix::Identity(m, m);
  Matrix p_cur = w.w_;  // T_1(W/rho)/T_1(1/rho) = W
  double r_cur = rho;   // T_0/T_1
  for (int j = 1; j < k; ++j) {
    const double r_next = 1.0 / (2.0 / rho - r_cur);
    Matrix p_next = (2.0 / rho) * r_next * (w.w_ * p_cur) -
                    (r_next * r_cur) * p_prev;
    p_prev = std::move(p_cur);
    p_cur = std::move(p_next);
    r_cur = r_next;
  }
  p_cur = 0.5 * (p_cur + p_cur.transpose());
  return GossipMatrix(w.graph_, std::move(p_cur), k * w.hop_, true);
}

SpectralInfo spectral_info(const GossipMatrix& w) {
  const int m = w.size();
  SpectralInfo info;
  info.eigenvalues = sym_eig(w.entries()).values;
  const Matrix shifted = w.entries() - averaging_projector(m);
  const Vector eigs = sym_eig(shifted).values;
  info.rho_com = std::max(std::abs(eigs(0)), std::abs(eigs(m - 1)));
  if (m >= 2) {
    // spectrum of I - W ascending is 1 - (descending spectrum of W)
    info.lambda2_consensus = 1.0 - info.eigenvalues(m - 2);
  } else {
    info.lambda2_consensus = 0.0;
  }
  info.mixing_valid = info.rho_com < 1.0 - 1e-12;
  return info;
}

}  // namespace netprox
