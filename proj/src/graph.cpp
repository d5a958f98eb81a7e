#include "ftcsim/graph.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "ftcsim/linalg.hpp"

namespace ftcsim {

std::string to_string(Topology t) {
  switch (t) {
    case Topology::path: return "path";
    case Topology::ring: return "ring";
    case Topology::hypercube: return "hypercube";
    case Topology::complete: return "complete";
    case Topology::custom: return "custom";
  }
  return "custom";
}

Topology topology_from_string(const std::string& s) {
  if (s == "path") return Topology::path;
  if (s == "ring") return Topology::ring;
  if (s == "hypercube") return Topology::hypercube;
  if (s == "complete") return Topology::complete;
  if (s == "custom") return Topology::custom;
  throw std::invalid_argument("unknown topology: " + s);
}

std::vector<int> Graph::degrees() const {
  std::vector<int> d(node_count, 0);
  for (auto [u, v] : edges) {
    ++d[u];
    ++d[v];
  }
  return d;
}

bool Graph::has_edge(int u, int v) const {
  if (u > v) std::swap(u, v);
  return std::binary_search(edges.begin(), edges.end(), std::make_pair(u, v));
}

bool Graph::connected() const {
  if (node_count <= 0) return false;
  std::vector<std::vector<int>> adj(node_count);
  for (auto [u, v] : edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  std::vector<bool> seen(node_count, false);
  std::vector<int> stack{0};
  seen[0] = true;
  int visited = 1;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (int w : adj[u]) {
      if (!seen[w]) {
        seen[w] = true;
        ++visited;
        stack.push_back(w);
      }
    }
  }
  return visited == node_count;
}

namespace {

bool is_power_of_two(int k) { return k >= 1 && (k & (k - 1)) == 0; }

void normalize_edges(std::vector<std::pair<int, int>>& edges) {
  for (auto& e : edges) {
    if (e.first > e.second) std::swap(e.first, e.second);
  }
  std::sort(edges.begin(), edges.end());
}

}  // namespace

Graph build_graph(Topology kind, int node_count) {
  if (node_count < 1) throw std::invalid_argument("node count must be >= 1");
  Graph g;
  g.node_count = node_count;
  g.kind = kind;
  switch (kind) {
    case Topology::path:
      for (int i = 0; i + 1 < node_count; ++i) g.edges.emplace_back(i, i + 1);
      break;
    case Topology::ring:
      if (node_count < 3) throw std::invalid_argument("ring requires K >= 3");
      for (int i = 0; i + 1 < node_count; ++i) g.edges.emplace_back(i, i + 1);
      g.edges.emplace_back(0, node_count - 1);
      break;
    case Topology::hypercube: {
      if (!is_power_of_two(node_count) || node_count < 2)
        throw std::invalid_argument("hypercube: K must be a power of two (K >= 2)");
      for (int i = 0; i < node_count; ++i) {
        for (int bit = 1; bit < node_count; bit <<= 1) {
          int j = i ^ bit;
          if (i < j) g.edges.emplace_back(i, j);
        }
      }
      break;
    }
    case Topology::complete:
      for (int i = 0; i < node_count; ++i)
        for (int j = i + 1; j < node_count; ++j) g.edges.emplace_back(i, j);
      break;
    case Topology::custom:
      throw std::invalid_argument("use custom_graph() for custom topologies");
  }
  normalize_edges(g.edges);
  return g;
}

Graph custom_graph(int node_count, std::vector<std::pair<int, int>> edges) {
  if (node_count < 1) throw std::invalid_argument("node count must be >= 1");
  normalize_edges(edges);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    auto [u, v] = edges[i];
    if (u < 0 || v >= node_count) throw std::invalid_argument("edge endpoint out of range");
    if (u == v) throw std::invalid_argument("self-loops are not allowed");
    if (i > 0 && edges[i] == edges[i - 1]) throw std::invalid_argument("duplicate edge");
  }
  Graph g;
  g.node_count = node_count;
  g.edges = std::move(edges);
  g.kind = Topology::custom;
  return g;
}

Eigen::MatrixXd laplacian(const Graph& g) {
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(g.node_count, g.node_count);
  for (auto [u, v] : g.edges) {
    l(u, u) += 1.0;
    l(v, v) += 1.0;
    l(u, v) -= 1.0;
    l(v, u) -= 1.0;
  }
  return l;
}

MatrixCheck check_combination_matrix(const Eigen::MatrixXd& a, const Graph& g) {
  const int k = g.node_count;
  if (a.rows() != k || a.cols() != k)
    throw std::invalid_argument("combination matrix dimension does not match graph");
  MatrixCheck c;
  c.symmetry_defect = (a - a.transpose()).cwiseAbs().maxCoeff();
  c.row_sum_defect = (a.rowwise().sum().array() - 1.0).abs().maxCoeff();
  c.spectral_radius = spectral_radius_symmetric(a);
  for (int i = 0; i < k && c.sparsity_ok; ++i) {
    for (int j = 0; j < k; ++j) {
      if (i != j && a(i, j) != 0.0 && !g.has_edge(i, j)) {
        c.sparsity_ok = false;
        break;
      }
    }
  }
  return c;
}

CombinationMatrix metropolis_weights(const Graph& g, double tolerance) {
  if (!g.connected()) throw std::invalid_argument("metropolis_weights: graph is disconnected");
  const int k = g.node_count;
  const auto deg = g.degrees();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(k, k);
  for (auto [u, v] : g.edges) {
    double w = 1.0 / (1.0 + std::max(deg[u], deg[v]));
    a(u, v) = w;
    a(v, u) = w;
  }
  for (int i = 0; i < k; ++i) a(i, i) = 1.0 - a.row(i).sum();
  CombinationMatrix m{a, tolerance};
  MatrixCheck c = check_combination_matrix(a, g);
  if (!c.pass(tolerance, /*require_spectral_radius=*/true))
    throw std::runtime_error("metropolis_weights: validation failed");
  return m;
}

double second_largest_eigenvalue(const CombinationMatrix& m) {
  const auto& a = m.entries;
  if (a.rows() != a.cols()) throw std::invalid_argument("second_largest_eigenvalue: matrix not square");
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > std::max(m.tolerance, 1e-9))
    throw std::invalid_argument("second_largest_eigenvalue: matrix is not symmetric");
  const int k = static_cast<int>(a.rows());
  // Deflating the all-ones direction removes exactly the eigenvalue-1 copy it carries.
  Eigen::MatrixXd b = a - Eigen::MatrixXd::Constant(k, k, 1.0 / k);
  return spectral_radius_symmetric(b);
}

std::string to_edge_list(const Graph& g) {
  std::ostringstream out;
  out << g.node_count << "\n";
  for (auto [u, v] : g.edges) out << u << " " << v << "\n";
  return out.str();
}

Graph parse_edge_list(const std::string& text) {
  std::istringstream in(text);
  int k = 0;
  if (!(in >> k)) throw std::invalid_argument("edge list: missing node count");
  std::vector<std::pair<int, int>> edges;
  int u, v;
  while (in >> u >> v) edges.emplace_back(u, v);
  if (!in.eof()) throw std::invalid_argument("edge list: trailing garbage");
  return custom_graph(k, std::move(edges));
}

}  // namespace ftcsim
