#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

namespace ftcsim {

enum class Topology { path, ring, hypercube, complete, custom };

std::string to_string(Topology t);
Topology topology_from_string(const std::string& s);

// Undirected graph: node indices in [0, node_count), edges stored as u < v,
// sorted and de-duplicated. Immutable after construction.
struct Graph {
  int node_count = 0;
  std::vector<std::pair<int, int>> edges;
  Topology kind = Topology::custom;

  std::vector<int> degrees() const;
  bool has_edge(int u, int v) const;
  bool connected() const;
};

// Built-in topologies. Hypercube node i's dimension-j neighbor is i ^ (1<<j),
// so node indices double as binary coordinates.
Graph build_graph(Topology kind, int node_count);

// Custom graph from an explicit edge list. Endpoint range, self-loops and
// duplicates are rejected; connectivity is left to the caller to query.
Graph custom_graph(int node_count, std::vector<std::pair<int, int>> edges);

// L = D - A. Symmetric, rows sum to zero.
Eigen::MatrixXd laplacian(const Graph& g);

struct CombinationMatrix {
  Eigen::MatrixXd entries;
  double tolerance = 1e-12;
};

// Validation report for one combination matrix against a graph.
struct MatrixCheck {
  double symmetry_defect = 0.0;   // max |a_kl - a_lk|
  double row_sum_defect = 0.0;    // max |row sum - 1|
  double spectral_radius = 0.0;
  bool sparsity_ok = true;        // nonzeros confined to edges + diagonal

  bool pass(double tol, bool require_spectral_radius) const {
    return symmetry_defect <= tol && row_sum_defect <= tol && sparsity_ok &&
           (!require_spectral_radius || spectral_radius <= 1.0 + tol);
  }
};

MatrixCheck check_combination_matrix(const Eigen::MatrixXd& a, const Graph& g);

// Metropolis-Hastings weights: a_kl = 1/(1 + max(d_k, d_l)) on edges, the
// diagonal absorbs the remainder. Validated before returning.
CombinationMatrix metropolis_weights(const Graph& g, double tolerance = 1e-12);

// Max |eigenvalue| after removing the eigenvalue-1 copy carried by the
// all-ones vector. Input must be symmetric.
double second_largest_eigenvalue(const CombinationMatrix& m);

// Plain-text edge list: first line "K", then one "u v" line per edge.
std::string to_edge_list(const Graph& g);
Graph parse_edge_list(const std::string& text);

}  // namespace ftcsim
