#include <doctest.h>

#include <cmath>
#include <queue>

#include "ftcsim/graph.hpp"
#include "ftcsim/linalg.hpp"
#include "oracles.hpp"

using namespace ftcsim;

namespace {

int diameter(const Graph& g) {
  std::vector<std::vector<int>> adj(g.node_count);
  for (auto [u, v] : g.edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  int best = 0;
  for (int s = 0; s < g.node_count; ++s) {
    std::vector<int> dist(g.node_count, -1);
    std::queue<int> q;
    q.push(s);
    dist[s] = 0;
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (int w : adj[u])
        if (dist[w] < 0) {
          dist[w] = dist[u] + 1;
          q.push(w);
        }
    }
    for (int d : dist) best = std::max(best, d);
  }
  return best;
}

oracle::Mat to_oracle(const Eigen::MatrixXd& m) {
  oracle::Mat a = oracle::zeros(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) a[i][j] = m(i, j);
  return a;
}

}  // namespace

TEST_CASE("built-in topologies have the expected shape") {
  Graph p8 = build_graph(Topology::path, 8);
  CHECK(p8.edges.size() == 7);
  for (int i = 0; i < 7; ++i) CHECK(p8.has_edge(i, i + 1));
  CHECK(diameter(p8) == 7);
  CHECK(p8.connected());

  Graph r8 = build_graph(Topology::ring, 8);
  CHECK(r8.edges.size() == 8);
  CHECK(r8.has_edge(0, 7));

  Graph h8 = build_graph(Topology::hypercube, 8);
  CHECK(h8.edges.size() == 12);
  for (int d : h8.degrees()) CHECK(d == 3);
  // the dimension-j neighbor is index xor 2^j
  CHECK(h8.has_edge(5, 5 ^ 1));
  CHECK(h8.has_edge(5, 5 ^ 2));
  CHECK(h8.has_edge(5, 5 ^ 4));

  Graph c4 = build_graph(Topology::complete, 4);
  CHECK(c4.edges.size() == 6);
}

TEST_CASE("invalid constructions are rejected by name") {
  CHECK_THROWS_WITH_AS(build_graph(Topology::hypercube, 6),
                       "hypercube: K must be a power of two (K >= 2)", std::invalid_argument);
  CHECK_THROWS_AS(build_graph(Topology::path, 0), std::invalid_argument);
  CHECK_THROWS_AS(custom_graph(3, {{0, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(custom_graph(3, {{0, 5}}), std::invalid_argument);
  CHECK_THROWS_AS(custom_graph(3, {{0, 1}, {1, 0}}), std::invalid_argument);
}

TEST_CASE("laplacian basics") {
  Graph p2 = build_graph(Topology::path, 2);
  Eigen::MatrixXd l2 = laplacian(p2);
  CHECK(l2(0, 0) == 1.0);
  CHECK(l2(0, 1) == -1.0);
  CHECK(l2(1, 0) == -1.0);
  CHECK(l2(1, 1) == 1.0);

  Graph h8 = build_graph(Topology::hypercube, 8);
  Eigen::MatrixXd l8 = laplacian(h8);
  for (int i = 0; i < 8; ++i) CHECK(l8(i, i) == 3.0);
  CHECK((l8.rowwise().sum()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("path-8 laplacian spectrum matches the closed form and an independent eigensolver") {
  Graph p8 = build_graph(Topology::path, 8);
  Eigen::MatrixXd l = laplacian(p8);
  Eigen::VectorXd ev = symmetric_eigenvalues(l);
  auto jac = oracle::jacobi_eigenvalues(to_oracle(l));
  const double pi = 3.14159265358979323846;
  for (int j = 0; j < 8; ++j) {
    double closed = 2.0 - 2.0 * std::cos(j * pi / 8.0);
    CHECK(ev(j) == doctest::Approx(closed).epsilon(1e-10));
    CHECK(jac[j] == doctest::Approx(closed).epsilon(1e-10));
  }
}

TEST_CASE("metropolis weights: hand cases") {
  Graph p2 = build_graph(Topology::path, 2);
  CombinationMatrix m2 = metropolis_weights(p2);
  CHECK(m2.entries(0, 0) == doctest::Approx(0.5));
  CHECK(m2.entries(0, 1) == doctest::Approx(0.5));

  Graph c4 = build_graph(Topology::complete, 4);
  CombinationMatrix m4 = metropolis_weights(c4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(m4.entries(i, j) == doctest::Approx(0.25));
}

TEST_CASE("metropolis second-largest eigenvalue on the 8-agent path is about 0.95") {
  Graph p8 = build_graph(Topology::path, 8);
  double lam = second_largest_eigenvalue(metropolis_weights(p8));
  CHECK(lam == doctest::Approx(0.95).epsilon(0.011));
  CHECK(lam == doctest::Approx(0.9492532).epsilon(1e-5));
}

TEST_CASE("second-largest eigenvalue special cases") {
  CombinationMatrix avg{Eigen::MatrixXd::Constant(5, 5, 0.2), 1e-12};
  CHECK(second_largest_eigenvalue(avg) == doctest::Approx(0.0).epsilon(1e-12));

  CombinationMatrix eye{Eigen::MatrixXd::Identity(4, 4), 1e-12};
  CHECK(second_largest_eigenvalue(eye) == doctest::Approx(1.0));

  Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(3, 3);
  bad(0, 1) = 0.5;
  CHECK_THROWS_AS(second_largest_eigenvalue(CombinationMatrix{bad, 1e-12}), std::invalid_argument);
}

TEST_CASE("metropolis satisfies every combination-matrix invariant across topologies") {
  std::vector<Graph> graphs;
  for (int k : {2, 3, 5, 16, 64}) graphs.push_back(build_graph(Topology::path, k));
  for (int k : {3, 4, 6, 64}) graphs.push_back(build_graph(Topology::ring, k));
  for (int k : {2, 4, 8, 16, 64}) graphs.push_back(build_graph(Topology::hypercube, k));
  for (int k : {2, 3, 4, 16}) graphs.push_back(build_graph(Topology::complete, k));
  for (const auto& g : graphs) {
    CombinationMatrix m = metropolis_weights(g);
    MatrixCheck c = check_combination_matrix(m.entries, g);
    CHECK(c.pass(1e-12, true));
    CHECK((laplacian(g) * Eigen::VectorXd::Ones(g.node_count)).cwiseAbs().maxCoeff() <= 1e-12);
    double lam = second_largest_eigenvalue(m);
    CHECK(lam >= 0.0);
    CHECK(lam <= 1.0 + 1e-10);
  }
}

TEST_CASE("disconnected graphs are rejected") {
  Graph disc = custom_graph(4, {{0, 1}, {2, 3}});
  CHECK(!disc.connected());
  CHECK_THROWS_AS(metropolis_weights(disc), std::invalid_argument);
}

TEST_CASE("edge-list round trip") {
  Graph h8 = build_graph(Topology::hypercube, 8);
  Graph back = parse_edge_list(to_edge_list(h8));
  CHECK(back.node_count == 8);
  CHECK(back.edges == h8.edges);
  CHECK_THROWS_AS(parse_edge_list("not a graph"), std::invalid_argument);
}
