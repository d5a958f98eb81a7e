#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "ftcsim/ftc.hpp"
#include "ftcsim/linalg.hpp"
#include "oracles.hpp"

using namespace ftcsim;

namespace {

oracle::Mat to_oracle(const Eigen::MatrixXd& m) {
  oracle::Mat a = oracle::zeros(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) a[i][j] = m(i, j);
  return a;
}

double oracle_epsilon(const std::vector<Eigen::MatrixXd>& mats) {
  oracle::Mat p = to_oracle(mats[0]);
  for (std::size_t j = 1; j < mats.size(); ++j) p = oracle::matmul(to_oracle(mats[j]), p);
  return oracle::spectral_norm(oracle::sub(p, oracle::averaging(static_cast<int>(mats[0].rows()))));
}

}  // namespace

TEST_CASE("hypercube sequence: shape and exactness") {
  Graph h2 = build_graph(Topology::hypercube, 2);
  MatrixSequence s2 = hypercube_sequence(h2);
  CHECK(s2.length() == 1);
  CHECK(s2.matrix(0)(0, 0) == 0.5);
  CHECK(s2.matrix(0)(0, 1) == 0.5);
  CHECK(s2.epsilon() <= 1e-14);

  Graph h8 = build_graph(Topology::hypercube, 8);
  MatrixSequence s8 = hypercube_sequence(h8);
  CHECK(s8.length() == 3);
  for (int m = 0; m < 3; ++m)
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j) {
        double v = s8.matrix(m)(i, j);
        CHECK((v == 0.0 || v == 0.5));
      }
  CHECK(s8.epsilon() <= 1e-12);
  CHECK(oracle_epsilon(s8.matrices()) <= 1e-12);
  for (bool ok : s8.assumption3_ok()) CHECK(ok);

  CHECK_THROWS_AS(hypercube_sequence(build_graph(Topology::path, 8)), std::invalid_argument);
}

TEST_CASE("hypercube factors commute: every ordering is exact") {
  MatrixSequence s8 = hypercube_sequence(build_graph(Topology::hypercube, 8));
  std::vector<int> idx{0, 1, 2};
  do {
    std::vector<Eigen::MatrixXd> mats;
    for (int i : idx) mats.push_back(s8.matrix(i));
    CHECK(measure_epsilon(mats) <= 1e-12);
  } while (std::next_permutation(idx.begin(), idx.end()));
}

TEST_CASE("pairwise path sequence: exact for powers of two") {
  for (int k : {2, 4, 8, 16, 32}) {
    Graph g = build_graph(Topology::path, k);
    MatrixSequence s = path_pairwise_sequence(g);
    CHECK(s.length() == k - 1);
    CHECK(s.epsilon() <= 1e-13);
    Eigen::MatrixXd prod = s.product();
    CHECK((prod.array() - 1.0 / k).abs().maxCoeff() <= 1e-15);
    Assumption3Report rep = validate_assumption3(s, 1e-12);
    CHECK(rep.all_pass);
  }
  CHECK_THROWS_AS(path_pairwise_sequence(build_graph(Topology::path, 6)), std::invalid_argument);
  CHECK_THROWS_AS(path_pairwise_sequence(build_graph(Topology::ring, 8)), std::invalid_argument);
}

TEST_CASE("path-4 pairwise sequence is average, middle swap, average") {
  MatrixSequence s = path_pairwise_sequence(build_graph(Topology::path, 4));
  REQUIRE(s.length() == 3);
  Eigen::MatrixXd avg(4, 4), swp(4, 4);
  avg << 0.5, 0.5, 0, 0, 0.5, 0.5, 0, 0, 0, 0, 0.5, 0.5, 0, 0, 0.5, 0.5;
  swp << 1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 1;
  CHECK((s.matrix(0) - avg).cwiseAbs().maxCoeff() == 0.0);
  CHECK((s.matrix(1) - swp).cwiseAbs().maxCoeff() == 0.0);
  CHECK((s.matrix(2) - avg).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("laplacian factorization: exactness and flags") {
  Graph p2 = build_graph(Topology::path, 2);
  MatrixSequence s2 = laplacian_factorization(p2);
  CHECK(s2.length() == 1);
  CHECK(s2.matrix(0)(0, 0) == doctest::Approx(0.5));
  CHECK(s2.matrix(0)(0, 1) == doctest::Approx(0.5));

  Graph p8 = build_graph(Topology::path, 8);
  MatrixSequence s8 = laplacian_factorization(p8);
  CHECK(s8.length() == 7);
  CHECK(s8.epsilon() <= 1e-10);
  CHECK(oracle_epsilon(s8.matrices()) <= 1e-10);
  Assumption3Report rep = validate_assumption3(s8, 1e-12);
  bool some_radius_above_one = false;
  for (const auto& row : rep.rows) {
    CHECK(row.symmetry_defect <= 1e-12);
    CHECK(row.row_sum_defect <= 1e-11);
    if (row.spectral_radius > 1.0 + 1e-12) some_radius_above_one = true;
  }
  CHECK(some_radius_above_one);
  CHECK(!rep.all_pass);

  Graph r4 = build_graph(Topology::ring, 4);
  Eigen::VectorXd ev = symmetric_eigenvalues(laplacian(r4));
  CHECK(ev(1) == doctest::Approx(2.0));
  CHECK(ev(2) == doctest::Approx(2.0));
  CHECK(ev(3) == doctest::Approx(4.0));
  MatrixSequence sr = laplacian_factorization(r4);
  CHECK(sr.length() == 3);  // one factor per nonzero eigenvalue instance
  CHECK(sr.epsilon() <= 1e-10);

  CHECK_THROWS_AS(laplacian_factorization(custom_graph(4, {{0, 1}, {2, 3}})), std::invalid_argument);
}

TEST_CASE("laplacian factorization orderings both reach the averaging matrix") {
  Graph p8 = build_graph(Topology::path, 8);
  CHECK(laplacian_factorization(p8, EigOrdering::descending).epsilon() <= 1e-10);
  CHECK(laplacian_factorization(p8, EigOrdering::ascending).epsilon() <= 1e-10);
}

TEST_CASE("measure_epsilon basics") {
  std::vector<Eigen::MatrixXd> ident(3, Eigen::MatrixXd::Identity(8, 8));
  CHECK(measure_epsilon(ident) == doctest::Approx(1.0).epsilon(1e-12));

  std::vector<Eigen::MatrixXd> avg{Eigen::MatrixXd::Constant(8, 8, 1.0 / 8)};
  CHECK(measure_epsilon(avg) <= 1e-14);

  std::vector<Eigen::MatrixXd> bad{Eigen::MatrixXd::Identity(3, 3), Eigen::MatrixXd::Identity(4, 4)};
  CHECK_THROWS_AS(measure_epsilon(bad), std::invalid_argument);
  CHECK_THROWS_AS(measure_epsilon({}), std::invalid_argument);
}

TEST_CASE("cycling convention: iteration 1 applies the first matrix") {
  MatrixSequence s = hypercube_sequence(build_graph(Topology::hypercube, 8));
  CHECK(&s.matrix_for_iteration(1) == &s.matrix(0));
  CHECK(&s.matrix_for_iteration(3) == &s.matrix(2));
  CHECK(&s.matrix_for_iteration(4) == &s.matrix(0));
  CHECK(&s.matrix_for_iteration(0) == &s.matrix(2));  // position just before iteration 1
}

TEST_CASE("perturb_to_target hits the requested epsilon and keeps the invariants") {
  Graph p8 = build_graph(Topology::path, 8);
  MatrixSequence base = path_pairwise_sequence(p8);
  for (double target : {0.3, 0.6}) {
    MatrixSequence pert = perturb_to_target(base, target, 1, 0.01);
    CHECK(pert.epsilon() >= target - 0.01);
    CHECK(pert.epsilon() <= target + 0.01);
    for (int m = 0; m < pert.length(); ++m) {
      const auto& a = pert.matrix(m);
      CHECK((a - a.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
      CHECK((a.rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-12);
      // sparsity: perturbation only touches entries that were already nonzero
      for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j)
          if (i != j && base.matrix(m)(i, j) == 0.0) CHECK(a(i, j) == 0.0);
    }
  }
}

TEST_CASE("perturb_to_target is deterministic in the seed and validates inputs") {
  MatrixSequence base = path_pairwise_sequence(build_graph(Topology::path, 8));
  MatrixSequence a = perturb_to_target(base, 0.3, 7, 0.01);
  MatrixSequence b = perturb_to_target(base, 0.3, 7, 0.01);
  for (int m = 0; m < a.length(); ++m)
    CHECK((a.matrix(m) - b.matrix(m)).cwiseAbs().maxCoeff() == 0.0);

  MatrixSequence pert = perturb_to_target(base, 0.3, 1, 0.01);
  CHECK_THROWS_AS(perturb_to_target(pert, 0.2, 1, 0.01), std::invalid_argument);
  CHECK_THROWS_AS(perturb_to_target(base, 1.0, 1, 0.01), std::invalid_argument);
  CHECK_THROWS_AS(perturb_to_target(base, 0.3, 1, 0.0), std::invalid_argument);
}

TEST_CASE("zero perturbation amplitude returns the input") {
  MatrixSequence base = hypercube_sequence(build_graph(Topology::hypercube, 8));
  MatrixSequence same = perturbed_with_amplitude(base, 0.0, 123);
  for (int m = 0; m < base.length(); ++m)
    CHECK((base.matrix(m) - same.matrix(m)).cwiseAbs().maxCoeff() == 0.0);
  CHECK(same.epsilon() == doctest::Approx(base.epsilon()).epsilon(1e-12));
}

TEST_CASE("truncate takes a prefix and recomputes epsilon from scratch") {
  Graph p8 = build_graph(Topology::path, 8);
  MatrixSequence lap = laplacian_factorization(p8);  // descending by default

  MatrixSequence full = truncate(lap, 7);
  CHECK(full.length() == 7);
  CHECK(full.epsilon() <= 1e-10);

  MatrixSequence t3 = truncate(lap, 3);
  CHECK(t3.length() == 3);
  CHECK(t3.epsilon() == doctest::Approx(oracle_epsilon(t3.matrices())).epsilon(1e-12));
  CHECK(t3.epsilon() == doctest::Approx(0.86709).epsilon(1e-4));

  CHECK_THROWS_AS(truncate(lap, 0), std::invalid_argument);
  CHECK_THROWS_AS(truncate(lap, 8), std::invalid_argument);
}

TEST_CASE("min-epsilon subset beats the plain prefix on the path-8 factorization") {
  MatrixSequence lap = laplacian_factorization(build_graph(Topology::path, 8));
  MatrixSequence best = select_min_epsilon_subset(lap, 3);
  CHECK(best.length() == 3);
  CHECK(best.epsilon() < truncate(lap, 3).epsilon());
  CHECK(best.epsilon() == doctest::Approx(0.65328).epsilon(1e-4));
}

TEST_CASE("prefix epsilon equals the brute-force product norm for random prefixes") {
  MatrixSequence pert =
      perturb_to_target(path_pairwise_sequence(build_graph(Topology::path, 8)), 0.4, 5, 0.02);
  for (int n : {1, 3, 5, 7}) {
    MatrixSequence t = truncate(pert, n);
    CHECK(t.epsilon() >= 0.0);
    CHECK(t.epsilon() == doctest::Approx(oracle_epsilon(t.matrices())).epsilon(1e-11));
  }
}

TEST_CASE("repeated cycles stay close to the averaging matrix") {
  // || P^m - J || <= m eps (1 + eps)^(m-1) with P the one-period product
  auto check_seq = [](const MatrixSequence& s, double slack) {
    Eigen::MatrixXd p = s.product();
    const int k = s.graph().node_count;
    Eigen::MatrixXd j = Eigen::MatrixXd::Constant(k, k, 1.0 / k);
    double eps = s.epsilon();
    Eigen::MatrixXd pm = p;
    for (int m = 2; m <= 3; ++m) {
      pm = p * pm;
      double lhs = spectral_norm(pm - j);
      double rhs = m * eps * std::pow(1.0 + eps, m - 1);
      CHECK(lhs <= rhs + slack);
    }
  };
  check_seq(hypercube_sequence(build_graph(Topology::hypercube, 8)), 1e-12);
  check_seq(perturb_to_target(path_pairwise_sequence(build_graph(Topology::path, 8)), 0.3, 1, 0.01),
            1e-12);
}

TEST_CASE("metropolis as a length-1 sequence passes the per-matrix checks") {
  Graph p8 = build_graph(Topology::path, 8);
  CombinationMatrix m = metropolis_weights(p8);
  MatrixSequence s = MatrixSequence::from_matrices(p8, {m.entries});
  Assumption3Report rep = validate_assumption3(s, 1e-12);
  CHECK(rep.all_pass);
  CHECK(s.epsilon() == doctest::Approx(second_largest_eigenvalue(m)).epsilon(1e-10));
}

TEST_CASE("sequence file round trip") {
  MatrixSequence pert =
      perturb_to_target(path_pairwise_sequence(build_graph(Topology::path, 8)), 0.3, 1, 0.01);
  MatrixSequence back = parse_sequence(write_sequence(pert));
  CHECK(back.length() == pert.length());
  for (int m = 0; m < pert.length(); ++m)
    CHECK((back.matrix(m) - pert.matrix(m)).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.epsilon() == doctest::Approx(pert.epsilon()).epsilon(1e-14));
  CHECK_THROWS_AS(parse_sequence("garbage"), std::invalid_argument);
}

TEST_CASE("from_matrices rejects malformed sequences") {
  Graph p4 = build_graph(Topology::path, 4);
  Eigen::MatrixXd off = Eigen::MatrixXd::Identity(4, 4);
  off(0, 3) = 0.1;  // not a path edge
  CHECK_THROWS_AS(MatrixSequence::from_matrices(p4, {off}), std::invalid_argument);
  CHECK_THROWS_AS(MatrixSequence::from_matrices(p4, {}), std::invalid_argument);
  CHECK_THROWS_AS(MatrixSequence::from_matrices(p4, {Eigen::MatrixXd::Identity(3, 3)}),
                  std::invalid_argument);
}
