#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ftcsim/graph.hpp"

namespace ftcsim {

struct Assumption3Report {
  struct Row {
    double symmetry_defect = 0.0;
    double row_sum_defect = 0.0;
    double spectral_radius = 0.0;
    bool pass = false;
  };
  std::vector<Row> rows;
  double tolerance = 1e-12;
  bool all_pass = false;

  std::string to_text() const;
};

// Ordered list A_1 ... A_tau of combination matrices sharing one graph
// sparsity pattern, with the measured distance of their product from the
// exact averaging matrix cached. Immutable once built.
//
// Cycling convention: iteration i >= 1 applies matrix (i-1) mod tau, so the
// first full period applies A_1, ..., A_tau in order and their product at
// i = tau is A_tau ... A_2 A_1.
class MatrixSequence {
 public:
  static MatrixSequence from_matrices(Graph g, std::vector<Eigen::MatrixXd> mats,
                                      double tolerance = 1e-12);

  const Graph& graph() const { return graph_; }
  int length() const { return static_cast<int>(mats_.size()); }  // tau
  double epsilon() const { return epsilon_; }
  double tolerance() const { return tolerance_; }

  const Eigen::MatrixXd& matrix(int j) const { return mats_.at(j); }  // A_{j+1}
  const std::vector<Eigen::MatrixXd>& matrices() const { return mats_; }
  const std::vector<bool>& assumption3_ok() const { return assumption3_ok_; }

  // Matrix applied at iteration i under the cycling convention; i = 0 maps to
  // the last matrix of the cycle (the position "one before" iteration 1).
  const Eigen::MatrixXd& matrix_for_iteration(int iter) const;

  // A_tau * ... * A_1
  Eigen::MatrixXd product() const;

 private:
  MatrixSequence() = default;
  Graph graph_;
  std::vector<Eigen::MatrixXd> mats_;
  std::vector<bool> assumption3_ok_;
  double epsilon_ = 0.0;
  double tolerance_ = 1e-12;
};

// || A_tau ... A_1 - (1/K) 11^T || (spectral norm). mats[0] is A_1.
double measure_epsilon(const std::vector<Eigen::MatrixXd>& mats);

// Exact constructions ------------------------------------------------------

// Hypercube: tau = d matrices, A_j = (I + P_j)/2 with P_j the dimension-j
// swap. The factors commute and their product is exactly (1/K) 11^T.
MatrixSequence hypercube_sequence(const Graph& g);

// Path with K = 2^d nodes: tau = K-1 matrices built from pairwise-averaging
// matchings and interleaving swap matchings. Every matrix is doubly
// stochastic with spectral radius one, and the product is exactly
// (1/K) 11^T. Merges adjacent blocks of size b = 1, 2, 4, ... : b-1 swap
// rounds interleave the two blocks, then one averaging round halves them.
MatrixSequence path_pairwise_sequence(const Graph& g);

// Complete graph: the single matrix (1/K) 11^T.
MatrixSequence averaging_sequence(const Graph& g);

// Spectral factorization A_j = I - L/lambda_j over the K-1 nonzero Laplacian
// eigenvalue instances (duplicates each get a factor). Factors are symmetric
// and graph-sparse with unit row sums but may have spectral radius > 1;
// they are flagged, not rejected.
enum class EigOrdering { descending, ascending };
MatrixSequence laplacian_factorization(const Graph& g, EigOrdering ordering = EigOrdering::descending);

// Derived sequences ---------------------------------------------------------

// Internal step of perturb_to_target, exposed for tests: symmetric noise
// amplitude*u on every off-diagonal nonzero, diagonals adjusted to keep unit
// row sums. u draws depend only on rng_seed and the sparsity pattern; draws
// at a polytope boundary are flipped inward.
MatrixSequence perturbed_with_amplitude(const MatrixSequence& seq, double amplitude,
                                        std::uint64_t rng_seed);

// Scales one noise pattern by bisection until the measured epsilon lands in
// [target_eps - tol, target_eps + tol]. The amplitude is capped where an
// entry would leave [0, 1], so perturbed matrices stay doubly stochastic and
// keep spectral radius <= 1; an unreachable target reports the achievable
// range instead.
MatrixSequence perturb_to_target(const MatrixSequence& seq, double target_eps,
                                 std::uint64_t rng_seed, double tol);

// First tau_prime matrices; epsilon recomputed from scratch.
MatrixSequence truncate(const MatrixSequence& seq, int tau_prime);

// Subsequence of length tau_prime with the smallest measured epsilon
// (brute-force over index subsets, relative order preserved).
MatrixSequence select_min_epsilon_subset(const MatrixSequence& seq, int tau_prime);

Assumption3Report validate_assumption3(const MatrixSequence& seq, double tol = 1e-12);

// Text format: header "K tau epsilon", then tau blocks of K rows of K
// decimals at 17 significant digits.
std::string write_sequence(const MatrixSequence& seq);
MatrixSequence parse_sequence(const std::string& text);

}  // namespace ftcsim
