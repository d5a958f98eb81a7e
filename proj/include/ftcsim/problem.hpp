#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "ftcsim/rng.hpp"

namespace ftcsim {

// Per-agent linear regression data: labels follow gamma = h^T w_true + v with
// v drawn once at generation. The dataset is fixed; stochastic gradients only
// resample the index.
struct LeastSquaresProblem {
  int agents = 0;       // K
  int dim = 0;          // M
  int samples = 0;      // N per agent
  double noise_variance = 0.0;
  std::uint64_t seed = 0;
  std::vector<Eigen::MatrixXd> features;  // per agent, N x M
  std::vector<Eigen::VectorXd> labels;    // per agent, N
  Eigen::VectorXd w_true;
};

// Draw order (fixed for reproducibility): w_true, then per agent features
// row-major, then that agent's label noise. Regenerates from a derived seed
// in the unlikely event the aggregate Hessian is numerically singular.
LeastSquaresProblem generate_problem(int agents, int dim, int samples, double noise_variance,
                                     std::uint64_t seed);

// (1/N) sum_n h_n (h_n^T w - gamma_n), accumulated sample by sample so the
// exact enumeration mean of single-sample gradients reproduces it bitwise.
Eigen::VectorXd full_gradient(const LeastSquaresProblem& p, int agent, const Eigen::VectorXd& w);

// Single-sample gradient h_n (h_n^T w - gamma_n).
Eigen::VectorXd sample_gradient(const LeastSquaresProblem& p, int agent, const Eigen::VectorXd& w,
                                int sample);

// Uniformly drawn sample index from the caller's stream.
Eigen::VectorXd stochastic_gradient(const LeastSquaresProblem& p, int agent,
                                    const Eigen::VectorXd& w, Rng& rng);

double objective(const LeastSquaresProblem& p, int agent, const Eigen::VectorXd& w);

// Exact single-sample gradient-noise second moment at w:
// (1/N) sum_n || g_n(w) - full_gradient(w) ||^2.
double noise_second_moment(const LeastSquaresProblem& p, int agent, const Eigen::VectorXd& w);

struct ProblemConstants {
  double nu = 0.0;        // strong convexity of the aggregate objective
  double delta = 0.0;     // max local Lipschitz constant
  double zeta_sq = 0.0;   // sum_k ||w_k^o - w^o||^2
  double sigma_sq = 0.0;  // sum_k sigma_k^2
  double beta_sq = 0.0;   // sum_k beta_k^2
  std::vector<double> sigma_k_sq;
  std::vector<double> beta_k_sq;
  bool local_hessian_singular = false;  // minimum-norm local solve was used
};

struct Optima {
  Eigen::VectorXd global;               // w^o
  std::vector<Eigen::VectorXd> local;   // w_k^o
  ProblemConstants constants;
};

// Probe set used to fit beta_k: 200 unit directions around the local optimum
// at radii {0.1, 1, 10}, derived deterministically from the problem seed.
std::vector<Eigen::VectorXd> variance_probe_points(const LeastSquaresProblem& p, int agent,
                                                   const Eigen::VectorXd& local_opt);

Optima optima_and_constants(const LeastSquaresProblem& p);

// CSV-block serialization for reproducibility audits (17 significant digits,
// exact round trip).
std::string problem_to_csv(const LeastSquaresProblem& p);
LeastSquaresProblem problem_from_csv(const std::string& text);

}  // namespace ftcsim
