#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ftcsim/ftc.hpp"
#include "ftcsim/problem.hpp"

namespace ftcsim {

enum class GradientMode { stochastic, deterministic };

struct DivergenceError : std::runtime_error {
  explicit DivergenceError(int iter)
      : std::runtime_error("divergence: non-finite value at iteration " + std::to_string(iter)),
        iteration(iter) {}
  int iteration;
};

// Stacked per-agent models W (K x M), gradient trackers G (K x M) and the
// gradient estimate cached at the current models. After init, G = mu * grad,
// and every step evaluates exactly one new stochastic gradient per agent,
// reusing the cache for the previous iterate.
struct NetworkState {
  Eigen::MatrixXd models;
  Eigen::MatrixXd trackers;
  Eigen::MatrixXd last_grad;
  int iter = 0;
};

// One gradient row per agent at the given stacked models. In stochastic mode
// draws one sample index per agent from rng (recorded if a record is given);
// in deterministic mode uses full gradients.
Eigen::MatrixXd gradient_rows(const LeastSquaresProblem& p, const Eigen::MatrixXd& models,
                              Rng* rng, GradientMode mode, std::vector<int>* record);

NetworkState init_state(const LeastSquaresProblem& p, double mu, const Eigen::MatrixXd& w0,
                        Rng* rng, GradientMode mode, std::vector<int>* record = nullptr);

// W_i = A (W_{i-1} - G_{i-1});  G_i = A (G_{i-1} + mu (grad(W_i) - grad(W_{i-1})))
// with A the cycle matrix for iteration i. Throws DivergenceError on
// non-finite values.
void step(NetworkState& s, const LeastSquaresProblem& p, const MatrixSequence& seq, double mu,
          Rng* rng, GradientMode mode, std::vector<int>* record = nullptr);

// Companion recursion in the (W, Y) variables; Y_0 = G_0 - mu A_0 grad(W_0)
// with A_0 the cycle matrix at position of iteration 0. Advancing to
// iteration i consumes the gradient at its own W_{i-1}, evaluated on the
// sample indices the paired primal run recorded there, so both recursions see
// the same stochastic gradients.
struct TransformedState {
  Eigen::MatrixXd models;  // W
  Eigen::MatrixXd aux;     // Y
  int iter = 0;
};

TransformedState init_transformed(const NetworkState& s0, const MatrixSequence& seq, double mu);

void transformed_step(TransformedState& t, const LeastSquaresProblem& p, const MatrixSequence& seq,
                      double mu, GradientMode mode, const std::vector<int>* recorded_samples);

// Z_i = Y_i + mu A_i grad(W_{c,i}) with true gradients at the centroid.
Eigen::MatrixXd transformed_z(const TransformedState& t, const LeastSquaresProblem& p,
                              const MatrixSequence& seq, double mu);

struct Metrics {
  double msd = 0.0;           // (1/K) sum_k ||w_k - w^o||^2
  double centroid_err = 0.0;  // ||w^o - centroid||^2
  double consensus_w = 0.0;   // ||W - 1 centroid^T||_F^2
  double consensus_z = 0.0;   // same for Z; valid only when has_z
  bool has_z = false;
  double consensus_x = 0.0;   // consensus_w + consensus_z (or consensus_w alone, flagged by has_z)
};

Metrics measure(const Eigen::MatrixXd& models, const Eigen::VectorXd& w_opt,
                const Eigen::MatrixXd* z = nullptr);

struct TrajectoryPoint {
  double msd = 0.0;
  double centroid_err = 0.0;
  double consensus_w = 0.0;
  std::optional<double> consensus_z;
  std::optional<double> equiv_defect;
};

struct Trajectory {
  std::vector<TrajectoryPoint> points;  // length iters+1 unless diverged
  std::optional<int> diverged_at;
  bool diagnostics = false;
  // structural-identity defects, maxima over all iterations of the run
  double max_tracking_defect = 0.0;    // || mean g - mu mean grad ||
  double max_centroid_residual = 0.0;  // centroid recursion residual
  double max_ones_y_defect = 0.0;      // || 1^T Y ||, diagnostics only
  double max_equiv_defect = 0.0;       // max-norm primal/transformed gap, diagnostics only
};

// Runs the recursion for a fixed horizon. With diagnostics on, a paired
// transformed recursion replays the recorded sample indices and the
// trajectory carries consensus_z and the per-iteration equivalence defect.
Trajectory run(const LeastSquaresProblem& p, const MatrixSequence& seq, double mu, int iters,
               std::uint64_t seed, GradientMode mode, bool diagnostics,
               const Eigen::VectorXd& w_opt, const Eigen::MatrixXd* w0 = nullptr);

// CSV with header "iter,msd,centroid_err,consensus_w,consensus_z,equiv_defect";
// absent diagnostic columns are left empty.
std::string trajectory_csv(const Trajectory& t);

}  // namespace ftcsim
