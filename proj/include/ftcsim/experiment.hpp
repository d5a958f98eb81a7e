#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ftcsim/bounds.hpp"
#include "ftcsim/ftc.hpp"
#include "ftcsim/graph.hpp"
#include "ftcsim/optimizer.hpp"
#include "ftcsim/problem.hpp"

namespace ftcsim {

enum class SequenceKind { exact, perturbed, truncated, metropolis };
enum class SequenceConstruction { automatic, hypercube, pairwise, laplacian, averaging };
enum class SubsetSelection { prefix, min_eps };

struct SequenceSpec {
  SequenceKind kind = SequenceKind::exact;
  SequenceConstruction construction = SequenceConstruction::automatic;
  EigOrdering ordering = EigOrdering::descending;
  double target_eps = 0.0;     // perturbed
  double tol = 0.01;           // perturbed
  std::uint64_t seed = 1;      // perturbed noise draws
  int tau_prime = 1;           // truncated
  SubsetSelection selection = SubsetSelection::prefix;  // truncated

  bool operator==(const SequenceSpec&) const = default;
};

struct ProblemSpec {
  int dim = 20;          // M
  int samples = 30;      // N
  double noise_variance = 0.1;
  std::uint64_t seed = 1;

  bool operator==(const ProblemSpec&) const = default;
};

struct OptimizerSpec {
  double mu = 8e-3;
  int iterations = 5000;
  GradientMode mode = GradientMode::stochastic;
  bool diagnostics = false;
  std::string w0 = "zero";  // "zero" | "gaussian"
  double w0_scale = 1.0;
  std::uint64_t w0_seed = 1;

  bool operator==(const OptimizerSpec&) const = default;
};

struct MonteCarloSpec {
  int runs = 1;
  std::uint64_t seed_base = 0;

  bool operator==(const MonteCarloSpec&) const = default;
};

struct OutputSpec {
  std::string directory = "out";
  bool db = true;

  bool operator==(const OutputSpec&) const = default;
};

struct ExperimentConfig {
  Topology topology = Topology::path;
  int agents = 8;  // K
  SequenceSpec sequence;
  ProblemSpec problem;
  OptimizerSpec optimizer;
  MonteCarloSpec monte_carlo;
  OutputSpec output;

  bool operator==(const ExperimentConfig&) const = default;
};

// JSON round trip. Unknown keys are rejected with the offending key named;
// omitted keys take the defaults above (topology and K are required).
ExperimentConfig load_config(const std::string& path);
ExperimentConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const ExperimentConfig& cfg);

// Resolves the configured matrix sequence for a graph. "automatic" picks the
// exact construction per topology: complete -> single averaging matrix,
// hypercube -> dimension sweep, power-of-two path -> pairwise merge sequence,
// anything else -> Laplacian factorization.
MatrixSequence build_sequence(const Graph& g, const SequenceSpec& spec);

struct SequenceCertificate {
  int tau = 0;
  double epsilon = 0.0;
  std::string assumption3;
  bool assumption3_all_pass = false;
};

struct RunResult {
  ExperimentConfig config;
  std::string error;  // nonempty when the configuration itself failed (sweep keeps going)
  // pointwise means over completed runs
  std::vector<double> mean_msd;
  std::vector<double> mean_centroid_err;
  std::vector<double> mean_consensus_w;
  std::vector<double> mean_consensus_z;  // empty unless diagnostics were on
  std::vector<double> per_run_steady;    // per-run steady-state MSD
  double steady_mean = 0.0;
  double steady_se = 0.0;  // sample std / sqrt(runs)
  SequenceCertificate certificate;
  BoundInputs bound_inputs;
  std::string bound_report_text;
  double steady_bound = 0.0;
  std::vector<int> diverged_runs;
  double max_tracking_defect = 0.0;
  double max_centroid_residual = 0.0;
  double max_ones_y_defect = 0.0;
  double max_equiv_defect = 0.0;
};

// Steady-state window: the final fifth of the series (at least one point).
std::size_t steady_window_start(std::size_t series_length);

RunResult run_experiment(const ExperimentConfig& cfg);

// Writes metrics.csv, result.txt, bounds.txt, certificate.txt, config.json
// and plot.svg into dir.
void write_result(const RunResult& r, const std::string& dir);

enum class SweepAxis { eps, tau, mu };
SweepAxis sweep_axis_from_string(const std::string& s);

// One result per value with shared problem data and shared run seeds across
// values. eps perturbs the exact sequence (0 keeps it exact), tau truncates
// it, mu rescales the step size. A value whose configuration fails (say an
// unreachable target epsilon) yields a result carrying the error message and
// the sweep continues; an empty or out-of-domain value list throws.
std::vector<RunResult> sweep(const ExperimentConfig& base, SweepAxis axis,
                             const std::vector<double>& values);

void write_sweep(const std::vector<RunResult>& results, const std::vector<std::string>& labels,
                 const std::string& dir);

// Figure presets: labeled config lists. fig2 = eps in {0, 0.3, 0.6} on a
// 16-agent path; fig3 = tau in {1, 4, 15} across complete/hypercube/path at
// 16 agents; fig4a = hypercube-8 sequence vs Metropolis (deterministic);
// fig4b = path-8 exact tau=7 vs truncated tau'=3 vs Metropolis (deterministic).
std::vector<std::pair<std::string, ExperimentConfig>> preset(const std::string& name);

// Runs every config of a preset into dir/<label> plus a combined plot and
// summary.csv in dir.
std::vector<RunResult> run_preset(const std::string& name, const std::string& dir);

void emit_plot(const RunResult& r, const std::string& path);
void emit_combined_plot(const std::vector<RunResult>& results,
                        const std::vector<std::string>& labels, const std::string& path);

}  // namespace ftcsim
