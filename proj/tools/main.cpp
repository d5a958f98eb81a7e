#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ftcsim/bounds.hpp"
#include "ftcsim/experiment.hpp"
#include "ftcsim/ftc.hpp"
#include "ftcsim/graph.hpp"

namespace {

using namespace ftcsim;

void write_or_print(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::cout << content;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + out_path);
    out << content;
  }
}

std::vector<double> parse_values(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

SequenceConstruction parse_construction(const std::string& s) {
  if (s == "auto") return SequenceConstruction::automatic;
  if (s == "hypercube") return SequenceConstruction::hypercube;
  if (s == "pairwise") return SequenceConstruction::pairwise;
  if (s == "laplacian") return SequenceConstruction::laplacian;
  if (s == "averaging") return SequenceConstruction::averaging;
  throw std::invalid_argument("unknown construction: " + s);
}

EigOrdering parse_ordering(const std::string& s) {
  if (s == "descending") return EigOrdering::descending;
  if (s == "ascending") return EigOrdering::ascending;
  throw std::invalid_argument("unknown ordering: " + s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"decentralized gradient tracking with finite-time consensus sequences"};
  app.require_subcommand(1);

  auto* graph_cmd = app.add_subcommand("graph", "emit a topology as a plain-text edge list");
  std::string g_kind = "path", g_out;
  int g_nodes = 8;
  graph_cmd->add_option("--kind", g_kind, "path|ring|hypercube|complete");
  graph_cmd->add_option("--K", g_nodes, "number of agents");
  graph_cmd->add_option("--out", g_out, "output file (default stdout)");

  auto* ftc_cmd = app.add_subcommand("ftc", "build or load a combination-matrix sequence and report on it");
  std::string f_kind = "path", f_construction = "auto", f_ordering = "descending", f_out, f_in;
  int f_nodes = 8, f_truncate = 0;
  double f_perturb = 0.0, f_tol = 0.01;
  std::uint64_t f_seed = 1;
  bool f_min_eps = false, f_metropolis = false;
  ftc_cmd->add_option("--in", f_in, "validate an existing sequence file instead of building one");
  ftc_cmd->add_option("--kind", f_kind, "path|ring|hypercube|complete");
  ftc_cmd->add_option("--K", f_nodes, "number of agents");
  ftc_cmd->add_option("--construction", f_construction, "auto|hypercube|pairwise|laplacian|averaging");
  ftc_cmd->add_option("--ordering", f_ordering, "descending|ascending (laplacian factors)");
  ftc_cmd->add_flag("--metropolis", f_metropolis, "use the Metropolis matrix as a length-1 sequence");
  ftc_cmd->add_option("--perturb", f_perturb, "perturb to this target epsilon");
  ftc_cmd->add_option("--tol", f_tol, "perturbation tolerance on epsilon");
  ftc_cmd->add_option("--seed", f_seed, "perturbation noise seed");
  ftc_cmd->add_option("--truncate", f_truncate, "keep this many matrices");
  ftc_cmd->add_flag("--min-eps", f_min_eps, "pick the minimum-epsilon subset when truncating");
  ftc_cmd->add_option("--out", f_out, "write the sequence file here");

  auto* run_cmd = app.add_subcommand("run", "run an experiment from a JSON config or a preset");
  std::string r_config, r_preset, r_out;
  std::uint64_t r_seed = 0;
  bool r_seed_set = false;
  run_cmd->add_option("--config", r_config, "JSON config path");
  run_cmd->add_option("--preset", r_preset, "fig2|fig3|fig4a|fig4b");
  run_cmd->add_option("--out", r_out, "output directory (overrides config)");
  run_cmd->add_option("--seed", r_seed, "Monte-Carlo seed base (overrides config)")
      ->each([&](const std::string&) { r_seed_set = true; });

  auto* sweep_cmd = app.add_subcommand("sweep", "sweep one axis of a config");
  std::string s_config, s_axis = "eps", s_values, s_out;
  std::uint64_t s_seed = 0;
  bool s_seed_set = false;
  sweep_cmd->add_option("--config", s_config, "JSON config path")->required();
  sweep_cmd->add_option("--axis", s_axis, "eps|tau|mu");
  sweep_cmd->add_option("--values", s_values, "comma-separated values")->required();
  sweep_cmd->add_option("--out", s_out, "output directory (overrides config)");
  sweep_cmd->add_option("--seed", s_seed, "Monte-Carlo seed base (overrides config)")
      ->each([&](const std::string&) { s_seed_set = true; });

  auto* bounds_cmd = app.add_subcommand("bounds", "evaluate bound constants from flags");
  BoundInputs bi;
  bi.mu = 1e-3;
  bi.nu = 1.0;
  bi.delta = 2.0;
  bounds_cmd->add_option("--mu", bi.mu, "step size");
  bounds_cmd->add_option("--tau", bi.tau, "sequence length");
  bounds_cmd->add_option("--eps", bi.eps, "approximation error");
  bounds_cmd->add_option("--K", bi.agents, "number of agents");
  bounds_cmd->add_option("--nu", bi.nu, "strong convexity");
  bounds_cmd->add_option("--delta", bi.delta, "Lipschitz constant");
  bounds_cmd->add_option("--sigma-sq", bi.sigma_sq, "aggregate gradient-noise floor");
  bounds_cmd->add_option("--beta-sq", bi.beta_sq, "aggregate gradient-noise slope");
  bounds_cmd->add_option("--zeta-sq", bi.zeta_sq, "aggregate heterogeneity");
  std::string b_out;
  bounds_cmd->add_option("--out", b_out, "output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (graph_cmd->parsed()) {
      Graph g = build_graph(topology_from_string(g_kind), g_nodes);
      write_or_print(g_out, to_edge_list(g));
    } else if (ftc_cmd->parsed()) {
      MatrixSequence seq = [&]() {
        if (!f_in.empty()) {
          std::ifstream in(f_in, std::ios::binary);
          if (!in) throw std::runtime_error("cannot open file: " + f_in);
          std::ostringstream ss;
          ss << in.rdbuf();
          return parse_sequence(ss.str());
        }
        Graph g = build_graph(topology_from_string(f_kind), f_nodes);
        SequenceSpec spec;
        spec.construction = parse_construction(f_construction);
        spec.ordering = parse_ordering(f_ordering);
        spec.seed = f_seed;
        spec.tol = f_tol;
        if (f_metropolis) {
          spec.kind = SequenceKind::metropolis;
        } else if (f_perturb > 0.0) {
          spec.kind = SequenceKind::perturbed;
          spec.target_eps = f_perturb;
        } else if (f_truncate > 0) {
          spec.kind = SequenceKind::truncated;
          spec.tau_prime = f_truncate;
          spec.selection = f_min_eps ? SubsetSelection::min_eps : SubsetSelection::prefix;
        }
        MatrixSequence s = build_sequence(g, spec);
        if (f_perturb > 0.0 && f_truncate > 0) {
          // perturb first, then cut
          s = f_min_eps ? select_min_epsilon_subset(s, f_truncate) : truncate(s, f_truncate);
        }
        return s;
      }();
      std::ostringstream rep;
      rep << "K=" << seq.graph().node_count << " tau=" << seq.length()
          << " epsilon=" << seq.epsilon() << "\n";
      rep << validate_assumption3(seq, 1e-12).to_text();
      std::cout << rep.str();
      if (!f_out.empty()) write_or_print(f_out, write_sequence(seq));
    } else if (run_cmd->parsed()) {
      if (r_config.empty() == r_preset.empty())
        throw std::invalid_argument("run: give exactly one of --config or --preset");
      if (!r_preset.empty()) {
        std::string dir = r_out.empty() ? ("out/" + r_preset) : r_out;
        auto configs = preset(r_preset);
        std::vector<RunResult> results;
        std::vector<std::string> labels;
        for (auto& [label, cfg] : configs) {
          if (r_seed_set) cfg.monte_carlo.seed_base = r_seed;
          results.push_back(run_experiment(cfg));
          labels.push_back(label);
          std::cout << label << ": steady_state_msd=" << results.back().steady_mean
                    << " tau=" << results.back().certificate.tau
                    << " epsilon=" << results.back().certificate.epsilon << "\n";
        }
        write_sweep(results, labels, dir);
        std::cout << "wrote " << dir << "\n";
      } else {
        ExperimentConfig cfg = load_config(r_config);
        if (!r_out.empty()) cfg.output.directory = r_out;
        if (r_seed_set) cfg.monte_carlo.seed_base = r_seed;
        RunResult res = run_experiment(cfg);
        write_result(res, cfg.output.directory);
        std::cout << "steady_state_msd=" << res.steady_mean << " tau=" << res.certificate.tau
                  << " epsilon=" << res.certificate.epsilon << "\n";
        std::cout << "wrote " << cfg.output.directory << "\n";
      }
    } else if (sweep_cmd->parsed()) {
      ExperimentConfig cfg = load_config(s_config);
      if (!s_out.empty()) cfg.output.directory = s_out;
      if (s_seed_set) cfg.monte_carlo.seed_base = s_seed;
      std::vector<double> values = parse_values(s_values);
      auto results = sweep(cfg, sweep_axis_from_string(s_axis), values);
      std::vector<std::string> labels;
      for (double v : values) {
        std::ostringstream l;
        l << s_axis << v;
        labels.push_back(l.str());
      }
      write_sweep(results, labels, cfg.output.directory);
      std::cout << "wrote " << cfg.output.directory << "\n";
    } else if (bounds_cmd->parsed()) {
      write_or_print(b_out, bound_report(bi));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
