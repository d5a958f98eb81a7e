#include "ftcsim/ftc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "ftcsim/linalg.hpp"
#include "ftcsim/rng.hpp"

namespace ftcsim {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Assumption3Report::Row check_row(const Eigen::MatrixXd& a, double tol) {
  Assumption3Report::Row r;
  r.symmetry_defect = (a - a.transpose()).cwiseAbs().maxCoeff();
  r.row_sum_defect = (a.rowwise().sum().array() - 1.0).abs().maxCoeff();
  r.spectral_radius = spectral_radius_symmetric(a);
  r.pass = r.symmetry_defect <= tol && r.row_sum_defect <= tol && r.spectral_radius <= 1.0 + tol;
  return r;
}

}  // namespace

std::string Assumption3Report::to_text() const {
  std::ostringstream out;
  for (std::size_t j = 0; j < rows.size(); ++j) {
    const auto& r = rows[j];
    out << "matrix " << (j + 1) << ": symmetry_defect=" << fmt17(r.symmetry_defect)
        << " row_sum_defect=" << fmt17(r.row_sum_defect)
        << " spectral_radius=" << fmt17(r.spectral_radius) << " pass=" << (r.pass ? "yes" : "no")
        << "\n";
  }
  out << "all_pass=" << (all_pass ? "yes" : "no") << " tolerance=" << fmt17(tolerance) << "\n";
  return out.str();
}

MatrixSequence MatrixSequence::from_matrices(Graph g, std::vector<Eigen::MatrixXd> mats,
                                             double tolerance) {
  if (mats.empty()) throw std::invalid_argument("matrix sequence must be nonempty");
  const int k = g.node_count;
  for (const auto& a : mats) {
    if (a.rows() != k || a.cols() != k)
      throw std::invalid_argument("matrix sequence: dimension mismatch");
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        if (i != j && a(i, j) != 0.0 && !g.has_edge(i, j))
          throw std::invalid_argument("matrix sequence: entry outside the graph sparsity pattern");
  }
  MatrixSequence s;
  s.graph_ = std::move(g);
  s.mats_ = std::move(mats);
  s.tolerance_ = tolerance;
  s.epsilon_ = measure_epsilon(s.mats_);
  s.assumption3_ok_.reserve(s.mats_.size());
  for (const auto& a : s.mats_) s.assumption3_ok_.push_back(check_row(a, tolerance).pass);
  return s;
}

const Eigen::MatrixXd& MatrixSequence::matrix_for_iteration(int iter) const {
  const int tau = length();
  int idx = ((iter - 1) % tau + tau) % tau;
  return mats_[idx];
}

Eigen::MatrixXd MatrixSequence::product() const {
  Eigen::MatrixXd p = mats_[0];
  for (std::size_t j = 1; j < mats_.size(); ++j) p = mats_[j] * p;
  return p;
}

double measure_epsilon(const std::vector<Eigen::MatrixXd>& mats) {
  if (mats.empty()) throw std::invalid_argument("measure_epsilon: empty sequence");
  const auto k = mats[0].rows();
  for (const auto& a : mats)
    if (a.rows() != k || a.cols() != k) throw std::invalid_argument("measure_epsilon: dimension mismatch");
  Eigen::MatrixXd p = mats[0];
  for (std::size_t j = 1; j < mats.size(); ++j) p = mats[j] * p;
  p -= Eigen::MatrixXd::Constant(k, k, 1.0 / static_cast<double>(k));
  return spectral_norm(p);
}

MatrixSequence hypercube_sequence(const Graph& g) {
  if (g.kind != Topology::hypercube)
    throw std::invalid_argument("hypercube_sequence: graph is not a hypercube");
  const int k = g.node_count;
  std::vector<Eigen::MatrixXd> mats;
  for (int bit = 1; bit < k; bit <<= 1) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i) {
      a(i, i) = 0.5;
      a(i, i ^ bit) = 0.5;
    }
    mats.push_back(std::move(a));
  }
  return MatrixSequence::from_matrices(g, std::move(mats));
}

MatrixSequence path_pairwise_sequence(const Graph& g) {
  if (g.kind != Topology::path)
    throw std::invalid_argument("path_pairwise_sequence: graph is not a path");
  const int k = g.node_count;
  if (k < 2 || (k & (k - 1)) != 0)
    throw std::invalid_argument("path_pairwise_sequence: K must be a power of two (K >= 2)");

  auto pair_average = [&]() {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < k; i += 2) {
      a(i, i) = a(i + 1, i + 1) = 0.5;
      a(i, i + 1) = a(i + 1, i) = 0.5;
    }
    return a;
  };
  auto swap_matching = [&](const std::vector<int>& lefts) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(k, k);
    for (int i : lefts) {
      a(i, i) = a(i + 1, i + 1) = 0.0;
      a(i, i + 1) = a(i + 1, i) = 1.0;
    }
    return a;
  };

  std::vector<Eigen::MatrixXd> mats;
  for (int b = 1; b < k; b *= 2) {
    for (int t = 1; t < b; ++t) {
      std::vector<int> lefts;
      for (int seg = 0; seg + 2 * b <= k; seg += 2 * b)
        for (int j = 0; j < t; ++j) lefts.push_back(seg + b - t + 2 * j);
      mats.push_back(swap_matching(lefts));
    }
    mats.push_back(pair_average());
  }
  return MatrixSequence::from_matrices(g, std::move(mats));
}

MatrixSequence averaging_sequence(const Graph& g) {
  if (g.kind != Topology::complete)
    throw std::invalid_argument("averaging_sequence: graph is not complete");
  const int k = g.node_count;
  std::vector<Eigen::MatrixXd> mats{Eigen::MatrixXd::Constant(k, k, 1.0 / k)};
  return MatrixSequence::from_matrices(g, std::move(mats));
}

MatrixSequence laplacian_factorization(const Graph& g, EigOrdering ordering) {
  if (!g.connected()) throw std::invalid_argument("laplacian_factorization: graph is disconnected");
  const int k = g.node_count;
  if (k < 2) throw std::invalid_argument("laplacian_factorization: K must be >= 2");
  Eigen::MatrixXd l = laplacian(g);
  Eigen::VectorXd ev = symmetric_eigenvalues(l);  // ascending, ev(0) ~ 0
  std::vector<double> lambdas(ev.data() + 1, ev.data() + k);
  if (ordering == EigOrdering::descending) std::reverse(lambdas.begin(), lambdas.end());
  std::vector<Eigen::MatrixXd> mats;
  Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(k, k);
  for (double lam : lambdas) mats.push_back(eye - l / lam);
  return MatrixSequence::from_matrices(g, std::move(mats));
}

namespace {

struct NoisePattern {
  // per matrix: list of (row, col, draw) with row < col over exact nonzeros
  std::vector<std::vector<std::tuple<int, int, double>>> entries;
  double max_amplitude = 0.0;  // largest amplitude keeping every matrix doubly stochastic
};

// Perturbations stay inside the doubly stochastic polytope: entries remain in
// [0, 1], so every perturbed matrix keeps spectral radius <= 1 and the
// recursion keeps its per-matrix non-expansiveness. Draws at a boundary
// (off-diagonal at 1 or a zero diagonal) are flipped to point inward.
NoisePattern draw_noise(const MatrixSequence& seq, std::uint64_t rng_seed) {
  Rng rng(rng_seed);
  NoisePattern pat;
  pat.entries.resize(seq.length());
  const double edge = 1e-12;
  for (int m = 0; m < seq.length(); ++m) {
    const auto& a = seq.matrix(m);
    for (int i = 0; i < a.rows(); ++i)
      for (int j = i + 1; j < a.cols(); ++j)
        if (a(i, j) != 0.0) {
          double u = rng.uniform(-1.0, 1.0);
          if (a(i, j) >= 1.0 - edge || a(i, i) <= edge || a(j, j) <= edge) u = -std::abs(u);
          pat.entries[m].emplace_back(i, j, u);
        }
  }
  // joint feasibility: every off-diagonal and every diagonal is linear in the
  // amplitude; cap at the first constraint that would leave [0, 1]
  double a_max = std::numeric_limits<double>::infinity();
  auto cap = [&](double value, double slope) {
    if (slope > 0.0) a_max = std::min(a_max, (1.0 - value) / slope);
    if (slope < 0.0) a_max = std::min(a_max, value / (-slope));
  };
  for (int m = 0; m < seq.length(); ++m) {
    const auto& a = seq.matrix(m);
    Eigen::VectorXd diag_slope = Eigen::VectorXd::Zero(a.rows());
    for (auto [i, j, u] : pat.entries[m]) {
      cap(a(i, j), u);
      diag_slope(i) -= u;
      diag_slope(j) -= u;
    }
    for (int i = 0; i < a.rows(); ++i) cap(a(i, i), diag_slope(i));
  }
  pat.max_amplitude = std::isfinite(a_max) ? a_max : 0.0;
  return pat;
}

std::vector<Eigen::MatrixXd> apply_noise(const MatrixSequence& seq, const NoisePattern& pat,
                                         double amplitude) {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(seq.length());
  for (int m = 0; m < seq.length(); ++m) {
    Eigen::MatrixXd b = seq.matrix(m);
    for (auto [i, j, u] : pat.entries[m]) {
      double d = amplitude * u;
      b(i, j) += d;
      b(j, i) += d;
      b(i, i) -= d;
      b(j, j) -= d;
    }
    out.push_back(std::move(b));
  }
  return out;
}

}  // namespace

MatrixSequence perturbed_with_amplitude(const MatrixSequence& seq, double amplitude,
                                        std::uint64_t rng_seed) {
  NoisePattern pat = draw_noise(seq, rng_seed);
  return MatrixSequence::from_matrices(seq.graph(), apply_noise(seq, pat, amplitude),
                                       seq.tolerance());
}

MatrixSequence perturb_to_target(const MatrixSequence& seq, double target_eps,
                                 std::uint64_t rng_seed, double tol) {
  if (tol <= 0.0) throw std::invalid_argument("perturb_to_target: tol must be > 0");
  if (target_eps >= 1.0) throw std::invalid_argument("perturb_to_target: target epsilon must be < 1");
  if (target_eps <= seq.epsilon())
    throw std::invalid_argument("perturb_to_target: target epsilon must exceed the sequence epsilon");

  NoisePattern pat = draw_noise(seq, rng_seed);
  auto eps_at = [&](double amp) { return measure_epsilon(apply_noise(seq, pat, amp)); };

  if (pat.max_amplitude <= 0.0)
    throw std::runtime_error("perturb_to_target: no feasible perturbation direction");
  double lo = 0.0, eps_lo = seq.epsilon();
  double hi = pat.max_amplitude, eps_hi = eps_at(hi);
  if (eps_hi < target_eps - tol) {
    throw std::runtime_error("perturb_to_target: could not bracket target epsilon; achievable range [" +
                             fmt17(seq.epsilon()) + ", " + fmt17(eps_hi) + "]");
  }
  for (int it = 0; it < 60; ++it) {
    if (eps_hi >= target_eps - tol && eps_hi <= target_eps + tol)
      return MatrixSequence::from_matrices(seq.graph(), apply_noise(seq, pat, hi), seq.tolerance());
    double mid = 0.5 * (lo + hi);
    double eps_mid = eps_at(mid);
    if (eps_mid >= target_eps - tol && eps_mid <= target_eps + tol)
      return MatrixSequence::from_matrices(seq.graph(), apply_noise(seq, pat, mid), seq.tolerance());
    if (eps_mid < target_eps) {
      lo = mid;
      eps_lo = eps_mid;
    } else {
      hi = mid;
      eps_hi = eps_mid;
    }
  }
  throw std::runtime_error("perturb_to_target: bisection did not converge; achievable range [" +
                           fmt17(eps_lo) + ", " + fmt17(eps_hi) + "]");
}

MatrixSequence truncate(const MatrixSequence& seq, int tau_prime) {
  if (tau_prime < 1 || tau_prime > seq.length())
    throw std::invalid_argument("truncate: tau_prime out of range");
  std::vector<Eigen::MatrixXd> mats(seq.matrices().begin(), seq.matrices().begin() + tau_prime);
  return MatrixSequence::from_matrices(seq.graph(), std::move(mats), seq.tolerance());
}

MatrixSequence select_min_epsilon_subset(const MatrixSequence& seq, int tau_prime) {
  if (tau_prime < 1 || tau_prime > seq.length())
    throw std::invalid_argument("select_min_epsilon_subset: tau_prime out of range");
  const int n = seq.length();
  double combos = 1.0;
  for (int i = 0; i < tau_prime; ++i) combos *= double(n - i) / double(i + 1);
  if (combos > 2e6)
    throw std::invalid_argument("select_min_epsilon_subset: too many subsets to enumerate");
  std::vector<int> idx(tau_prime), best_idx;
  double best_eps = -1.0;
  // iterate over all index subsets in lexicographic order
  for (int i = 0; i < tau_prime; ++i) idx[i] = i;
  while (true) {
    std::vector<Eigen::MatrixXd> mats;
    for (int i : idx) mats.push_back(seq.matrix(i));
    double e = measure_epsilon(mats);
    if (best_eps < 0.0 || e < best_eps) {
      best_eps = e;
      best_idx = idx;
    }
    int pos = tau_prime - 1;
    while (pos >= 0 && idx[pos] == n - tau_prime + pos) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (int i = pos + 1; i < tau_prime; ++i) idx[i] = idx[i - 1] + 1;
  }
  std::vector<Eigen::MatrixXd> mats;
  for (int i : best_idx) mats.push_back(seq.matrix(i));
  return MatrixSequence::from_matrices(seq.graph(), std::move(mats), seq.tolerance());
}

Assumption3Report validate_assumption3(const MatrixSequence& seq, double tol) {
  Assumption3Report rep;
  rep.tolerance = tol;
  rep.all_pass = true;
  for (int m = 0; m < seq.length(); ++m) {
    rep.rows.push_back(check_row(seq.matrix(m), tol));
    rep.all_pass = rep.all_pass && rep.rows.back().pass;
  }
  return rep;
}

std::string write_sequence(const MatrixSequence& seq) {
  std::ostringstream out;
  const int k = seq.graph().node_count;
  out << k << " " << seq.length() << " " << fmt17(seq.epsilon()) << "\n";
  for (int m = 0; m < seq.length(); ++m) {
    const auto& a = seq.matrix(m);
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) {
        if (j) out << " ";
        out << fmt17(a(i, j));
      }
      out << "\n";
    }
  }
  return out.str();
}

MatrixSequence parse_sequence(const std::string& text) {
  std::istringstream in(text);
  int k = 0, tau = 0;
  double eps = 0.0;
  if (!(in >> k >> tau >> eps)) throw std::invalid_argument("sequence file: bad header");
  if (k < 1 || tau < 1) throw std::invalid_argument("sequence file: bad dimensions");
  std::vector<Eigen::MatrixXd> mats(tau, Eigen::MatrixXd::Zero(k, k));
  for (int m = 0; m < tau; ++m)
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        if (!(in >> mats[m](i, j))) throw std::invalid_argument("sequence file: truncated matrix block");
  // sparsity pattern inferred from the union of off-diagonal nonzeros
  std::vector<std::pair<int, int>> edges;
  for (const auto& a : mats)
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j)
        if (a(i, j) != 0.0 || a(j, i) != 0.0) edges.emplace_back(i, j);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return MatrixSequence::from_matrices(custom_graph(k, std::move(edges)), std::move(mats));
}

}  // namespace ftcsim
