#include "ftcsim/problem.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "ftcsim/linalg.hpp"

namespace ftcsim {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

LeastSquaresProblem generate_once(int agents, int dim, int samples, double noise_variance,
                                  std::uint64_t seed, std::uint64_t stream_seed) {
  LeastSquaresProblem p;
  p.agents = agents;
  p.dim = dim;
  p.samples = samples;
  p.noise_variance = noise_variance;
  p.seed = seed;
  Rng rng(stream_seed);
  p.w_true.resize(dim);
  for (int m = 0; m < dim; ++m) p.w_true(m) = rng.normal();
  const double noise_scale = std::sqrt(noise_variance);
  p.features.reserve(agents);
  p.labels.reserve(agents);
  for (int k = 0; k < agents; ++k) {
    Eigen::MatrixXd f(samples, dim);
    for (int n = 0; n < samples; ++n)
      for (int m = 0; m < dim; ++m) f(n, m) = rng.normal();
    Eigen::VectorXd y = f * p.w_true;
    for (int n = 0; n < samples; ++n) y(n) += noise_scale * rng.normal();
    p.features.push_back(std::move(f));
    p.labels.push_back(std::move(y));
  }
  return p;
}

Eigen::MatrixXd aggregate_hessian(const LeastSquaresProblem& p) {
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(p.dim, p.dim);
  for (int k = 0; k < p.agents; ++k)
    h += p.features[k].transpose() * p.features[k] / static_cast<double>(p.samples);
  return h / static_cast<double>(p.agents);
}

}  // namespace

LeastSquaresProblem generate_problem(int agents, int dim, int samples, double noise_variance,
                                     std::uint64_t seed) {
  if (agents < 1 || dim < 1 || samples < 1)
    throw std::invalid_argument("generate_problem: K, M, N must be >= 1");
  if (noise_variance < 0.0) throw std::invalid_argument("generate_problem: negative noise variance");
  for (int attempt = 0; attempt < 16; ++attempt) {
    std::uint64_t stream = (attempt == 0) ? seed : derive_seed(seed, 0x5EEDULL + attempt);
    LeastSquaresProblem p = generate_once(agents, dim, samples, noise_variance, seed, stream);
    if (static_cast<std::int64_t>(agents) * samples < dim) return p;  // underdetermined on purpose
    Eigen::VectorXd ev = symmetric_eigenvalues(aggregate_hessian(p));
    if (ev(0) > 1e-10) return p;
  }
  throw std::runtime_error("generate_problem: aggregate Hessian kept coming out singular");
}

Eigen::VectorXd full_gradient(const LeastSquaresProblem& p, int agent, const Eigen::VectorXd& w) {
  if (agent < 0 || agent >= p.agents) throw std::invalid_argument("full_gradient: agent out of range");
  if (w.size() != p.dim) throw std::invalid_argument("full_gradient: dimension mismatch");
  const auto& f = p.features[agent];
  const auto& y = p.labels[agent];
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(p.dim);
  for (int n = 0; n < p.samples; ++n) {
    double r = f.row(n).dot(w) - y(n);
    acc += f.row(n).transpose() * r;
  }
  return acc / static_cast<double>(p.samples);
}

Eigen::VectorXd sample_gradient(const LeastSquaresProblem& p, int agent, const Eigen::VectorXd& w,
                                int sample) {
  if (agent < 0 || agent >= p.agents) throw std::invalid_argument("sample_gradient: agent out of range");
  if (sample < 0 || sample >= p.samples) throw std::invalid_argument("sample_gradient: sample out of range");
  if (w.size() != p.dim) throw std::invalid_argument("sample_gradient: dimension mismatch");
  const auto& f = p.features[agent];
  double r = f.row(sample).dot(w) - p.labels[agent](sample);
  return f.row(sample).transpose() * r;
}

Eigen::VectorXd stochastic_gradient(const LeastSquaresProblem& p, int agent,
                                    const Eigen::VectorXd& w, Rng& rng) {
  int n = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(p.samples)));
  return sample_gradient(p, agent, w, n);
}

double objective(const LeastSquaresProblem& p, int agent, const Eigen::VectorXd& w) {
  const auto& f = p.features[agent];
  const auto& y = p.labels[agent];
  double acc = 0.0;
  for (int n = 0; n < p.samples; ++n) {
    double r = y(n) - f.row(n).dot(w);
    acc += r * r;
  }
  return acc / (2.0 * p.samples);
}

double noise_second_moment(const LeastSquaresProblem& p, int agent, const Eigen::VectorXd& w) {
  Eigen::VectorXd g = full_gradient(p, agent, w);
  double acc = 0.0;
  for (int n = 0; n < p.samples; ++n) acc += (sample_gradient(p, agent, w, n) - g).squaredNorm();
  return acc / static_cast<double>(p.samples);
}

std::vector<Eigen::VectorXd> variance_probe_points(const LeastSquaresProblem& p, int agent,
                                                   const Eigen::VectorXd& local_opt) {
  const double radii[3] = {0.1, 1.0, 10.0};
  Rng rng(derive_seed(p.seed, 1000 + static_cast<std::uint64_t>(agent)));
  std::vector<Eigen::VectorXd> probes;
  probes.reserve(200);
  for (int t = 0; t < 200; ++t) {
    Eigen::VectorXd dir(p.dim);
    for (int m = 0; m < p.dim; ++m) dir(m) = rng.normal();
    double nrm = dir.norm();
    if (nrm == 0.0) dir(0) = nrm = 1.0;
    probes.push_back(local_opt + (radii[t % 3] / nrm) * dir);
  }
  return probes;
}

Optima optima_and_constants(const LeastSquaresProblem& p) {
  Optima o;
  const double n = static_cast<double>(p.samples);

  Eigen::MatrixXd agg = aggregate_hessian(p);
  Eigen::VectorXd agg_ev = symmetric_eigenvalues(agg);
  if (agg_ev(0) <= 1e-12)
    throw std::runtime_error("optima_and_constants: aggregate Hessian is singular");

  Eigen::VectorXd agg_rhs = Eigen::VectorXd::Zero(p.dim);
  for (int k = 0; k < p.agents; ++k)
    agg_rhs += p.features[k].transpose() * p.labels[k] / n;
  agg_rhs /= static_cast<double>(p.agents);
  o.global = agg.ldlt().solve(agg_rhs);

  o.constants.nu = agg_ev(0);
  o.constants.delta = 0.0;
  o.local.reserve(p.agents);
  for (int k = 0; k < p.agents; ++k) {
    Eigen::MatrixXd hk = p.features[k].transpose() * p.features[k] / n;
    Eigen::VectorXd bk = p.features[k].transpose() * p.labels[k] / n;
    Eigen::VectorXd ev = symmetric_eigenvalues(hk);
    o.constants.delta = std::max(o.constants.delta, ev(p.dim - 1));
    if (ev(0) > 1e-10) {
      o.local.push_back(hk.ldlt().solve(bk));
    } else {
      // minimum-norm solution for a singular local Hessian
      o.constants.local_hessian_singular = true;
      o.local.push_back(hk.completeOrthogonalDecomposition().solve(bk));
    }
  }

  o.constants.zeta_sq = 0.0;
  for (int k = 0; k < p.agents; ++k) o.constants.zeta_sq += (o.local[k] - o.global).squaredNorm();

  o.constants.sigma_k_sq.resize(p.agents);
  o.constants.beta_k_sq.resize(p.agents);
  o.constants.sigma_sq = 0.0;
  o.constants.beta_sq = 0.0;
  for (int k = 0; k < p.agents; ++k) {
    double sk = noise_second_moment(p, k, o.local[k]);
    o.constants.sigma_k_sq[k] = sk;
    double bk = 0.0;
    for (const auto& w : variance_probe_points(p, k, o.local[k])) {
      double r2 = (w - o.local[k]).squaredNorm();
      double excess = noise_second_moment(p, k, w) - sk;
      if (excess > 0.0) bk = std::max(bk, excess / r2);
    }
    o.constants.beta_k_sq[k] = bk;
    o.constants.sigma_sq += sk;
    o.constants.beta_sq += bk;
  }
  return o;
}

std::string problem_to_csv(const LeastSquaresProblem& p) {
  std::ostringstream out;
  out << "header,K,M,N,noise_variance,seed\n";
  out << "header," << p.agents << "," << p.dim << "," << p.samples << ","
      << fmt17(p.noise_variance) << "," << p.seed << "\n";
  out << "w_true";
  for (int m = 0; m < p.dim; ++m) out << "," << fmt17(p.w_true(m));
  out << "\n";
  for (int k = 0; k < p.agents; ++k) {
    for (int n = 0; n < p.samples; ++n) {
      out << "features," << k << "," << n;
      for (int m = 0; m < p.dim; ++m) out << "," << fmt17(p.features[k](n, m));
      out << "\n";
    }
    out << "labels," << k;
    for (int n = 0; n < p.samples; ++n) out << "," << fmt17(p.labels[k](n));
    out << "\n";
  }
  return out.str();
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

LeastSquaresProblem problem_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("problem csv: empty");
  if (!std::getline(in, line)) throw std::invalid_argument("problem csv: missing header row");
  auto hdr = split_csv_line(line);
  if (hdr.size() != 6 || hdr[0] != "header") throw std::invalid_argument("problem csv: bad header row");
  LeastSquaresProblem p;
  p.agents = std::stoi(hdr[1]);
  p.dim = std::stoi(hdr[2]);
  p.samples = std::stoi(hdr[3]);
  p.noise_variance = std::stod(hdr[4]);
  p.seed = std::stoull(hdr[5]);
  if (!std::getline(in, line)) throw std::invalid_argument("problem csv: missing w_true");
  auto wt = split_csv_line(line);
  if (wt.size() != static_cast<std::size_t>(p.dim) + 1 || wt[0] != "w_true")
    throw std::invalid_argument("problem csv: bad w_true row");
  p.w_true.resize(p.dim);
  for (int m = 0; m < p.dim; ++m) p.w_true(m) = std::stod(wt[m + 1]);
  p.features.assign(p.agents, Eigen::MatrixXd(p.samples, p.dim));
  p.labels.assign(p.agents, Eigen::VectorXd(p.samples));
  for (int k = 0; k < p.agents; ++k) {
    for (int n = 0; n < p.samples; ++n) {
      if (!std::getline(in, line)) throw std::invalid_argument("problem csv: truncated features");
      auto row = split_csv_line(line);
      if (row.size() != static_cast<std::size_t>(p.dim) + 3 || row[0] != "features")
        throw std::invalid_argument("problem csv: bad features row");
      for (int m = 0; m < p.dim; ++m) p.features[k](n, m) = std::stod(row[m + 3]);
    }
    if (!std::getline(in, line)) throw std::invalid_argument("problem csv: truncated labels");
    auto row = split_csv_line(line);
    if (row.size() != static_cast<std::size_t>(p.samples) + 2 || row[0] != "labels")
      throw std::invalid_argument("problem csv: bad labels row");
    for (int n = 0; n < p.samples; ++n) p.labels[k](n) = std::stod(row[n + 2]);
  }
  return p;
}

}  // namespace ftcsim
