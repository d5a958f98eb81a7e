#include "ftcsim/optimizer.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace ftcsim {

Eigen::MatrixXd gradient_rows(const LeastSquaresProblem& p, const Eigen::MatrixXd& models,
                              Rng* rng, GradientMode mode, std::vector<int>* record) {
  if (models.rows() != p.agents || models.cols() != p.dim)
    throw std::invalid_argument("gradient_rows: dimension mismatch");
  Eigen::MatrixXd g(p.agents, p.dim);
  for (int k = 0; k < p.agents; ++k) {
    Eigen::VectorXd w = models.row(k).transpose();
    if (mode == GradientMode::deterministic) {
      g.row(k) = full_gradient(p, k, w).transpose();
    } else {
      if (!rng) throw std::invalid_argument("gradient_rows: stochastic mode needs an rng");
      int n = static_cast<int>(rng->uniform_int(static_cast<std::uint64_t>(p.samples)));
      if (record) record->push_back(n);
      g.row(k) = sample_gradient(p, k, w, n).transpose();
    }
  }
  return g;
}

NetworkState init_state(const LeastSquaresProblem& p, double mu, const Eigen::MatrixXd& w0,
                        Rng* rng, GradientMode mode, std::vector<int>* record) {
  if (mu < 0.0) throw std::invalid_argument("init_state: mu must be >= 0");
  if (w0.rows() != p.agents || w0.cols() != p.dim)
    throw std::invalid_argument("init_state: w0 dimension mismatch");
  NetworkState s;
  s.models = w0;
  s.last_grad = gradient_rows(p, w0, rng, mode, record);
  s.trackers = mu * s.last_grad;
  s.iter = 0;
  return s;
}

void step(NetworkState& s, const LeastSquaresProblem& p, const MatrixSequence& seq, double mu,
          Rng* rng, GradientMode mode, std::vector<int>* record) {
  const int i = s.iter + 1;
  const Eigen::MatrixXd& a = seq.matrix_for_iteration(i);
  Eigen::MatrixXd mixed = a * (s.models - s.trackers);
  Eigen::MatrixXd fresh = gradient_rows(p, mixed, rng, mode, record);
  // evaluation order keeps the K=1 case bitwise equal to plain gradient
  // descent: (G - mu*cached) cancels exactly, leaving mu*fresh
  Eigen::MatrixXd inner = (s.trackers - mu * s.last_grad) + mu * fresh;
  s.trackers = a * inner;
  s.models = std::move(mixed);
  s.last_grad = std::move(fresh);
  s.iter = i;
  if (!s.models.allFinite() || !s.trackers.allFinite()) throw DivergenceError(i);
}

TransformedState init_transformed(const NetworkState& s0, const MatrixSequence& seq, double mu) {
  TransformedState t;
  t.models = s0.models;
  t.aux = s0.trackers - mu * (seq.matrix_for_iteration(0) * s0.last_grad);
  t.iter = 0;
  return t;
}

void transformed_step(TransformedState& t, const LeastSquaresProblem& p, const MatrixSequence& seq,
                      double mu, GradientMode mode, const std::vector<int>* recorded_samples) {
  const int i = t.iter + 1;
  const Eigen::MatrixXd& a = seq.matrix_for_iteration(i);
  const Eigen::MatrixXd& a_prev = seq.matrix_for_iteration(i - 1);
  Eigen::MatrixXd grad_prev(p.agents, p.dim);
  if (mode == GradientMode::deterministic) {
    for (int k = 0; k < p.agents; ++k)
      grad_prev.row(k) = full_gradient(p, k, t.models.row(k).transpose()).transpose();
  } else {
    if (!recorded_samples || static_cast<int>(recorded_samples->size()) != p.agents)
      throw std::invalid_argument("transformed_step: missing recorded sample indices");
    for (int k = 0; k < p.agents; ++k)
      grad_prev.row(k) =
          sample_gradient(p, k, t.models.row(k).transpose(), (*recorded_samples)[k]).transpose();
  }
  Eigen::MatrixXd mixed_grad = a_prev * grad_prev;
  Eigen::MatrixXd w_new = a * (t.models - t.aux - mu * mixed_grad);
  t.aux = a * (t.aux - mu * (grad_prev - mixed_grad));
  t.models = std::move(w_new);
  t.iter = i;
}

Eigen::MatrixXd transformed_z(const TransformedState& t, const LeastSquaresProblem& p,
                              const MatrixSequence& seq, double mu) {
  const Eigen::MatrixXd& a = seq.matrix_for_iteration(t.iter);
  Eigen::VectorXd centroid = t.models.colwise().mean().transpose();
  Eigen::MatrixXd grad_c(p.agents, p.dim);
  for (int k = 0; k < p.agents; ++k) grad_c.row(k) = full_gradient(p, k, centroid).transpose();
  return t.aux + mu * (a * grad_c);
}

Metrics measure(const Eigen::MatrixXd& models, const Eigen::VectorXd& w_opt,
                const Eigen::MatrixXd* z) {
  const int k = static_cast<int>(models.rows());
  if (w_opt.size() != models.cols()) throw std::invalid_argument("measure: dimension mismatch");
  Metrics m;
  Eigen::RowVectorXd centroid = models.colwise().mean();
  m.msd = (models.rowwise() - w_opt.transpose()).squaredNorm() / k;
  m.centroid_err = (w_opt.transpose() - centroid).squaredNorm();
  m.consensus_w = (models.rowwise() - centroid).squaredNorm();
  if (z) {
    Eigen::RowVectorXd zc = z->colwise().mean();
    m.consensus_z = (z->rowwise() - zc).squaredNorm();
    m.has_z = true;
    m.consensus_x = m.consensus_w + m.consensus_z;
  } else {
    m.consensus_x = m.consensus_w;
  }
  return m;
}

Trajectory run(const LeastSquaresProblem& p, const MatrixSequence& seq, double mu, int iters,
               std::uint64_t seed, GradientMode mode, bool diagnostics,
               const Eigen::VectorXd& w_opt, const Eigen::MatrixXd* w0) {
  if (iters < 1) throw std::invalid_argument("run: iters must be >= 1");
  Rng rng(seed);
  Eigen::MatrixXd start;
  if (w0)
    start = *w0;
  else
    start = Eigen::MatrixXd::Zero(p.agents, p.dim);

  Trajectory traj;
  traj.diagnostics = diagnostics;
  traj.points.reserve(iters + 1);

  std::vector<int> rec_prev, rec_cur;
  NetworkState s = init_state(p, mu, start, &rng, mode, &rec_prev);
  TransformedState t;
  if (diagnostics) t = init_transformed(s, seq, mu);

  auto tracking_defect = [&]() {
    Eigen::RowVectorXd d = s.trackers.colwise().mean() - mu * s.last_grad.colwise().mean();
    return d.norm();
  };
  auto push_point = [&](std::optional<double> equiv) {
    TrajectoryPoint pt;
    const Eigen::MatrixXd* zptr = nullptr;
    Eigen::MatrixXd zmat;
    if (diagnostics) {
      zmat = transformed_z(t, p, seq, mu);
      zptr = &zmat;
    }
    Metrics m = measure(s.models, w_opt, zptr);
    pt.msd = m.msd;
    pt.centroid_err = m.centroid_err;
    pt.consensus_w = m.consensus_w;
    if (m.has_z) pt.consensus_z = m.consensus_z;
    pt.equiv_defect = equiv;
    traj.points.push_back(pt);
  };

  traj.max_tracking_defect = tracking_defect();
  if (diagnostics) {
    traj.max_ones_y_defect = t.aux.colwise().sum().cwiseAbs().maxCoeff();
    traj.max_equiv_defect = 0.0;
  }
  push_point(diagnostics ? std::optional<double>(0.0) : std::nullopt);

  for (int i = 1; i <= iters; ++i) {
    Eigen::RowVectorXd prev_mean_grad = s.last_grad.colwise().mean();
    Eigen::RowVectorXd prev_centroid = s.models.colwise().mean();
    rec_cur.clear();
    try {
      step(s, p, seq, mu, &rng, mode, &rec_cur);
    } catch (const DivergenceError& e) {
      traj.diverged_at = e.iteration;
      break;
    }
    traj.max_tracking_defect = std::max(traj.max_tracking_defect, tracking_defect());
    Eigen::RowVectorXd centroid = s.models.colwise().mean();
    double resid = (centroid - prev_centroid + mu * prev_mean_grad).norm();
    traj.max_centroid_residual = std::max(traj.max_centroid_residual, resid);

    std::optional<double> equiv;
    if (diagnostics) {
      transformed_step(t, p, seq, mu, mode, &rec_prev);
      double e = (s.models - t.models).cwiseAbs().maxCoeff();
      traj.max_equiv_defect = std::max(traj.max_equiv_defect, e);
      double oy = t.aux.colwise().sum().cwiseAbs().maxCoeff();
      traj.max_ones_y_defect = std::max(traj.max_ones_y_defect, oy);
      equiv = e;
    }
    push_point(equiv);
    std::swap(rec_prev, rec_cur);
  }
  return traj;
}

std::string trajectory_csv(const Trajectory& t) {
  auto fmt = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  std::ostringstream out;
  out << "iter,msd,centroid_err,consensus_w,consensus_z,equiv_defect\n";
  for (std::size_t i = 0; i < t.points.size(); ++i) {
    const auto& pt = t.points[i];
    out << i << "," << fmt(pt.msd) << "," << fmt(pt.centroid_err) << "," << fmt(pt.consensus_w)
        << "," << (pt.consensus_z ? fmt(*pt.consensus_z) : "") << ","
        << (pt.equiv_defect ? fmt(*pt.equiv_defect) : "") << "\n";
  }
  return out.str();
}

}  // namespace ftcsim
