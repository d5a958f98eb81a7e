#include "ftcsim/bounds.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace ftcsim {

namespace {

void check_eps(const BoundInputs& in) {
  if (in.eps < 0.0 || in.eps >= 1.0)
    throw std::invalid_argument("bounds: eps must lie in [0, 1)");
  if (in.mu <= 0.0) throw std::invalid_argument("bounds: mu must be > 0");
  if (in.tau < 1) throw std::invalid_argument("bounds: tau must be >= 1");
  if (in.agents < 1) throw std::invalid_argument("bounds: K must be >= 1");
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

ConsensusConstants consensus_constants(const BoundInputs& in) {
  check_eps(in);
  const double e = in.eps, op = 1.0 + e, om = 1.0 - e;
  const double mu2 = in.mu * in.mu;
  const double tau = static_cast<double>(in.tau);
  const double k = static_cast<double>(in.agents);
  const double d2 = in.delta * in.delta;
  ConsensusConstants c;
  c.theta1 = 0.5 * e * op;
  c.theta2 = 3.0 * tau * (4.0 * d2 + in.beta_sq) * op * mu2 / om + 18.0 * tau * in.beta_sq * mu2;
  c.theta3 = 4.0 * tau * (d2 + in.beta_sq * k) * op * mu2 / om + 18.0 * tau * in.beta_sq * k * mu2;
  c.theta4 = 2.0 * tau * (3.0 * tau * in.beta_sq * op / om + 18.0 * tau * in.beta_sq) * mu2 * in.zeta_sq +
             2.0 * tau * (6.0 * tau + op / om) * mu2 * in.sigma_sq;
  c.mu_in_range = in.delta <= 0.0 || in.mu <= 1.0 / (2.0 * in.delta);
  return c;
}

CentroidConstants centroid_constants(const BoundInputs& in) {
  check_eps(in);
  const double mu2 = in.mu * in.mu;
  const double k = static_cast<double>(in.agents);
  CentroidConstants c;
  c.alpha1 = 1.0 - in.nu * in.mu / 2.0;
  c.alpha2 = 2.0 * in.delta * in.delta * in.mu / (in.nu * k);
  c.alpha3 = 3.0 * in.beta_sq * mu2 * in.zeta_sq / k + mu2 * in.sigma_sq / k;
  c.mu_in_range = in.delta <= 0.0 || in.mu <= in.nu / (in.delta * in.delta);
  return c;
}

double admissible_mu_cap(const BoundInputs& in) {
  const double tau = static_cast<double>(in.tau);
  const double a = std::sqrt((1.0 - 0.75 * in.eps) * (1.0 - in.eps)) /
                   (5.0 * tau * std::sqrt(4.0 * in.delta * in.delta + in.beta_sq));
  const double b = 4.0 / (3.0 * in.nu * tau);
  return std::min(a, b);
}

double contraction_mu_cap(const BoundInputs& in) {
  const double tau = static_cast<double>(in.tau);
  double cap = in.nu / (48.0 * tau * (4.0 * in.delta * in.delta + in.beta_sq));
  if (in.beta_sq > 0.0) cap = std::min(cap, in.nu / (289.0 * tau * in.beta_sq));
  return cap;
}

CouplingReport coupling_and_rate(const BoundInputs& in) {
  check_eps(in);
  if (in.eps > 0.0 && in.eps > 0.75)
    throw std::invalid_argument("coupling_and_rate: eps outside the analyzed regime (0 < eps <= 3/4)");
  ConsensusConstants t = consensus_constants(in);
  CentroidConstants a = centroid_constants(in);
  const double tau = static_cast<double>(in.tau);
  CouplingReport r;
  r.h(0, 0) = std::pow(a.alpha1, tau);
  r.h(0, 1) = a.alpha2 * tau * (1.0 + 1.5 * t.theta1);
  r.h(1, 0) = 1.5 * tau * t.theta3;
  r.h(1, 1) = 1.5 * (t.theta1 + tau * t.theta2);
  r.p(0) = tau * a.alpha3;
  r.p(1) = 1.5 * t.theta4;
  const double tr = r.h(0, 0) + r.h(1, 1);
  const double disc = (r.h(0, 0) - r.h(1, 1)) * (r.h(0, 0) - r.h(1, 1)) + 4.0 * r.h(0, 1) * r.h(1, 0);
  const double root = std::sqrt(std::max(disc, 0.0));
  r.rho = std::max(std::abs(0.5 * (tr + root)), std::abs(0.5 * (tr - root)));
  r.gamma = (in.eps == 0.0) ? 1.0 - tau * in.nu * in.mu / 8.0
                            : 1.0 - tau * in.nu * in.mu / 4.0 + (1.0 + in.eps) / 2.0;
  r.gamma_lt_one = r.gamma < 1.0;
  r.mu_admissible = in.mu <= admissible_mu_cap(in);
  r.contraction_certified = (in.eps == 0.0) && in.mu <= contraction_mu_cap(in);
  return r;
}

SteadyStateBound steady_state_bound(const BoundInputs& in) {
  check_eps(in);
  const double e = in.eps, op = 1.0 + e, om = 1.0 - e;
  const double mu = in.mu, mu2 = mu * mu;
  const double tau = static_cast<double>(in.tau);
  const double tau2 = tau * tau;
  const double k = static_cast<double>(in.agents);
  const double d2 = in.delta * in.delta;
  const double nu = in.nu, nu2 = nu * nu;
  const double ss = in.sigma_sq, zz = in.zeta_sq, bb = in.beta_sq;

  SteadyStateBound b;
  b.top = 4.0 * mu * ss / (nu * k) + 8640.0 * mu2 * tau2 * d2 * ss / (nu2 * k * om) +
          1440.0 * mu2 * tau * op * d2 * ss / (nu2 * k * om * om) + 12.0 * mu * bb * zz / (nu * k) +
          4320.0 * mu2 * tau2 * op * d2 * bb * zz / (nu2 * k * om * om) +
          25920.0 * mu2 * tau2 * d2 * bb * zz / (nu2 * k * om);
  b.bottom = 540.0 * mu2 * tau2 * ss / om + 90.0 * mu2 * tau * op * ss / (om * om) +
             1620.0 * mu2 * tau2 * bb * zz / om + 270.0 * mu2 * tau2 * op * bb * zz / (om * om);
  b.bound = 2.0 * (b.top + b.bottom);

  const double s = ss + bb * zz;
  b.oform_terms[0] = mu * s / (nu * k);
  b.oform_terms[1] = mu2 * tau2 * d2 * op * s / (nu2 * k * om * om);
  b.oform_terms[2] = mu2 * tau2 * op * s / (om * om);
  b.oform_total = b.oform_terms[0] + b.oform_terms[1] + b.oform_terms[2];
  b.mu_admissible = in.mu <= admissible_mu_cap(in);
  return b;
}

double transient_constant(const Eigen::Matrix2d& h, double omega1, double chi1) {
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(h);
  double smin = svd.singularValues()(1);
  if (smin <= 0.0) throw std::invalid_argument("transient_constant: H is singular");
  double kappa = svd.singularValues()(0) / smin;
  return 2.0 * kappa * std::sqrt(2.0) * (omega1 + chi1);
}

std::string bound_report(const BoundInputs& in) {
  ConsensusConstants t = consensus_constants(in);
  CentroidConstants a = centroid_constants(in);
  SteadyStateBound s = steady_state_bound(in);
  std::ostringstream out;
  out << "mu=" << fmt17(in.mu) << "\n";
  out << "tau=" << in.tau << "\n";
  out << "eps=" << fmt17(in.eps) << "\n";
  out << "K=" << in.agents << "\n";
  out << "nu=" << fmt17(in.nu) << "\n";
  out << "delta=" << fmt17(in.delta) << "\n";
  out << "sigma_sq=" << fmt17(in.sigma_sq) << "\n";
  out << "beta_sq=" << fmt17(in.beta_sq) << "\n";
  out << "zeta_sq=" << fmt17(in.zeta_sq) << "\n";
  out << "theta1=" << fmt17(t.theta1) << "\n";
  out << "theta2=" << fmt17(t.theta2) << "\n";
  out << "theta3=" << fmt17(t.theta3) << "\n";
  out << "theta4=" << fmt17(t.theta4) << "\n";
  out << "theta_mu_ok=" << (t.mu_in_range ? "yes" : "no") << "\n";
  out << "alpha1=" << fmt17(a.alpha1) << "\n";
  out << "alpha2=" << fmt17(a.alpha2) << "\n";
  out << "alpha3=" << fmt17(a.alpha3) << "\n";
  out << "alpha_mu_ok=" << (a.mu_in_range ? "yes" : "no") << "\n";
  out << "alpha2_note=" << a.remainder_note << "\n";
  bool have_coupling = (in.eps == 0.0 || in.eps <= 0.75);
  if (have_coupling) {
    CouplingReport c = coupling_and_rate(in);
    out << "H11=" << fmt17(c.h(0, 0)) << "\n";
    out << "H12=" << fmt17(c.h(0, 1)) << "\n";
    out << "H21=" << fmt17(c.h(1, 0)) << "\n";
    out << "H22=" << fmt17(c.h(1, 1)) << "\n";
    out << "p1=" << fmt17(c.p(0)) << "\n";
    out << "p2=" << fmt17(c.p(1)) << "\n";
    out << "rho_H=" << fmt17(c.rho) << "\n";
    out << "gamma=" << fmt17(c.gamma) << "\n";
    out << "gamma_lt_one=" << (c.gamma_lt_one ? "yes" : "no") << "\n";
    out << "mu_admissible=" << (c.mu_admissible ? "yes" : "no") << "\n";
    out << "contraction_certified=" << (c.contraction_certified ? "yes" : "no") << "\n";
  } else {
    out << "coupling=skipped eps outside analyzed regime\n";
  }
  out << "mu_cap=" << fmt17(admissible_mu_cap(in)) << "\n";
  out << "steady_state_bound=" << fmt17(s.bound) << "\n";
  out << "steady_state_top=" << fmt17(s.top) << "\n";
  out << "steady_state_bottom=" << fmt17(s.bottom) << "\n";
  out << "oform_term1=" << fmt17(s.oform_terms[0]) << "\n";
  out << "oform_term2=" << fmt17(s.oform_terms[1]) << "\n";
  out << "oform_term3=" << fmt17(s.oform_terms[2]) << "\n";
  out << "oform_total=" << fmt17(s.oform_total) << "\n";
  return out.str();
}

}  // namespace ftcsim
