#pragma once

#include <Eigen/Dense>
#include <string>

namespace ftcsim {

// All the closed-form constants the convergence analysis produces, evaluated
// numerically so simulated behavior can be compared against the theory and
// step-size admissibility checked.
struct BoundInputs {
  double mu = 0.0;
  int tau = 1;
  double eps = 0.0;  // in [0, 1)
  int agents = 1;    // K
  double nu = 0.0;
  double delta = 0.0;
  double sigma_sq = 0.0;
  double beta_sq = 0.0;
  double zeta_sq = 0.0;
};

struct ConsensusConstants {
  double theta1 = 0.0;
  double theta2 = 0.0;
  double theta3 = 0.0;
  double theta4 = 0.0;
  bool mu_in_range = true;  // mu <= 1/(2 delta); bound not certified otherwise
};

// theta1 = (eps/2)(1+eps)
// theta2 = 3 tau (4 delta^2 + beta^2)(1+eps) mu^2/(1-eps) + 18 tau beta^2 mu^2
// theta3 = 4 tau (delta^2 + beta^2 K)(1+eps) mu^2/(1-eps) + 18 tau beta^2 K mu^2
// theta4 = 2 tau (3 tau beta^2 (1+eps)/(1-eps) + 18 tau beta^2) mu^2 zeta^2
//        + 2 tau (6 tau + (1+eps)/(1-eps)) mu^2 sigma^2
ConsensusConstants consensus_constants(const BoundInputs& in);  // throws if eps >= 1

struct CentroidConstants {
  double alpha1 = 0.0;  // 1 - nu mu / 2
  double alpha2 = 0.0;  // 2 delta^2 mu / (nu K), leading order
  double alpha3 = 0.0;  // 3 beta^2 mu^2 zeta^2 / K + mu^2 sigma^2 / K
  bool mu_in_range = true;  // mu <= nu / delta^2
  // higher-order remainder of alpha2 is dropped at leading order
  const char* remainder_note = "alpha2 omits an O(mu^2) remainder";
};

CentroidConstants centroid_constants(const BoundInputs& in);

struct CouplingReport {
  Eigen::Matrix2d h;
  Eigen::Vector2d p;
  double rho = 0.0;    // spectral radius of h via the closed 2x2 formula
  double gamma = 0.0;  // 1 - tau nu mu/8 (eps=0) or 1 - tau nu mu/4 + (1+eps)/2
  bool gamma_lt_one = false;
  bool mu_admissible = true;        // mu within the main-result step-size cap
  bool contraction_certified = true;  // mu small enough that rho < 1 is guaranteed (eps = 0 only)
};

// Step-size cap of the main result:
// min( sqrt((1-0.75 eps)(1-eps)) / (5 tau sqrt(4 delta^2 + beta^2)), 4/(3 nu tau) ).
double admissible_mu_cap(const BoundInputs& in);

// Stricter caps under which rho(H) < 1 is certified for eps = 0:
// mu <= nu/(48 tau (4 delta^2 + beta^2)) and mu <= nu/(289 tau beta^2).
double contraction_mu_cap(const BoundInputs& in);

// Throws for eps > 3/4 with eps > 0 ("outside the analyzed regime").
CouplingReport coupling_and_rate(const BoundInputs& in);

struct SteadyStateBound {
  double bound = 0.0;   // 2 * l1-norm of the explicit fixed-point vector
  double top = 0.0;     // centroid component of that vector
  double bottom = 0.0;  // consensus component
  // trend form: mu s/(nu K) + mu^2 tau^2 delta^2 (1+eps) s/(nu^2 K (1-eps)^2)
  //           + mu^2 tau^2 (1+eps) s/(1-eps)^2, with s = sigma^2 + beta^2 zeta^2
  double oform_terms[3] = {0.0, 0.0, 0.0};
  double oform_total = 0.0;
  bool mu_admissible = true;
};

SteadyStateBound steady_state_bound(const BoundInputs& in);  // throws if eps >= 1

// Transient constant 2 kappa sqrt(2) (omega1 + chi1) with kappa the spectral
// condition number of H, from measured first-period maxima.
double transient_constant(const Eigen::Matrix2d& h, double omega1, double chi1);

// Flat key=value block for diffing in tests and CLI output.
std::string bound_report(const BoundInputs& in);

}  // namespace ftcsim
