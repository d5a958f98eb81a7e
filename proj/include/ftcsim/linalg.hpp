#pragma once

#include <Eigen/Dense>

namespace ftcsim {

// Largest singular value. Works for non-symmetric inputs (products of
// symmetric matrices need not be symmetric).
double spectral_norm(const Eigen::MatrixXd& m);

// Max |eigenvalue| of a (numerically) symmetric matrix. The input is
// symmetrized first; callers that care about asymmetry report it separately.
double spectral_radius_symmetric(const Eigen::MatrixXd& m);

// Eigenvalues of a symmetric matrix, ascending.
Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& m);

}  // namespace ftcsim
