// Small dense eigenvalue helpers shared by the analysis and its tests.
#pragma once

#include <Eigen/Dense>

namespace trilfa {

/// Spectral radius of a dense complex matrix (eigenvalues only, no vectors).
/// Throws std::runtime_error with the offending matrix appended if the QR
/// iteration fails to converge.
double spectral_radius(const Eigen::MatrixXcd& a);

}  // namespace trilfa
