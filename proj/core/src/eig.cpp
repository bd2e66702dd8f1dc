#include "trilfa/eig.hpp"

#include <Eigen/Eigenvalues>
#include <sstream>
#include <stdexcept>

namespace trilfa {

double spectral_radius(const Eigen::MatrixXcd& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("spectral_radius: matrix not square");
  if (a.rows() == 0) return 0.0;
  if (!a.allFinite()) throw std::runtime_error("spectral_radius: matrix has non-finite entries");
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(a, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    std::ostringstream os;
    os << "spectral_radius: eigenvalue iteration failed for matrix:\n" << a;
    throw std::runtime_error(os.str());
  }
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace trilfa
