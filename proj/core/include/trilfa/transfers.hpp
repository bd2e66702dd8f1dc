// Inter-grid transfer symbols for factor-two coarsening of triangular grids:
// seven-point linear interpolation on the node subgrid and the canonical
// edge-element interpolation on the three edge subgrids, with restriction a
// scalar multiple of the prolongation adjoint.
#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <vector>

#include "trilfa/lattice.hpp"
#include "trilfa/problems.hpp"

namespace trilfa {

enum class TransferKind { NodalLinear, EdgeCanonical };

/// Scalar symbol of the seven-point linear interpolation kernel (weight 1 on
/// the coincident node, 1/2 on the six neighbours):
///   1 + cos t1 + cos t2 + cos(t1 + t2).
double nodal_kernel_symbol(Freq theta);

/// Kernel symbol of the canonical edge interpolation from coarse edge subgrid
/// r onto fine edge subgrid i (both 0-based), evaluated at a fine frequency.
cdouble edge_kernel_symbol(int i, int r, Freq theta);

/// One tap of the canonical edge interpolation: the fine edge of subgrid i at
/// fine index 2K + y receives weight num/4 from the coarse edge of subgrid r
/// at coarse index K.
struct EdgeKernelTap {
  int i, r;
  Index2 y;
  double num;  // weight in quarters
};

/// The full tap table of the canonical edge interpolation (the real-space
/// counterpart of edge_kernel_symbol; shared with the mesh-level transfers).
const std::vector<EdgeKernelTap>& edge_kernel_taps();

/// Prolongation symbol onto the four harmonics `hs` for `num_vars` identical
/// nodal variables: (4*num_vars) x num_vars, rows harmonic-major, entry
/// ((a,i), i) = kernel(hs[a]) / 4.
Eigen::MatrixXcd nodal_prolong_symbol(const std::array<Freq, 4>& hs, int num_vars);

/// Prolongation symbol of the canonical edge interpolation: 12 x 3 with entry
/// ((a,i), r) = edge kernel (i,r) at hs[a], divided by 4.
Eigen::MatrixXcd edge_prolong_symbol(const std::array<Freq, 4>& hs);

/// Transfer symbol pair of one problem.  `prolong` maps one coarse Fourier
/// coefficient vector (m) to the four coupled fine harmonics (4m, harmonic
/// major); `restrict` maps fine residual coefficients back (m x 4m) and equals
/// sigma times the conjugate transpose of `prolong`.
struct TransferSymbols {
  std::function<Eigen::MatrixXcd(const std::array<Freq, 4>&)> prolong;
  std::function<Eigen::MatrixXcd(const std::array<Freq, 4>&)> restrict;
  std::vector<TransferKind> kind;  // per variable
  double sigma = 4.0;
};

/// Transfers used by each problem: nodal-linear for every Stokes variable,
/// edge-canonical for the curl-curl edge variables.  sigma = 4, which makes
/// the restriction the exact transpose of the interpolation operator (the
/// variational pairing for finite-element residuals).
TransferSymbols transfer_symbols(const ProblemSpec& problem);

}  // namespace trilfa
