// Translation-invariant multi-variable stencils on a lattice and their
// frequency-domain symbols.
#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "trilfa/lattice.hpp"

namespace trilfa {

using cdouble = std::complex<double>;

/// How symbols attach phases to staggered (edge-subgrid) variables.
/// Geometric includes the half-offset phase exp(i theta . (delta_r - delta_i))
/// for a coupling of equation variable i to unknown variable r; Logical drops
/// it.  The two differ by a diagonal unitary similarity, so every spectral
/// radius computed downstream is identical under either convention.
enum class PhaseConvention { Geometric, Logical };

struct StencilEntry {
  Index2 off;
  double c = 0.0;
};

/// Coefficients s^{ir}_{kk,ll}: the coupling of the equation of variable i at
/// lattice index x to the unknown of variable r at x + (kk,ll).  Each
/// variable lives on the node grid or one of the three edge subgrids.
class MultiStencil {
public:
  /// `subgrids[i]` in 0..3 gives variable i's subgrid (0 = nodal); an empty
  /// vector means all variables are nodal.  `h` records the mesh size the
  /// coefficients were evaluated at (informational).
  explicit MultiStencil(int num_vars, std::vector<int> subgrids = {},
                        double h = 1.0);

  int num_vars() const { return m_; }
  double h() const { return h_; }
  int var_subgrid(int i) const { return subgrids_[i]; }
  FracOffset var_offset(int i) const { return subgrid_offset(subgrids_[i]); }

  /// Accumulate c into entry (i, r, off).  Entries are kept sorted by
  /// (off.l, off.k) for deterministic iteration.
  void add(int i, int r, Index2 off, double c);

  /// Coefficient at (i, r, off); 0 when absent.
  double coeff(int i, int r, Index2 off) const;

  const std::vector<StencilEntry>& entries(int i, int r) const;

  /// Largest Chebyshev radius max(|kk|, |ll|) over all entries.
  int reach() const;

  /// Drop entries with |c| <= tol (cleans cancelled oracle sums).
  void prune(double tol = 1e-14);

  /// The m x m symbol A~(theta): entry (i,r) = sum_off s^{ir}_off *
  /// exp(i theta . off [+ subgrid phase under Geometric]).
  Eigen::MatrixXcd symbol(Freq theta,
                          PhaseConvention pc = PhaseConvention::Geometric) const;

  /// Max |s^{ir}_y - s^{ri}_{-y}| over all couplings: 0 exactly for a stencil
  /// assembled from a symmetric bilinear form.
  double adjoint_defect() const;

private:
  int m_;
  double h_;
  std::vector<int> subgrids_;
  std::vector<std::vector<StencilEntry>> entries_;  // indexed [i * m_ + r]
};

/// Free-function form of MultiStencil::symbol.
Eigen::MatrixXcd operator_symbol(const MultiStencil& st, Freq theta,
                                 PhaseConvention pc = PhaseConvention::Geometric);

}  // namespace trilfa
