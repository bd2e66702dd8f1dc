// Overlapping-block (Vanka-type) smoother description and its Fourier symbol:
// update schedules, local block matrices, the P/Q coefficient system of one
// lexicographic sweep, and the resulting m x m amplification symbol.
#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

#include "trilfa/lattice.hpp"
#include "trilfa/stencil.hpp"

namespace trilfa {

enum class LocalSolver { Full, Diagonal };

struct BlockMember {
  int var = 0;
  Index2 off{0, 0};
};

/// Overlapping block specification: the members of the block anchored at the
/// origin, the local solver, and per-variable damping factors.  Blocks sweep
/// over all anchors lexicographically (l outer ascending, k inner ascending).
struct BlockSpec {
  int num_vars = 0;
  std::vector<BlockMember> members;
  LocalSolver local_solver = LocalSolver::Full;
  std::vector<double> omega;  // per variable; empty means all 1.0
  int schur_var = -1;         // variable kept coupled by the Diagonal solver

  double omega_of(int var) const { return omega.empty() ? 1.0 : omega.at(var); }
};

/// 13-member Stokes block: u and v at the six neighbours of the anchor vertex
/// plus the pressure at the anchor.  Variables are (0:u, 1:v, 2:p).
BlockSpec stokes_block(LocalSolver solver, double omega_u = 1.0, double omega_p = 1.0);

/// 6-member edge block around the anchor vertex: both edges of each of the
/// three edge subgrids incident to the vertex.  Variables are the subgrids.
BlockSpec curlcurl_block(double omega = 1.0);

/// Number of times one fixed unknown of each variable is updated per sweep
/// (the number of blocks containing it).
std::vector<int> updates_per_sweep(const BlockSpec& spec);

struct UpdateCount {
  int count = 0;          // updates already applied when the origin block is solved
  bool updated_now = false;  // true iff (var, off) is a member of the origin block
};

/// State of the unknown (var, off) at the moment the block anchored at the
/// origin is solved, assuming the lexicographic sweep.
UpdateCount update_count(const BlockSpec& spec, int var, Index2 off);

struct ScheduleEntry {
  int var = 0;
  Index2 off{0, 0};
  int count = 0;
  bool member = false;
};

struct UpdateSchedule {
  std::vector<int> s;                    // updates_per_sweep by variable
  std::vector<ScheduleEntry> members;    // in block member order; count == stage
  std::vector<ScheduleEntry> external;   // every non-member unknown the member
                                         // equations touch, sorted by (var,l,k)
};

/// Full bookkeeping of update states for the block system: member stages plus
/// the residual states of all external unknowns reachable through `st`.
UpdateSchedule update_schedule(const BlockSpec& spec, const MultiStencil& st);

/// Local block matrix: entry (a,b) couples member a's equation to member b's
/// unknown.  The Diagonal solver zeroes couplings between distinct members
/// unless one of them belongs to schur_var.
Eigen::MatrixXd build_local_matrix(const MultiStencil& st, const BlockSpec& spec);

/// Thrown when the sweep symbol is not defined at a frequency (P singular).
class FrequencySingularity : public std::runtime_error {
 public:
  FrequencySingularity(const std::string& what, Freq theta)
      : std::runtime_error(what), theta_(theta) {}
  Freq theta() const { return theta_; }

 private:
  Freq theta_;
};

/// Coefficient system of one sweep: P alpha_new = Q alpha_old, where the
/// q = sum_r s(r) unknowns are the intermediate Fourier coefficients laid out
/// stage-major (variable-ascending within a stage) with every variable's final
/// stage in the trailing block.
struct PQSystem {
  Eigen::MatrixXcd P;  // q x q
  Eigen::MatrixXcd Q;  // q x m
  Freq theta;
  int q = 0;

  /// Column of P holding stage n (1-based) of `var`.
  int column(int var, int n) const { return col_index.at(var).at(n - 1); }
  std::vector<std::vector<int>> col_index;
};

PQSystem build_pq(const MultiStencil& st, const BlockSpec& spec, Freq theta,
                  PhaseConvention pc = PhaseConvention::Logical);

/// Amplification symbol of one sweep: the final-stage block of P^-1 Q.
/// Throws FrequencySingularity where P is numerically singular.
Eigen::MatrixXcd smoother_symbol(const MultiStencil& st, const BlockSpec& spec, Freq theta,
                                 PhaseConvention pc = PhaseConvention::Logical);

}  // namespace trilfa
