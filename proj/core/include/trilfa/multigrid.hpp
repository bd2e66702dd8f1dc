// Geometric multigrid on the refined triangle mesh: overlapping block
// smoother sweeps with cached local factorizations, V/W cycles over a
// rediscretized hierarchy with transpose restriction, direct coarsest solves
// (with a pressure-gauge border for the saddle problem), and the measurement
// drivers for asymptotic factors, iteration counts, the translating-lid
// cavity, and the reaction-coefficient robustness study.
#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>
#include <cstdint>
#include <memory>
#include <unordered_map>
#include <vector>

#include "trilfa/assemble.hpp"
#include "trilfa/smoother.hpp"

namespace trilfa {

/// One block instance on the mesh: global dofs and variable classes of the
/// members present at this anchor, plus the presence bitmask over the block
/// template's member positions (the key for the factorization cache; blocks
/// with equal masks have identical local matrices on a uniform level).
struct SweepBlock {
  static constexpr int kMaxMembers = 16;
  uint16_t mask = 0;
  int16_t count = 0;
  std::array<int32_t, kMaxMembers> dof{};
  std::array<int8_t, kMaxMembers> var{};
};

/// Instantiate the block template at every vertex anchor in lexicographic
/// order (l outer, k inner), truncating members to non-eliminated unknowns;
/// anchors with no present members are skipped.
std::vector<SweepBlock> build_sweep_blocks(const Discretization& d, const BlockSpec& spec);

/// Dense factorizations of the local block matrices, keyed by presence mask.
struct LocalSolveCache {
  std::unordered_map<uint16_t, Eigen::PartialPivLU<Eigen::MatrixXd>> full_lu;
};

/// One multiplicative sweep over all blocks in anchor order.  The local
/// residual is recomputed from the current state before each block solve;
/// updates are scaled by the per-variable relaxation factors of `spec`.
/// `diag` is the matrix diagonal (used by the Diagonal local solver).
void block_sweep(const SparseMat& a, const Eigen::VectorXd& diag, const BlockSpec& spec,
                 const std::vector<SweepBlock>& blocks, LocalSolveCache& cache, Eigen::VectorXd& x,
                 const Eigen::VectorXd& rhs);

enum class CycleKind { V, W };

struct CycleSpec {
  CycleKind kind = CycleKind::V;
  int nu1 = 1;  // pre-smoothing sweeps
  int nu2 = 1;  // post-smoothing sweeps
  LocalSolver solver = LocalSolver::Full;
  double omega_u = 1.0;  // velocity / edge relaxation factor
  double omega_p = 1.0;  // pressure relaxation factor (nodal saddle problem)
};

/// Block smoother matching a cycle specification for the given problem.
BlockSpec make_smoother(ProblemKind kind, const CycleSpec& spec);

/// Nested discretizations from `coarsest_level` to `finest_level` with
/// interpolation operators, per-level sweep blocks, factorization caches, and
/// the coarsest-level direct solver (built on first use).
class Hierarchy {
 public:
  Hierarchy(const ProblemSpec& problem, int finest_level, int coarsest_level = 2);

  int finest_level() const { return finest_; }
  int coarsest_level() const { return coarsest_; }
  const ProblemSpec& problem() const { return problem_; }

  const Discretization& level(int l) const { return levels_[l - coarsest_]; }
  /// Interpolation from level l-1 onto level l (coarsest < l <= finest).
  const SparseMat& interpolation(int l) const { return interp_[l - coarsest_ - 1]; }
  const std::vector<SweepBlock>& blocks(int l) const { return blocks_[l - coarsest_]; }
  LocalSolveCache& cache(int l) { return caches_[l - coarsest_]; }
  const Eigen::VectorXd& diagonal(int l) const { return diag_[l - coarsest_]; }

  /// Direct solve on the coarsest level; the saddle problem is solved through
  /// a one-row border enforcing zero pressure mean.
  Eigen::VectorXd coarse_solve(const Eigen::VectorXd& rhs);

 private:
  ProblemSpec problem_;
  int finest_ = 0, coarsest_ = 0;
  std::vector<Discretization> levels_;
  std::vector<SparseMat> interp_;
  std::vector<std::vector<SweepBlock>> blocks_;
  std::vector<LocalSolveCache> caches_;
  std::vector<Eigen::VectorXd> diag_;
  std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> coarse_lu_;
};

/// One multigrid cycle on the finest level of the hierarchy.
void cycle(Hierarchy& h, const CycleSpec& spec, Eigen::VectorXd& x, const Eigen::VectorXd& rhs);

struct ConvergenceReport {
  double rho_h = 0.0;
  bool diverged = false;
  int iterations = -1;  // tolerance runs only; -1 otherwise
  std::vector<double> residual_history;  // norms, starting with the initial residual
};

/// Deterministic pseudo-random state, entries uniform in [-1, 1].
Eigen::VectorXd random_state(int dim, uint64_t seed);

/// Asymptotic convergence factor: `iters` cycles (>= 30) on a zero right-hand
/// side from a seeded random start; the factor is the geometric mean of the
/// residual ratios over the last 10 cycles after a 20-cycle burn-in.  Flags
/// divergence on measured ratios above 1.5, non-finite norms, or residual
/// growth beyond 1e8 of the start.
ConvergenceReport asymptotic_factor(Hierarchy& h, const CycleSpec& spec, int iters = 30,
                                    uint64_t seed = 42);

/// Cycle until the residual norm drops below tol times its initial value;
/// `x` is the start state and is updated in place.
ConvergenceReport solve_to_tolerance(Hierarchy& h, const CycleSpec& spec,
                                     const Eigen::VectorXd& rhs, Eigen::VectorXd& x,
                                     double tol = 1e-10, int max_iters = 200);

/// Translating-lid cavity on the unit triangle: wall data from
/// cavity_wall_data, zero start, iterations to a 1e-10 residual reduction.
ConvergenceReport cavity_benchmark(int levels, const CycleSpec& spec, double tol = 1e-10,
                                   int max_iters = 200, int coarsest_level = 2);

/// Iteration counts of the edge-element solver for each (kappa, levels) pair:
/// zero right-hand side, seeded random start, tolerance 1e-10.
std::vector<std::vector<int>> kappa_robustness(const std::vector<int>& levels,
                                               const std::vector<double>& kappas,
                                               const CycleSpec& spec, double tol = 1e-10,
                                               uint64_t seed = 42);

}  // namespace trilfa
