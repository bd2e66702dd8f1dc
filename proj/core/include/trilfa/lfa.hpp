// Fourier analysis driver: smoothing, two-grid, and three-grid convergence
// factors from frequency sweeps of the harmonic-block error symbols, plus an
// exhaustive relaxation-parameter search.
#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <optional>
#include <stdexcept>

#include "trilfa/lattice.hpp"
#include "trilfa/problems.hpp"
#include "trilfa/smoother.hpp"
#include "trilfa/transfers.hpp"

namespace trilfa {

enum class CoarseOp { Rediscretized };

/// Configuration of a k-grid analysis run.
struct KGridConfig {
  int nu1 = 1;  ///< pre-smoothing sweeps
  int nu2 = 0;  ///< post-smoothing sweeps
  int gamma = 1;  ///< inner cycles of the three-grid analysis (1 = V, 2 = W)
  CoarseOp coarse_op = CoarseOp::Rediscretized;
  int freq_n = 33;  ///< samples per axis of the base-frequency square
  double singular_tol = 1e-10;  ///< relative determinant threshold for skipping
};

/// Throws std::invalid_argument when the configuration is out of range
/// (negative sweep counts, gamma not in {1,2}, freq_n < 8).
void check_config(const KGridConfig& cfg);

/// Thrown when a factor sweep discards every sampled frequency.
class AllFrequenciesSkipped : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Result of one factor sweep; exactly one of mu / rho2g / rho3g is set.
struct FactorReport {
  std::optional<double> mu;
  std::optional<double> rho2g;
  std::optional<double> rho3g;
  Freq argmax_theta{0.0, 0.0};  ///< frequency attaining the sup
  int skipped = 0;              ///< singular frequencies excluded from the sup

  double value() const;  ///< whichever factor is set
};

/// Stencils of the problem at its own mesh size (nodal Stokes system or edge
/// curl-curl system).
MultiStencil problem_stencils(const ProblemSpec& problem);

/// Error symbol of `nu` sweeps at one frequency (identity for nu = 0).
Eigen::MatrixXcd sweep_power_symbol(const MultiStencil& st, const BlockSpec& spec, Freq theta,
                                    int nu);

enum class CoarseOpMode {
  Rediscretized,      ///< coarse symbol from the generator at the doubled mesh size
  GalerkinDiagnostic  ///< coarse symbol = restrict * fine * prolong (diagnostics only)
};

/// Two-grid error symbol at base frequency theta00 in the closed low square
/// [-pi/2, pi/2]^2, on the 4m-dimensional harmonic space (harmonic-major):
///   S^nu2 (I - P A_2h(2 theta00)^-1 R A_h) S^nu1.
/// Returns nullopt when the coarse symbol is singular per cfg.singular_tol.
/// Propagates FrequencySingularity from the sweep symbol.
std::optional<Eigen::MatrixXcd> two_grid_symbol(const MultiStencil& fine,
                                                const MultiStencil& coarse,
                                                const TransferSymbols& tr, const BlockSpec& spec,
                                                Freq theta00, const KGridConfig& cfg,
                                                CoarseOpMode mode = CoarseOpMode::Rediscretized);

/// Three-grid error symbol at base frequency theta00 in [-pi/4, pi/4]^2, on
/// the 16m-dimensional harmonic space; the middle-level solve is approximated
/// by cfg.gamma two-grid cycles on the (2h, 4h) pair, all operators from the
/// generator at their own mesh sizes.  `zero_inner` replaces the inner cycle
/// power by zero (exact middle-level solve) for consistency checks.  Returns
/// nullopt when a coarse symbol at either level is singular.
std::optional<Eigen::MatrixXcd> three_grid_symbol(const MultiStencil& fine,
                                                  const MultiStencil& mid,
                                                  const MultiStencil& coarse,
                                                  const TransferSymbols& tr,
                                                  const BlockSpec& spec, Freq theta00,
                                                  const KGridConfig& cfg, bool zero_inner = false);

/// Smoothing factor sup over the high-frequency region of rho(S~(theta)),
/// raised to the nu1+nu2 power.  The sup concentrates on the boundary of the
/// excluded low square, so the sampling grid covers the closed square edge to
/// edge and maps each point through the three nonzero harmonic shifts,
/// discarding the images that fall back inside the low square.
FactorReport smoothing_factor(const ProblemSpec& problem, const BlockSpec& spec,
                              const KGridConfig& cfg);

/// Two-grid convergence factor: sup of the two-grid symbol spectral radius
/// over a half-cell-offset uniform grid on the open base square
/// (-pi/2, pi/2)^2.  Throws std::runtime_error when every sample is skipped.
FactorReport two_grid_factor(const ProblemSpec& problem, const BlockSpec& spec,
                             const KGridConfig& cfg);

/// Three-grid convergence factor over the open base square (-pi/4, pi/4)^2.
FactorReport three_grid_factor(const ProblemSpec& problem, const BlockSpec& spec,
                               const KGridConfig& cfg);

/// Inclusive rectangular search lattice of relaxation parameters.
struct OmegaGrid {
  double u_min = 1.0, u_max = 1.0;
  double u_step = 0.05;
  double p_min = 1.0, p_max = 1.0;
  double p_step = 0.05;
};

enum class OmegaObjective { Rho2g, Rho3g };

struct OmegaResult {
  double omega_u = 1.0;
  double omega_p = 1.0;
  double rho = 0.0;
};

/// Exhaustive search over the omega lattice; `make_smoother` builds the block
/// spec for one (omega_u, omega_p) pair.  Configurations whose sweep skips
/// every frequency count as +infinity.  Ties break to the smallest omega_u,
/// then the smallest omega_p.  Throws std::invalid_argument on an empty grid.
OmegaResult optimize_omega(const ProblemSpec& problem,
                           const std::function<BlockSpec(double, double)>& make_smoother,
                           const KGridConfig& cfg, const OmegaGrid& grid,
                           OmegaObjective objective);

/// Worker threads used by the frequency sweeps: the TRILFA_THREADS environment
/// variable when set to a positive integer, else the hardware concurrency.
/// The reduction over samples is deterministic regardless of the count.
int sweep_thread_count();

}  // namespace trilfa
