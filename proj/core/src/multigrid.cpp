// Geometric multigrid cycles, block smoother sweeps, and measurement drivers.
#include "trilfa/multigrid.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace trilfa {
namespace {

constexpr int kMaxDirectDim = 200000;

void project_pressure_mean(const Discretization& d, Eigen::VectorXd& x) {
  if (d.problem.kind != ProblemKind::Stokes) return;
  const int p0 = d.layout.begin[2];
  const int np = d.layout.size_of(2);
  x.segment(p0, np).array() -= x.segment(p0, np).mean();
}

// Local residual of one block from the current state.
void gather_residual(const SparseMat& a, const SweepBlock& blk, const Eigen::VectorXd& x,
                     const Eigen::VectorXd& rhs, double* r) {
  for (int m = 0; m < blk.count; ++m) {
    const int row = blk.dof[m];
    double acc = rhs[row];
    for (SparseMat::InnerIterator it(a, row); it; ++it) acc -= it.value() * x[it.index()];
    r[m] = acc;
  }
}

// Dense principal submatrix of one block.
Eigen::MatrixXd gather_local_matrix(const SparseMat& a, const SweepBlock& blk) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(blk.count, blk.count);
  for (int i = 0; i < blk.count; ++i) {
    for (SparseMat::InnerIterator it(a, blk.dof[i]); it; ++it) {
      for (int j = 0; j < blk.count; ++j) {
        if (blk.dof[j] == static_cast<int>(it.index())) {
          m(i, j) = it.value();
          break;
        }
      }
    }
  }
  return m;
}

void cycle_at(Hierarchy& h, const CycleSpec& spec, int lev, Eigen::VectorXd& x,
              const Eigen::VectorXd& rhs) {
  if (lev == h.coarsest_level()) {
    x = h.coarse_solve(rhs);
    return;
  }
  const Discretization& d = h.level(lev);
  const BlockSpec smoother = make_smoother(d.problem.kind, spec);
  for (int s = 0; s < spec.nu1; ++s)
    block_sweep(d.op, h.diagonal(lev), smoother, h.blocks(lev), h.cache(lev), x, rhs);

  const Eigen::VectorXd r = rhs - d.op * x;
  const SparseMat& p = h.interpolation(lev);
  const Eigen::VectorXd rc = p.transpose() * r;
  Eigen::VectorXd xc = Eigen::VectorXd::Zero(rc.size());
  const int gamma = spec.kind == CycleKind::W ? 2 : 1;
  for (int g = 0; g < gamma; ++g) cycle_at(h, spec, lev - 1, xc, rc);
  x += p * xc;
  project_pressure_mean(d, x);

  for (int s = 0; s < spec.nu2; ++s)
    block_sweep(d.op, h.diagonal(lev), smoother, h.blocks(lev), h.cache(lev), x, rhs);
}

double residual_norm(const Discretization& d, const Eigen::VectorXd& x,
                     const Eigen::VectorXd& rhs) {
  return (rhs - d.op * x).norm();
}

// Shared iteration loop: run cycles, collect residual norms, stop on the
// predicate, classify divergence.
ConvergenceReport run_cycles(Hierarchy& h, const CycleSpec& spec, const Eigen::VectorXd& rhs,
                             Eigen::VectorXd& x, int max_iters, double stop_rel_tol,
                             bool count_iterations) {
  const Discretization& fine = h.level(h.finest_level());
  ConvergenceReport rep;
  const double r0 = residual_norm(fine, x, rhs);
  rep.residual_history.push_back(r0);
  for (int it = 1; it <= max_iters; ++it) {
    cycle(h, spec, x, rhs);
    const double r = residual_norm(fine, x, rhs);
    rep.residual_history.push_back(r);
    if (!std::isfinite(r) || r > 1e8 * r0) {
      rep.diverged = true;
      rep.rho_h = std::numeric_limits<double>::infinity();
      return rep;
    }
    if (stop_rel_tol > 0.0 && r <= stop_rel_tol * r0) {
      rep.iterations = it;
      break;
    }
  }
  const auto& hist = rep.residual_history;
  const int done = static_cast<int>(hist.size()) - 1;
  const int start = std::max(count_iterations ? 0 : 20, done - 10);
  if (done > start && hist[start] > 0.0)
    rep.rho_h = std::pow(hist[done] / hist[start], 1.0 / (done - start));
  if (!count_iterations) {
    for (int i = start + 1; i <= done; ++i)
      if (hist[i] > 1.5 * hist[i - 1]) rep.diverged = true;
  }
  if (count_iterations && rep.iterations < 0) rep.diverged = true;
  return rep;
}

}  // namespace

std::vector<SweepBlock> build_sweep_blocks(const Discretization& d, const BlockSpec& spec) {
  if (static_cast<int>(spec.members.size()) > SweepBlock::kMaxMembers)
    throw std::invalid_argument("build_sweep_blocks: block template too large");
  std::vector<SweepBlock> blocks;
  blocks.reserve(d.mesh.num_vertices());
  for (int v = 0; v < d.mesh.num_vertices(); ++v) {
    const Index2 a = d.mesh.vertex_index(v);
    SweepBlock blk;
    for (size_t m = 0; m < spec.members.size(); ++m) {
      const BlockMember& mem = spec.members[m];
      const int g = d.dof_at(mem.var, {a.k + mem.off.k, a.l + mem.off.l});
      if (g < 0) continue;
      blk.mask |= static_cast<uint16_t>(1u << m);
      blk.dof[blk.count] = g;
      blk.var[blk.count] = static_cast<int8_t>(mem.var);
      ++blk.count;
    }
    if (blk.count > 0) blocks.push_back(blk);
  }
  return blocks;
}

void block_sweep(const SparseMat& a, const Eigen::VectorXd& diag, const BlockSpec& spec,
                 const std::vector<SweepBlock>& blocks, LocalSolveCache& cache, Eigen::VectorXd& x,
                 const Eigen::VectorXd& rhs) {
  double r[SweepBlock::kMaxMembers];
  double delta[SweepBlock::kMaxMembers];

  for (const SweepBlock& blk : blocks) {
    gather_residual(a, blk, x, rhs, r);

    if (spec.local_solver == LocalSolver::Full) {
      auto it = cache.full_lu.find(blk.mask);
      if (it == cache.full_lu.end())
        it = cache.full_lu.emplace(blk.mask, gather_local_matrix(a, blk)).first;
      Eigen::Map<Eigen::VectorXd> rv(r, blk.count);
      Eigen::VectorXd dv = it->second.solve(rv);
      for (int m = 0; m < blk.count; ++m) delta[m] = dv[m];
    } else {
      // Decoupled local solve: keep only the couplings to the designated
      // coupled variable and eliminate it through its Schur complement.
      int sm = -1;
      for (int m = 0; m < blk.count; ++m)
        if (blk.var[m] == spec.schur_var) sm = m;
      if (sm < 0)
        throw std::invalid_argument("block_sweep: Diagonal solver requires a coupled variable");
      const int srow = blk.dof[sm];
      double num = -r[sm], den = -a.coeff(srow, srow);
      double b[SweepBlock::kMaxMembers];
      for (int m = 0; m < blk.count; ++m) {
        if (m == sm) continue;
        b[m] = a.coeff(blk.dof[m], srow);
        const double dinv = 1.0 / diag[blk.dof[m]];
        num += b[m] * dinv * r[m];
        den += b[m] * dinv * b[m];
      }
      if (den == 0.0) throw std::runtime_error("block_sweep: zero Schur denominator");
      const double dp = num / den;
      for (int m = 0; m < blk.count; ++m)
        delta[m] = m == sm ? dp : (r[m] - dp * b[m]) / diag[blk.dof[m]];
    }

    for (int m = 0; m < blk.count; ++m) x[blk.dof[m]] += spec.omega_of(blk.var[m]) * delta[m];
  }
}

BlockSpec make_smoother(ProblemKind kind, const CycleSpec& spec) {
  if (kind == ProblemKind::Stokes) return stokes_block(spec.solver, spec.omega_u, spec.omega_p);
  if (spec.solver != LocalSolver::Full)
    throw std::invalid_argument("make_smoother: edge blocks use the Full local solver");
  return curlcurl_block(spec.omega_u);
}

Hierarchy::Hierarchy(const ProblemSpec& problem, int finest_level, int coarsest_level)
    : problem_(problem), finest_(finest_level), coarsest_(coarsest_level) {
  if (coarsest_ < 1 || coarsest_ >= finest_)
    throw std::invalid_argument("Hierarchy: need 1 <= coarsest < finest");
  if (finest_ > 10) throw std::invalid_argument("Hierarchy: finest level above 10");

  const BlockSpec tmpl = make_smoother(problem.kind, CycleSpec{});
  for (int l = coarsest_; l <= finest_; ++l) {
    ProblemSpec p = problem_;
    p.h = 1.0 / (1 << l);
    levels_.push_back(assemble(p, l));
    blocks_.push_back(l == coarsest_ ? std::vector<SweepBlock>{}
                                     : build_sweep_blocks(levels_.back(), tmpl));
    diag_.push_back(levels_.back().op.diagonal());
  }
  caches_.resize(levels_.size());
  for (int l = coarsest_ + 1; l <= finest_; ++l)
    interp_.push_back(build_interpolation(level(l), level(l - 1)));

  const int coarse_dim = level(coarsest_).layout.dim();
  if (coarse_dim > kMaxDirectDim)
    throw std::invalid_argument("Hierarchy: coarsest level too large for a direct solve");
}

Eigen::VectorXd Hierarchy::coarse_solve(const Eigen::VectorXd& rhs) {
  const Discretization& d = level(coarsest_);
  const int dim = d.layout.dim();
  const bool saddle = d.problem.kind == ProblemKind::Stokes;
  if (!coarse_lu_) {
    std::vector<Eigen::Triplet<double>> trip;
    for (int row = 0; row < d.op.outerSize(); ++row)
      for (SparseMat::InnerIterator it(d.op, row); it; ++it)
        trip.emplace_back(row, static_cast<int>(it.index()), it.value());
    int ext = dim;
    if (saddle) {
      // Border with the constant-pressure direction to fix the gauge.
      for (int i = d.layout.begin[2]; i < d.layout.begin[3]; ++i) {
        trip.emplace_back(i, dim, 1.0);
        trip.emplace_back(dim, i, 1.0);
      }
      ext = dim + 1;
    }
    Eigen::SparseMatrix<double> m(ext, ext);
    m.setFromTriplets(trip.begin(), trip.end());
    coarse_lu_ = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
    coarse_lu_->compute(m);
    if (coarse_lu_->info() != Eigen::Success)
      throw std::runtime_error("Hierarchy: coarsest-level factorization failed");
  }
  if (!saddle) return coarse_lu_->solve(rhs);
  Eigen::VectorXd ext = Eigen::VectorXd::Zero(dim + 1);
  ext.head(dim) = rhs;
  return coarse_lu_->solve(ext).head(dim);
}

void cycle(Hierarchy& h, const CycleSpec& spec, Eigen::VectorXd& x, const Eigen::VectorXd& rhs) {
  if (spec.nu1 < 0 || spec.nu2 < 0) throw std::invalid_argument("cycle: negative sweep count");
  const Discretization& fine = h.level(h.finest_level());
  if (x.size() != fine.layout.dim() || rhs.size() != fine.layout.dim())
    throw std::invalid_argument("cycle: state size mismatch");
  cycle_at(h, spec, h.finest_level(), x, rhs);
  project_pressure_mean(fine, x);
}

Eigen::VectorXd random_state(int dim, uint64_t seed) {
  std::mt19937_64 rng(seed);
  Eigen::VectorXd x(dim);
  for (int i = 0; i < dim; ++i) {
    const double u = static_cast<double>(rng() >> 11) * 0x1p-53;  // [0, 1)
    x[i] = 2.0 * u - 1.0;
  }
  return x;
}

ConvergenceReport asymptotic_factor(Hierarchy& h, const CycleSpec& spec, int iters,
                                    uint64_t seed) {
  if (iters < 30) throw std::invalid_argument("asymptotic_factor: need at least 30 cycles");
  const Discretization& fine = h.level(h.finest_level());
  Eigen::VectorXd x = random_state(fine.layout.dim(), seed);
  const Eigen::VectorXd rhs = Eigen::VectorXd::Zero(fine.layout.dim());
  return run_cycles(h, spec, rhs, x, iters, 0.0, false);
}

ConvergenceReport solve_to_tolerance(Hierarchy& h, const CycleSpec& spec,
                                     const Eigen::VectorXd& rhs, Eigen::VectorXd& x, double tol,
                                     int max_iters) {
  return run_cycles(h, spec, rhs, x, max_iters, tol, true);
}

ConvergenceReport cavity_benchmark(int levels, const CycleSpec& spec, double tol, int max_iters,
                                   int coarsest_level) {
  Hierarchy h(ProblemSpec{ProblemKind::Stokes}, levels, coarsest_level);
  const Discretization& fine = h.level(levels);
  const Eigen::VectorXd rhs = -fine.boundary_coupling * cavity_wall_data(fine);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(fine.layout.dim());
  return solve_to_tolerance(h, spec, rhs, x, tol, max_iters);
}

std::vector<std::vector<int>> kappa_robustness(const std::vector<int>& levels,
                                               const std::vector<double>& kappas,
                                               const CycleSpec& spec, double tol, uint64_t seed) {
  std::vector<std::vector<int>> table;
  for (double kappa : kappas) {
    std::vector<int> row;
    for (int lev : levels) {
      ProblemSpec problem{ProblemKind::CurlCurl};
      problem.kappa = kappa;
      Hierarchy h(problem, lev);
      const Discretization& fine = h.level(lev);
      Eigen::VectorXd x = random_state(fine.layout.dim(), seed);
      const Eigen::VectorXd rhs = Eigen::VectorXd::Zero(fine.layout.dim());
      row.push_back(solve_to_tolerance(h, spec, rhs, x, tol).iterations);
    }
    table.push_back(row);
  }
  return table;
}

}  // namespace trilfa
