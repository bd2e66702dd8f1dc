// Update-schedule construction and the Fourier symbol of one overlapping
// block sweep.
#include "trilfa/smoother.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numeric>

namespace trilfa {
namespace {

// Sweep order on block anchors: l outer ascending, k inner ascending.
bool precedes_origin(Index2 c) { return c.l < 0 || (c.l == 0 && c.k < 0); }

void check_spec(const BlockSpec& spec) {
  if (spec.num_vars <= 0) throw std::invalid_argument("BlockSpec: num_vars must be positive");
  if (!spec.omega.empty() && static_cast<int>(spec.omega.size()) != spec.num_vars)
    throw std::invalid_argument("BlockSpec: omega size must match num_vars");
  for (std::size_t a = 0; a < spec.members.size(); ++a) {
    const BlockMember& ma = spec.members[a];
    if (ma.var < 0 || ma.var >= spec.num_vars)
      throw std::invalid_argument("BlockSpec: member variable out of range");
    for (std::size_t b = a + 1; b < spec.members.size(); ++b)
      if (spec.members[b].var == ma.var && spec.members[b].off == ma.off)
        throw std::invalid_argument("BlockSpec: duplicate member");
  }
  if (spec.local_solver == LocalSolver::Diagonal &&
      (spec.schur_var < 0 || spec.schur_var >= spec.num_vars))
    throw std::invalid_argument("BlockSpec: Diagonal solver requires a valid schur_var");
}

}  // namespace

BlockSpec stokes_block(LocalSolver solver, double omega_u, double omega_p) {
  BlockSpec spec;
  spec.num_vars = 3;
  const Index2 ring[6] = {{1, 0}, {1, 1}, {0, 1}, {-1, 0}, {-1, -1}, {0, -1}};
  for (int var = 0; var < 2; ++var)
    for (const Index2& o : ring) spec.members.push_back({var, o});
  spec.members.push_back({2, {0, 0}});
  spec.local_solver = solver;
  spec.omega = {omega_u, omega_u, omega_p};
  spec.schur_var = 2;
  return spec;
}

BlockSpec curlcurl_block(double omega) {
  BlockSpec spec;
  spec.num_vars = 3;
  spec.members = {{0, {0, 0}}, {0, {-1, 0}}, {1, {0, 0}},
                  {1, {0, -1}}, {2, {0, 0}}, {2, {-1, -1}}};
  spec.local_solver = LocalSolver::Full;
  spec.omega = {omega, omega, omega};
  return spec;
}

std::vector<int> updates_per_sweep(const BlockSpec& spec) {
  check_spec(spec);
  std::vector<int> s(spec.num_vars, 0);
  for (const BlockMember& m : spec.members) ++s[m.var];
  return s;
}

UpdateCount update_count(const BlockSpec& spec, int var, Index2 off) {
  check_spec(spec);
  UpdateCount uc;
  for (const BlockMember& m : spec.members) {
    if (m.var != var) continue;
    const Index2 anchor{off.k - m.off.k, off.l - m.off.l};
    if (anchor.k == 0 && anchor.l == 0) uc.updated_now = true;
    if (precedes_origin(anchor)) ++uc.count;
  }
  return uc;
}

UpdateSchedule update_schedule(const BlockSpec& spec, const MultiStencil& st) {
  check_spec(spec);
  if (st.num_vars() != spec.num_vars)
    throw std::invalid_argument("update_schedule: stencil/spec variable counts differ");
  UpdateSchedule sched;
  sched.s = updates_per_sweep(spec);
  std::map<std::pair<int, std::pair<int, int>>, int> external;  // (var,(l,k)) -> count
  for (const BlockMember& m : spec.members) {
    const UpdateCount uc = update_count(spec, m.var, m.off);
    sched.members.push_back({m.var, m.off, uc.count, true});
    for (int r = 0; r < spec.num_vars; ++r) {
      for (const StencilEntry& e : st.entries(m.var, r)) {
        const Index2 x{m.off.k + e.off.k, m.off.l + e.off.l};
        const UpdateCount xc = update_count(spec, r, x);
        if (xc.updated_now) continue;
        external[{r, {x.l, x.k}}] = xc.count;
      }
    }
  }
  for (const auto& [key, count] : external)
    sched.external.push_back({key.first, {key.second.second, key.second.first}, count, false});
  return sched;
}

Eigen::MatrixXd build_local_matrix(const MultiStencil& st, const BlockSpec& spec) {
  check_spec(spec);
  const int q = static_cast<int>(spec.members.size());
  Eigen::MatrixXd a(q, q);
  for (int j = 0; j < q; ++j) {
    const BlockMember& row = spec.members[j];
    for (int b = 0; b < q; ++b) {
      const BlockMember& col = spec.members[b];
      double val = st.coeff(row.var, col.var,
                            {col.off.k - row.off.k, col.off.l - row.off.l});
      if (spec.local_solver == LocalSolver::Diagonal && j != b &&
          row.var != spec.schur_var && col.var != spec.schur_var)
        val = 0.0;
      a(j, b) = val;
    }
  }
  return a;
}

PQSystem build_pq(const MultiStencil& st, const BlockSpec& spec, Freq theta,
                  PhaseConvention pc) {
  check_spec(spec);
  if (st.num_vars() != spec.num_vars)
    throw std::invalid_argument("build_pq: stencil/spec variable counts differ");
  const int m = spec.num_vars;
  const std::vector<int> s = updates_per_sweep(spec);
  const int s_max = *std::max_element(s.begin(), s.end());
  const int q = static_cast<int>(spec.members.size());
  if (q != std::accumulate(s.begin(), s.end(), 0))
    throw std::invalid_argument("build_pq: member count must equal total stage count");

  PQSystem sys;
  sys.theta = theta;
  sys.q = q;
  // Columns stage-major: global stage g holds, variable-ascending, stage
  // n = g - (s_max - s(var)) of every variable with n >= 1.  This places all
  // final stages in the trailing block of the unknown vector.
  sys.col_index.assign(m, {});
  for (int var = 0; var < m; ++var) sys.col_index[var].assign(s[var], -1);
  {
    int col = 0;
    for (int g = 1; g <= s_max; ++g)
      for (int var = 0; var < m; ++var) {
        const int n = g - (s_max - s[var]);
        if (n >= 1) sys.col_index[var][n - 1] = col++;
      }
  }

  sys.P = Eigen::MatrixXcd::Zero(q, q);
  sys.Q = Eigen::MatrixXcd::Zero(q, m);
  const Eigen::MatrixXd local = build_local_matrix(st, spec);

  // Subgrid carrier phases (identical for all-nodal problems); applied as a
  // per-variable column scaling, a similarity that leaves the spectrum of the
  // sweep symbol unchanged.
  std::vector<cdouble> carrier(m, cdouble(1.0, 0.0));
  if (pc == PhaseConvention::Geometric)
    for (int var = 0; var < m; ++var) {
      const FracOffset d = st.var_offset(var);
      carrier[var] = std::polar(1.0, theta.t1 * d.d1 + theta.t2 * d.d2);
    }

  auto deposit = [&](int row, int var, int stage, cdouble value) {
    value *= carrier[var];
    if (stage == 0)
      sys.Q(row, var) -= value;  // right-hand side keeps the opposite sign
    else
      sys.P(row, sys.col_index[var][stage - 1]) += value;
  };

  for (int j = 0; j < q; ++j) {
    const BlockMember& mem = spec.members[j];
    // Residual of member j's equation at the mixed pre-solve states.
    for (int r = 0; r < m; ++r) {
      for (const StencilEntry& e : st.entries(mem.var, r)) {
        const Index2 x{mem.off.k + e.off.k, mem.off.l + e.off.l};
        const cdouble phase = std::polar(e.c, theta.t1 * x.k + theta.t2 * x.l);
        deposit(j, r, update_count(spec, r, x).count, phase);
      }
    }
    // Corrections of all members, as solved through the local matrix.  Each
    // applied update is omega * delta, so delta itself carries 1/omega.
    for (int b = 0; b < q; ++b) {
      if (local(j, b) == 0.0) continue;
      const BlockMember& mb = spec.members[b];
      const int stage = update_count(spec, mb.var, mb.off).count;
      const cdouble phase =
          std::polar(local(j, b) / spec.omega_of(mb.var), theta.t1 * mb.off.k + theta.t2 * mb.off.l);
      deposit(j, mb.var, stage, -phase);
      deposit(j, mb.var, stage + 1, phase);
    }
  }
  return sys;
}

Eigen::MatrixXcd smoother_symbol(const MultiStencil& st, const BlockSpec& spec, Freq theta,
                                 PhaseConvention pc) {
  const PQSystem sys = build_pq(st, spec, theta, pc);
  const int m = spec.num_vars;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(sys.P);
  if (!(lu.rcond() > 1e-14))
    throw FrequencySingularity("sweep symbol singular at theta=(" + std::to_string(theta.t1) +
                                   "," + std::to_string(theta.t2) + ")",
                               theta);
  const Eigen::MatrixXcd all = lu.solve(sys.Q);
  return all.bottomRows(m);
}

}  // namespace trilfa
