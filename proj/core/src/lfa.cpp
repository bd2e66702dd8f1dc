// Frequency sweeps for the smoothing, two-grid, and three-grid factors, the
// harmonic-block error symbols behind them, and the relaxation search.
#include "trilfa/lfa.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <thread>
#include <vector>

#include "trilfa/eig.hpp"

namespace trilfa {

namespace {

constexpr double kPi = std::numbers::pi;

ProblemSpec scaled(ProblemSpec p, double factor) {
  p.h *= factor;
  return p;
}

Eigen::MatrixXcd matpow(const Eigen::MatrixXcd& a, int k) {
  Eigen::MatrixXcd r = Eigen::MatrixXcd::Identity(a.rows(), a.cols());
  for (int i = 0; i < k; ++i) r = r * a;
  return r;
}

/// Block-diagonal matrix with the given equally sized square blocks.
Eigen::MatrixXcd block_diag(const std::vector<Eigen::MatrixXcd>& blocks) {
  const int m = static_cast<int>(blocks.front().rows());
  const int n = static_cast<int>(blocks.size());
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(n * m, n * m);
  for (int b = 0; b < n; ++b) d.block(b * m, b * m, m, m) = blocks[b];
  return d;
}

double inf_norm(const Eigen::MatrixXcd& a) { return a.cwiseAbs().rowwise().sum().maxCoeff(); }

/// Magnitude of a stencil family's symbol at a generic high frequency; anchors
/// the singularity test so that symbols that degenerate towards the zero
/// matrix (all entries -> 0, determinant and norm vanishing together) are
/// still recognised as singular.
double symbol_scale(const MultiStencil& st) {
  return inf_norm(operator_symbol(st, Freq{kPi / 2, kPi / 2}, PhaseConvention::Logical));
}

bool coarse_symbol_singular(const Eigen::MatrixXcd& ac, double tol, double ref_scale) {
  const double nrm = std::max(inf_norm(ac), ref_scale);
  return std::abs(ac.determinant()) <= tol * std::pow(nrm, static_cast<int>(ac.rows()));
}

struct RowStat {
  double best = -1.0;
  Freq arg{0.0, 0.0};
  int skipped = 0;
};

/// Evaluate eval_row(0..rows-1) concurrently, then reduce the row statistics
/// in index order so the result does not depend on the thread count.
template <typename EvalRow>
RowStat sweep_reduce(int rows, const EvalRow& eval_row) {
  std::vector<RowStat> stats(rows);
  std::vector<std::exception_ptr> errors(rows);
  const int nthreads = std::min(sweep_thread_count(), rows);
  auto run = [&](int r) {
    try {
      stats[r] = eval_row(r);
    } catch (...) {
      errors[r] = std::current_exception();
    }
  };
  if (nthreads <= 1) {
    for (int r = 0; r < rows; ++r) run(r);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (int t = 0; t < nthreads; ++t)
      pool.emplace_back([&] {
        for (int r = next.fetch_add(1); r < rows; r = next.fetch_add(1)) run(r);
      });
    for (auto& th : pool) th.join();
  }
  RowStat total;
  for (int r = 0; r < rows; ++r) {
    if (errors[r]) std::rethrow_exception(errors[r]);
    total.skipped += stats[r].skipped;
    if (stats[r].best > total.best) {
      total.best = stats[r].best;
      total.arg = stats[r].arg;
    }
  }
  return total;
}

bool inside_low_square(Freq t) {
  return t.t1 > -kPi / 2 && t.t1 <= kPi / 2 && t.t2 > -kPi / 2 && t.t2 <= kPi / 2;
}

}  // namespace

void check_config(const KGridConfig& cfg) {
  if (cfg.nu1 < 0 || cfg.nu2 < 0)
    throw std::invalid_argument("KGridConfig: negative smoothing count");
  if (cfg.gamma != 1 && cfg.gamma != 2) throw std::invalid_argument("KGridConfig: gamma not in {1,2}");
  if (cfg.freq_n < 8) throw std::invalid_argument("KGridConfig: freq_n < 8");
  if (!(cfg.singular_tol > 0.0)) throw std::invalid_argument("KGridConfig: singular_tol <= 0");
}

double FactorReport::value() const {
  if (mu) return *mu;
  if (rho2g) return *rho2g;
  if (rho3g) return *rho3g;
  throw std::logic_error("FactorReport: no factor set");
}

MultiStencil problem_stencils(const ProblemSpec& problem) {
  return problem.kind == ProblemKind::Stokes ? stokes_stencils(problem)
                                             : nedelec_curlcurl_stencils(problem);
}

Eigen::MatrixXcd sweep_power_symbol(const MultiStencil& st, const BlockSpec& spec, Freq theta,
                                    int nu) {
  if (nu == 0) return Eigen::MatrixXcd::Identity(st.num_vars(), st.num_vars());
  return matpow(smoother_symbol(st, spec, theta), nu);
}

std::optional<Eigen::MatrixXcd> two_grid_symbol(const MultiStencil& fine,
                                                const MultiStencil& coarse,
                                                const TransferSymbols& tr, const BlockSpec& spec,
                                                Freq theta00, const KGridConfig& cfg,
                                                CoarseOpMode mode) {
  const int m = fine.num_vars();
  const auto hs = harmonics_2h(theta00);

  std::vector<Eigen::MatrixXcd> a(4);
  for (int al = 0; al < 4; ++al) a[al] = operator_symbol(fine, hs[al], PhaseConvention::Logical);
  const Eigen::MatrixXcd af = block_diag(a);

  const Eigen::MatrixXcd p = tr.prolong(hs);
  const Eigen::MatrixXcd r = tr.restrict(hs);

  Eigen::MatrixXcd ac;
  if (mode == CoarseOpMode::GalerkinDiagnostic)
    ac = r * af * p;
  else
    ac = operator_symbol(coarse, fold(2.0 * theta00), PhaseConvention::Logical);
  if (coarse_symbol_singular(ac, cfg.singular_tol, symbol_scale(coarse))) return std::nullopt;

  Eigen::MatrixXcd corr =
      Eigen::MatrixXcd::Identity(4 * m, 4 * m) - p * ac.partialPivLu().solve(r * af);

  if (cfg.nu1 + cfg.nu2 == 0) return corr;
  std::vector<Eigen::MatrixXcd> s(4);
  for (int al = 0; al < 4; ++al) s[al] = smoother_symbol(fine, spec, hs[al]);
  Eigen::MatrixXcd result = corr;
  if (cfg.nu1 > 0) {
    std::vector<Eigen::MatrixXcd> pre(4);
    for (int al = 0; al < 4; ++al) pre[al] = matpow(s[al], cfg.nu1);
    result = result * block_diag(pre);
  }
  if (cfg.nu2 > 0) {
    std::vector<Eigen::MatrixXcd> post(4);
    for (int al = 0; al < 4; ++al) post[al] = matpow(s[al], cfg.nu2);
    result = block_diag(post) * result;
  }
  return result;
}

std::optional<Eigen::MatrixXcd> three_grid_symbol(const MultiStencil& fine,
                                                  const MultiStencil& mid,
                                                  const MultiStencil& coarse,
                                                  const TransferSymbols& tr,
                                                  const BlockSpec& spec, Freq theta00,
                                                  const KGridConfig& cfg, bool zero_inner) {
  const int m = fine.num_vars();
  const auto hs = harmonics_4h(theta00);

  Eigen::MatrixXcd inner_pow = Eigen::MatrixXcd::Zero(4 * m, 4 * m);
  if (!zero_inner) {
    const Freq mid_base{2.0 * theta00.t1, 2.0 * theta00.t2};
    const auto inner = two_grid_symbol(mid, coarse, tr, spec, mid_base, cfg);
    if (!inner) return std::nullopt;
    inner_pow = matpow(*inner, cfg.gamma);
  }

  Eigen::MatrixXcd p16 = Eigen::MatrixXcd::Zero(16 * m, 4 * m);
  Eigen::MatrixXcd r16 = Eigen::MatrixXcd::Zero(4 * m, 16 * m);
  const double mid_scale = symbol_scale(mid);
  std::vector<Eigen::MatrixXcd> ac(4);
  for (int o = 0; o < 4; ++o) {
    const std::array<Freq, 4> quartet{hs[4 * o], hs[4 * o + 1], hs[4 * o + 2], hs[4 * o + 3]};
    p16.block(4 * o * m, o * m, 4 * m, m) = tr.prolong(quartet);
    r16.block(o * m, 4 * o * m, m, 4 * m) = tr.restrict(quartet);
    ac[o] = operator_symbol(mid, fold(2.0 * quartet[0]), PhaseConvention::Logical);
    if (coarse_symbol_singular(ac[o], cfg.singular_tol, mid_scale)) return std::nullopt;
  }

  std::vector<Eigen::MatrixXcd> a(16);
  for (int t = 0; t < 16; ++t) a[t] = operator_symbol(fine, hs[t], PhaseConvention::Logical);
  const Eigen::MatrixXcd x = r16 * block_diag(a);

  Eigen::MatrixXcd y(4 * m, 16 * m);
  for (int o = 0; o < 4; ++o)
    y.middleRows(o * m, m) = ac[o].partialPivLu().solve(x.middleRows(o * m, m));

  Eigen::MatrixXcd corr =
      Eigen::MatrixXcd::Identity(16 * m, 16 * m) -
      p16 * ((Eigen::MatrixXcd::Identity(4 * m, 4 * m) - inner_pow) * y);

  if (cfg.nu1 + cfg.nu2 == 0) return corr;
  std::vector<Eigen::MatrixXcd> s(16);
  for (int t = 0; t < 16; ++t) s[t] = smoother_symbol(fine, spec, hs[t]);
  Eigen::MatrixXcd result = corr;
  if (cfg.nu1 > 0) {
    std::vector<Eigen::MatrixXcd> pre(16);
    for (int t = 0; t < 16; ++t) pre[t] = matpow(s[t], cfg.nu1);
    result = result * block_diag(pre);
  }
  if (cfg.nu2 > 0) {
    std::vector<Eigen::MatrixXcd> post(16);
    for (int t = 0; t < 16; ++t) post[t] = matpow(s[t], cfg.nu2);
    result = block_diag(post) * result;
  }
  return result;
}

FactorReport smoothing_factor(const ProblemSpec& problem, const BlockSpec& spec,
                              const KGridConfig& cfg) {
  check_config(cfg);
  const MultiStencil st = problem_stencils(problem);
  const int n = cfg.freq_n;
  const double step = kPi / (n - 1);

  const RowStat total = sweep_reduce(n, [&](int j1) {
    RowStat row;
    for (int j2 = 0; j2 < n; ++j2) {
      const Freq base{-kPi / 2 + j1 * step, -kPi / 2 + j2 * step};
      const auto hs = harmonics_2h(base);
      for (int al = 1; al < 4; ++al) {
        if (inside_low_square(hs[al])) continue;
        try {
          const double rho = spectral_radius(smoother_symbol(st, spec, hs[al]));
          if (rho > row.best) {
            row.best = rho;
            row.arg = hs[al];
          }
        } catch (const FrequencySingularity&) {
          ++row.skipped;
        }
      }
    }
    return row;
  });

  if (total.best < 0.0) throw AllFrequenciesSkipped("smoothing_factor: every sample skipped");
  FactorReport rep;
  rep.mu = std::pow(total.best, cfg.nu1 + cfg.nu2);
  rep.argmax_theta = total.arg;
  rep.skipped = total.skipped;
  return rep;
}

namespace {

FactorReport coarse_corrected_factor(const ProblemSpec& problem, const BlockSpec& spec,
                                     const KGridConfig& cfg, bool three_grid) {
  check_config(cfg);
  const MultiStencil fine = problem_stencils(problem);
  const MultiStencil mid = problem_stencils(scaled(problem, 2.0));
  const MultiStencil coarse = problem_stencils(scaled(problem, 4.0));
  const TransferSymbols tr = transfer_symbols(problem);

  const int n = cfg.freq_n;
  const double half = three_grid ? kPi / 4 : kPi / 2;
  const double step = 2.0 * half / n;

  const RowStat total = sweep_reduce(n, [&](int j1) {
    RowStat row;
    for (int j2 = 0; j2 < n; ++j2) {
      const Freq base{-half + (j1 + 0.5) * step, -half + (j2 + 0.5) * step};
      try {
        const auto sym = three_grid
                             ? three_grid_symbol(fine, mid, coarse, tr, spec, base, cfg)
                             : two_grid_symbol(fine, mid, tr, spec, base, cfg);
        if (!sym) {
          ++row.skipped;
          continue;
        }
        const double rho = spectral_radius(*sym);
        if (rho > row.best) {
          row.best = rho;
          row.arg = base;
        }
      } catch (const FrequencySingularity&) {
        ++row.skipped;
      }
    }
    return row;
  });

  if (total.best < 0.0)
    throw AllFrequenciesSkipped(three_grid ? "three_grid_factor: every sample skipped"
                                           : "two_grid_factor: every sample skipped");
  FactorReport rep;
  if (three_grid)
    rep.rho3g = total.best;
  else
    rep.rho2g = total.best;
  rep.argmax_theta = total.arg;
  rep.skipped = total.skipped;
  return rep;
}

}  // namespace

FactorReport two_grid_factor(const ProblemSpec& problem, const BlockSpec& spec,
                             const KGridConfig& cfg) {
  return coarse_corrected_factor(problem, spec, cfg, false);
}

FactorReport three_grid_factor(const ProblemSpec& problem, const BlockSpec& spec,
                               const KGridConfig& cfg) {
  return coarse_corrected_factor(problem, spec, cfg, true);
}

OmegaResult optimize_omega(const ProblemSpec& problem,
                           const std::function<BlockSpec(double, double)>& make_smoother,
                           const KGridConfig& cfg, const OmegaGrid& grid,
                           OmegaObjective objective) {
  auto count = [](double lo, double hi, double step) -> int {
    if (hi < lo) return 0;
    if (!(step > 0.0)) return hi == lo ? 1 : 0;
    return static_cast<int>(std::floor((hi - lo) / step + 0.5)) + 1;
  };
  const int nu = count(grid.u_min, grid.u_max, grid.u_step);
  const int np = count(grid.p_min, grid.p_max, grid.p_step);
  if (nu <= 0 || np <= 0) throw std::invalid_argument("optimize_omega: empty omega grid");

  OmegaResult best;
  best.rho = std::numeric_limits<double>::infinity();
  bool found = false;
  for (int iu = 0; iu < nu; ++iu) {
    const double wu = grid.u_min + iu * grid.u_step;
    for (int ip = 0; ip < np; ++ip) {
      const double wp = grid.p_min + ip * grid.p_step;
      const BlockSpec spec = make_smoother(wu, wp);
      double val;
      try {
        val = objective == OmegaObjective::Rho2g ? two_grid_factor(problem, spec, cfg).value()
                                                 : three_grid_factor(problem, spec, cfg).value();
      } catch (const AllFrequenciesSkipped&) {
        val = std::numeric_limits<double>::infinity();
      }
      if (!found || val < best.rho) {
        best = {wu, wp, val};
        found = true;
      }
    }
  }
  return best;
}

int sweep_thread_count() {
  if (const char* env = std::getenv("TRILFA_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

}  // namespace trilfa
