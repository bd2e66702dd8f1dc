// Transfer symbols: nodal seven-point interpolation and canonical edge
// interpolation kernels, assembled into harmonic-major prolongation and
// restriction matrices.
#include "trilfa/transfers.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace trilfa {

namespace {

// Canonical edge interpolation kernel: fine edge of subgrid i at fine index
// 2K + y receives weight num/4 from the coarse edge of subgrid r at coarse
// index K.  A fine edge lying on half of a coarse edge gets 1/2 of its
// circulation; fine edges interior to a coarse triangle get signed quarters
// of the surrounding coarse circulations.
struct EdgeKernelEntry {
  int i, r, y1, y2;
  double num;  // weight in quarters
};

constexpr EdgeKernelEntry kEdgeKernel[] = {
    {0, 0, 0, 0, 2.0},  {0, 0, 1, 0, 2.0},  {0, 0, 1, 1, 1.0},  {0, 0, 0, -1, 1.0},
    {0, 1, -1, 1, -1.0}, {0, 1, 0, 1, -1.0},
    {0, 2, 1, 1, 1.0},  {0, 2, 0, 1, 1.0},
    {1, 0, 1, 0, -1.0}, {1, 0, 1, -1, -1.0},
    {1, 1, 0, 0, 2.0},  {1, 1, 0, 1, 2.0},  {1, 1, -1, 0, 1.0}, {1, 1, 1, 1, 1.0},
    {1, 2, 1, 0, 1.0},  {1, 2, 1, 1, 1.0},
    {2, 0, 1, 0, 1.0},  {2, 0, 0, -1, 1.0},
    {2, 1, -1, 0, 1.0}, {2, 1, 0, 1, 1.0},
    {2, 2, 0, 0, 2.0},  {2, 2, 1, 1, 2.0},  {2, 2, 1, 0, 1.0},  {2, 2, 0, 1, 1.0},
};

}  // namespace

const std::vector<EdgeKernelTap>& edge_kernel_taps() {
  static const std::vector<EdgeKernelTap> taps = [] {
    std::vector<EdgeKernelTap> out;
    for (const auto& e : kEdgeKernel) out.push_back({e.i, e.r, {e.y1, e.y2}, e.num});
    return out;
  }();
  return taps;
}

double nodal_kernel_symbol(Freq t) {
  return 1.0 + std::cos(t.t1) + std::cos(t.t2) + std::cos(t.t1 + t.t2);
}

cdouble edge_kernel_symbol(int i, int r, Freq t) {
  if (i < 0 || i > 2 || r < 0 || r > 2) throw std::invalid_argument("edge_kernel_symbol: subgrid");
  cdouble s = 0.0;
  for (const auto& e : kEdgeKernel) {
    if (e.i != i || e.r != r) continue;
    const double phase = -(t.t1 * e.y1 + t.t2 * e.y2);
    s += (e.num / 4.0) * std::polar(1.0, phase);
  }
  return s;
}

Eigen::MatrixXcd nodal_prolong_symbol(const std::array<Freq, 4>& hs, int num_vars) {
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(4 * num_vars, num_vars);
  for (int a = 0; a < 4; ++a) {
    const double w = nodal_kernel_symbol(hs[a]) / 4.0;
    for (int i = 0; i < num_vars; ++i) p(a * num_vars + i, i) = w;
  }
  return p;
}

Eigen::MatrixXcd edge_prolong_symbol(const std::array<Freq, 4>& hs) {
  Eigen::MatrixXcd p(12, 3);
  for (int a = 0; a < 4; ++a)
    for (int i = 0; i < 3; ++i)
      for (int r = 0; r < 3; ++r) p(a * 3 + i, r) = edge_kernel_symbol(i, r, hs[a]) / 4.0;
  return p;
}

TransferSymbols transfer_symbols(const ProblemSpec& problem) {
  TransferSymbols tr;
  tr.sigma = 4.0;
  if (problem.kind == ProblemKind::Stokes) {
    tr.kind = {TransferKind::NodalLinear, TransferKind::NodalLinear, TransferKind::NodalLinear};
    tr.prolong = [](const std::array<Freq, 4>& hs) { return nodal_prolong_symbol(hs, 3); };
  } else {
    tr.kind = {TransferKind::EdgeCanonical, TransferKind::EdgeCanonical,
               TransferKind::EdgeCanonical};
    tr.prolong = [](const std::array<Freq, 4>& hs) { return edge_prolong_symbol(hs); };
  }
  const double sigma = tr.sigma;
  const auto prolong = tr.prolong;
  tr.restrict = [prolong, sigma](const std::array<Freq, 4>& hs) {
    return Eigen::MatrixXcd(sigma * prolong(hs).adjoint());
  };
  return tr;
}

}  // namespace trilfa
