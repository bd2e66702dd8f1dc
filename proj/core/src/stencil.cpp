#include "trilfa/stencil.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace trilfa {

namespace {
bool entry_less(const StencilEntry& a, const StencilEntry& b) {
  if (a.off.l != b.off.l) return a.off.l < b.off.l;
  return a.off.k < b.off.k;
}
}  // namespace

MultiStencil::MultiStencil(int num_vars, std::vector<int> subgrids, double h)
    : m_(num_vars), h_(h), subgrids_(std::move(subgrids)) {
  if (m_ <= 0) throw std::invalid_argument("MultiStencil: num_vars must be positive");
  if (subgrids_.empty()) subgrids_.assign(m_, 0);
  if (static_cast<int>(subgrids_.size()) != m_) {
    throw std::invalid_argument("MultiStencil: subgrid list size mismatch");
  }
  for (int s : subgrids_) {
    if (s < 0 || s > 3) throw std::invalid_argument("MultiStencil: bad subgrid id");
  }
  entries_.resize(static_cast<std::size_t>(m_) * m_);
}

void MultiStencil::add(int i, int r, Index2 off, double c) {
  if (i < 0 || i >= m_ || r < 0 || r >= m_) {
    throw std::out_of_range("MultiStencil::add: variable index out of range");
  }
  auto& vec = entries_[static_cast<std::size_t>(i) * m_ + r];
  StencilEntry probe{off, c};
  auto it = std::lower_bound(vec.begin(), vec.end(), probe, entry_less);
  if (it != vec.end() && it->off == off) {
    it->c += c;
  } else {
    vec.insert(it, probe);
  }
}

double MultiStencil::coeff(int i, int r, Index2 off) const {
  const auto& vec = entries(i, r);
  StencilEntry probe{off, 0.0};
  auto it = std::lower_bound(vec.begin(), vec.end(), probe, entry_less);
  if (it != vec.end() && it->off == off) return it->c;
  return 0.0;
}

const std::vector<StencilEntry>& MultiStencil::entries(int i, int r) const {
  if (i < 0 || i >= m_ || r < 0 || r >= m_) {
    throw std::out_of_range("MultiStencil::entries: variable index out of range");
  }
  return entries_[static_cast<std::size_t>(i) * m_ + r];
}

int MultiStencil::reach() const {
  int rmax = 0;
  for (const auto& vec : entries_) {
    for (const auto& e : vec) {
      rmax = std::max({rmax, std::abs(e.off.k), std::abs(e.off.l)});
    }
  }
  return rmax;
}

void MultiStencil::prune(double tol) {
  for (auto& vec : entries_) {
    std::erase_if(vec, [tol](const StencilEntry& e) { return std::abs(e.c) <= tol; });
  }
}

Eigen::MatrixXcd MultiStencil::symbol(Freq theta, PhaseConvention pc) const {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(m_, m_);
  for (int i = 0; i < m_; ++i) {
    for (int r = 0; r < m_; ++r) {
      double dphase = 0.0;
      if (pc == PhaseConvention::Geometric) {
        const FracOffset di = var_offset(i);
        const FracOffset dr = var_offset(r);
        dphase = theta.t1 * (dr.d1 - di.d1) + theta.t2 * (dr.d2 - di.d2);
      }
      cdouble acc = 0.0;
      for (const auto& e : entries(i, r)) {
        const double ph = theta.t1 * e.off.k + theta.t2 * e.off.l + dphase;
        acc += e.c * std::polar(1.0, ph);
      }
      out(i, r) = acc;
    }
  }
  return out;
}

double MultiStencil::adjoint_defect() const {
  double worst = 0.0;
  for (int i = 0; i < m_; ++i) {
    for (int r = 0; r < m_; ++r) {
      for (const auto& e : entries(i, r)) {
        const double mirror = coeff(r, i, Index2{-e.off.k, -e.off.l});
        worst = std::max(worst, std::abs(e.c - mirror));
      }
    }
  }
  return worst;
}

Eigen::MatrixXcd operator_symbol(const MultiStencil& st, Freq theta,
                                 PhaseConvention pc) {
  return st.symbol(theta, pc);
}

}  // namespace trilfa
