#include "trilfa/lattice.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace trilfa {

namespace {
constexpr double kPi = std::numbers::pi;

void require_in_square(Freq t, double half_side, const char* what) {
  const double lim = half_side + 1e-12;
  if (std::abs(t.t1) > lim || std::abs(t.t2) > lim) {
    throw std::domain_error(std::string(what) +
                            ": base frequency outside the admissible square");
  }
}
}  // namespace

FracOffset subgrid_offset(int subgrid) {
  switch (subgrid) {
    case 0: return kDeltaNode;
    case 1: return kDeltaEdge1;
    case 2: return kDeltaEdge2;
    case 3: return kDeltaEdge3;
    default: throw std::invalid_argument("subgrid_offset: subgrid must be 0..3");
  }
}

LatticeBasis::LatticeBasis(Vec2 e1, Vec2 e2, double h1, double h2)
    : e1_(e1), e2_(e2), h1_(h1), h2_(h2) {
  det_ = e1.x * e2.y - e1.y * e2.x;
  if (std::abs(det_) < 1e-12) {
    throw std::invalid_argument("LatticeBasis: basis vectors are degenerate");
  }
  // Reciprocal basis via the inverse transpose of [e1 e2].
  r1_ = {e2.y / det_, -e2.x / det_};
  r2_ = {-e1.y / det_, e1.x / det_};
}

LatticeBasis LatticeBasis::equilateral(double h) {
  return LatticeBasis({1.0, 0.0}, {0.5, std::sqrt(3.0) / 2.0}, h, h);
}

Vec2 LatticeBasis::node_position(Index2 idx, FracOffset d) const {
  return ((idx.k + d.d1) * h1_) * e1_ + ((idx.l + d.d2) * h2_) * e2_;
}

double fold_component(double t) {
  double y = std::remainder(t, 2.0 * kPi);
  if (y <= -kPi) y += 2.0 * kPi;
  return y;
}

Freq fold(Freq t) { return {fold_component(t.t1), fold_component(t.t2)}; }

Vec2 wavevector(const LatticeBasis& basis, Freq t) {
  return (t.t1 / basis.h1()) * basis.r1() + (t.t2 / basis.h2()) * basis.r2();
}

std::array<Freq, 4> harmonics_2h(Freq theta) {
  require_in_square(theta, kPi / 2.0, "harmonics_2h");
  const double s1 = kPi * sign_pos(theta.t1);
  const double s2 = kPi * sign_pos(theta.t2);
  std::array<Freq, 4> out;
  int idx = 0;
  for (int a1 = 0; a1 < 2; ++a1) {
    for (int a2 = 0; a2 < 2; ++a2) {
      out[idx++] = fold({theta.t1 - a1 * s1, theta.t2 - a2 * s2});
    }
  }
  return out;
}

std::array<Freq, 16> harmonics_4h(Freq theta) {
  require_in_square(theta, kPi / 4.0, "harmonics_4h");
  const double q1 = 0.5 * kPi * sign_pos(theta.t1);
  const double q2 = 0.5 * kPi * sign_pos(theta.t2);
  std::array<Freq, 16> out;
  int idx = 0;
  for (int n = 0; n < 2; ++n) {
    for (int m = 0; m < 2; ++m) {
      const Freq mid = fold({theta.t1 - n * q1, theta.t2 - m * q2});
      for (const Freq& f : harmonics_2h(mid)) out[idx++] = f;
    }
  }
  return out;
}

}  // namespace trilfa
