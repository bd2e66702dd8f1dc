// Plane lattice geometry for triangular grids: oblique index bases, reciprocal
// bases, fractional subgrid offsets, and the frequency-space bookkeeping
// (folding, coupled harmonics) used by the Fourier analysis layer.
#pragma once

#include <array>

namespace trilfa {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

/// Integer lattice index (k along the first basis direction, l along the
/// second).
struct Index2 {
  int k = 0;
  int l = 0;
  friend bool operator==(Index2 a, Index2 b) { return a.k == b.k && a.l == b.l; }
};

/// Fractional offset of a staggered subgrid, in lattice coordinates.
struct FracOffset {
  double d1 = 0.0;
  double d2 = 0.0;
};

/// Offsets of the node grid (0) and the three edge-midpoint subgrids (1..3)
/// of a triangular mesh, as fractions of the lattice basis vectors.
inline constexpr FracOffset kDeltaNode{0.0, 0.0};
inline constexpr FracOffset kDeltaEdge1{0.5, 0.0};
inline constexpr FracOffset kDeltaEdge2{0.0, 0.5};
inline constexpr FracOffset kDeltaEdge3{0.5, 0.5};

FracOffset subgrid_offset(int subgrid);  ///< 0 = nodes, 1..3 = edge subgrids.

/// An oblique basis {e1, e2} with step lengths h1, h2 along each direction,
/// together with the reciprocal basis {r1, r2} of the direction vectors,
/// normalised so that dot(e_i, r_j) = delta_ij.
class LatticeBasis {
public:
  /// Throws std::invalid_argument when the direction vectors are degenerate
  /// (|det[e1 e2]| < 1e-12).
  LatticeBasis(Vec2 e1, Vec2 e2, double h1 = 1.0, double h2 = 1.0);

  /// Triangular lattice with 60 degrees between unit directions:
  /// e1 = (1,0), e2 = (1/2, sqrt(3)/2), equal steps h.
  static LatticeBasis equilateral(double h = 1.0);

  Vec2 e1() const { return e1_; }
  Vec2 e2() const { return e2_; }
  Vec2 r1() const { return r1_; }
  Vec2 r2() const { return r2_; }
  double h1() const { return h1_; }
  double h2() const { return h2_; }
  double det() const { return det_; }

  /// Physical position of lattice node `idx` shifted by the fractional
  /// subgrid offset `d`: (k + d1) h1 e1 + (l + d2) h2 e2.
  Vec2 node_position(Index2 idx, FracOffset d = kDeltaNode) const;

private:
  Vec2 e1_, e2_, r1_, r2_;
  double h1_, h2_;
  double det_;
};

/// A lattice frequency theta = (t1, t2); the phase attached to node x is
/// exp(i theta . x) with the dot taken in index space.
struct Freq {
  double t1 = 0.0;
  double t2 = 0.0;
};

inline Freq operator+(Freq a, Freq b) { return {a.t1 + b.t1, a.t2 + b.t2}; }
inline Freq operator-(Freq a, Freq b) { return {a.t1 - b.t1, a.t2 - b.t2}; }
inline Freq operator*(double s, Freq a) { return {s * a.t1, s * a.t2}; }

/// Sign convention used by the harmonic formulas: sign_pos(0) = +1.
inline double sign_pos(double x) { return x < 0.0 ? -1.0 : 1.0; }

/// Fold a scalar frequency component into the fundamental interval (-pi, pi].
double fold_component(double t);

/// Fold both components into (-pi, pi] x (-pi, pi].
Freq fold(Freq t);

/// Frequency-space image of a lattice frequency: t1 r1 + t2 r2, so that the
/// plane wave exp(i kappa . p) agrees with exp(i theta . x) at node indices.
Vec2 wavevector(const LatticeBasis& basis, Freq t);

/// The four frequencies coupled by a coarsening step of factor two, in the
/// fixed lexicographic order a = (0,0), (0,1), (1,0), (1,1):
///   theta^a = theta - (a1 pi sign_pos(t1), a2 pi sign_pos(t2)),
/// folded into (-pi, pi]^2.  Requires theta in [-pi/2, pi/2]^2 (the closed
/// square; callers normally pass strictly interior low frequencies).
/// Throws std::domain_error outside that square.
std::array<Freq, 4> harmonics_2h(Freq theta);

/// The sixteen frequencies coupled by two consecutive coarsening steps for a
/// base frequency in [-pi/4, pi/4]^2 (throws std::domain_error outside).
/// Outer index (n,m), lexicographic, selects the intermediate-grid shift
///   theta_nm = theta - (n pi/2 sign_pos(t1), m pi/2 sign_pos(t2));
/// the inner index runs over harmonics_2h(theta_nm).  Element 4*o + i is the
/// i-th fine harmonic of the o-th intermediate frequency.
std::array<Freq, 16> harmonics_4h(Freq theta);

}  // namespace trilfa
