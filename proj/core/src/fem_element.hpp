// Shared element-level building blocks for assembly on equilateral-triangle
// meshes: element geometry, the two triangle families of the structured grid,
// the oriented edge unknowns of a triangle, and the P1 / edge-element matrices.
// Internal header (not installed).
#pragma once

#include <Eigen/Dense>
#include <stdexcept>

#include "trilfa/lattice.hpp"

namespace trilfa::fem {

struct ElementGeometry {
  double area = 0.0;
  Vec2 grad[3];  // gradients of the three barycentric coordinates
};

// P0/P1/P2 are the vertex positions, counter-clockwise.
inline ElementGeometry element_geometry(const Vec2& p0, const Vec2& p1, const Vec2& p2) {
  Eigen::Matrix3d m;
  m << 1.0, p0.x, p0.y, 1.0, p1.x, p1.y, 1.0, p2.x, p2.y;
  const Eigen::Matrix3d inv = m.inverse();
  ElementGeometry g;
  const double cross = (p1.x - p0.x) * (p2.y - p0.y) - (p1.y - p0.y) * (p2.x - p0.x);
  g.area = 0.5 * cross;
  if (g.area <= 0.0) throw std::logic_error("element_geometry: element not counter-clockwise");
  for (int i = 0; i < 3; ++i) g.grad[i] = Vec2{inv(1, i), inv(2, i)};
  return g;
}

// One triangle together with the lattice indices of its vertices.
struct Tri {
  Index2 v[3];
};

// The two triangle families attached to lattice point a.
inline Tri up_tri(Index2 a) { return Tri{{a, {a.k + 1, a.l}, {a.k + 1, a.l + 1}}}; }
inline Tri down_tri(Index2 a) { return Tri{{a, {a.k + 1, a.l + 1}, {a.k, a.l + 1}}}; }

// Edge unknown of a triangle: subgrid (0-based), anchor lattice point, and the
// local vertex indices of its tail and head with respect to the triangle.
// Orientation is global per subgrid (+f1, +f2, +f3 respectively).
struct TriEdge {
  int sub;
  Index2 anchor;
  int tail, head;
};

inline void tri_edges(const Tri& t, bool up, TriEdge out[3]) {
  if (up) {
    out[0] = TriEdge{0, t.v[0], 0, 1};                    // +f1 edge
    out[1] = TriEdge{1, {t.v[0].k + 1, t.v[0].l}, 1, 2};  // +f2 edge
    out[2] = TriEdge{2, t.v[0], 0, 2};                    // +f3 edge
  } else {
    out[0] = TriEdge{2, t.v[0], 0, 1};                    // +f3 edge
    out[1] = TriEdge{0, {t.v[0].k, t.v[0].l + 1}, 2, 1};  // +f1 edge
    out[2] = TriEdge{1, t.v[0], 0, 2};                    // +f2 edge
  }
}

// Nodal element blocks: stiffness (grad.grad), the two first-derivative
// coupling blocks b[i][j] = area/3 * (grad_j)_x|_y (int(lambda_i) = area/3).
inline Eigen::Matrix3d p1_stiffness(const ElementGeometry& g) {
  Eigen::Matrix3d out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out(i, j) = g.area * dot(g.grad[i], g.grad[j]);
  return out;
}

inline Eigen::Matrix3d p1_grad_x(const ElementGeometry& g) {
  Eigen::Matrix3d out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out(i, j) = g.area / 3.0 * g.grad[j].x;
  return out;
}

inline Eigen::Matrix3d p1_grad_y(const ElementGeometry& g) {
  Eigen::Matrix3d out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out(i, j) = g.area / 3.0 * g.grad[j].y;
  return out;
}

// Edge-element blocks for the three oriented edges e[0..2] of one triangle:
// rotrot(a,b) = int(rot w_a rot w_b), mass(a,b) = int(w_a . w_b), with the
// integral degree-of-freedom normalization.
inline void whitney_matrices(const ElementGeometry& g, const TriEdge e[3], Eigen::Matrix3d& rotrot,
                             Eigen::Matrix3d& mass) {
  // int(lambda_i lambda_j) = area (1 + delta_ij) / 12.
  auto ii = [&](int i, int j) { return g.area * (i == j ? 2.0 : 1.0) / 12.0; };
  for (int a = 0; a < 3; ++a) {
    const double rot_a = 2.0 * (g.grad[e[a].tail].x * g.grad[e[a].head].y -
                                g.grad[e[a].tail].y * g.grad[e[a].head].x);
    for (int b = 0; b < 3; ++b) {
      const double rot_b = 2.0 * (g.grad[e[b].tail].x * g.grad[e[b].head].y -
                                  g.grad[e[b].tail].y * g.grad[e[b].head].x);
      rotrot(a, b) = g.area * rot_a * rot_b;
      mass(a, b) = dot(g.grad[e[a].head], g.grad[e[b].head]) * ii(e[a].tail, e[b].tail) -
                   dot(g.grad[e[a].head], g.grad[e[b].tail]) * ii(e[a].tail, e[b].head) -
                   dot(g.grad[e[a].tail], g.grad[e[b].head]) * ii(e[a].head, e[b].tail) +
                   dot(g.grad[e[a].tail], g.grad[e[b].tail]) * ii(e[a].head, e[b].head);
    }
  }
}

}  // namespace trilfa::fem
