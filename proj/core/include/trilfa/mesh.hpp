// Uniformly refined equilateral-triangle mesh of the unit triangle: vertex,
// triangle, and oriented-edge enumeration with boundary classification and a
// plain-text export for debugging.
#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include "trilfa/lattice.hpp"

namespace trilfa {

/// Mesh of the unit equilateral triangle with corners (0,0), (1,0),
/// (1/2, sqrt(3)/2), refined `level` times (side length h = 2^-level).
/// Vertices carry lattice indices (k,l) with 0 <= l <= k <= n, n = 2^level,
/// at position h*(k - l/2, l*sqrt(3)/2); the three boundary sides are the
/// bottom (l = 0), the right side (k = n), and the left side (k = l).
/// Edges live on three subgrids with global orientations +f1/+f2/+f3
/// (anchor (k,l) to (k+1,l) / (k,l+1) / (k+1,l+1)); both enumerations are
/// lexicographic, l outer ascending, k inner ascending, edges subgrid-major.
class TriMesh {
 public:
  explicit TriMesh(int level);

  int level() const { return level_; }
  int n() const { return n_; }
  double h() const { return h_; }

  int num_vertices() const { return static_cast<int>(vertex_index_.size()); }
  int num_edges() const { return static_cast<int>(edge_index_.size()); }
  int num_triangles() const { return n_ * n_; }

  /// Vertex id for lattice index (k,l); -1 outside the mesh.
  int vertex_id(Index2 a) const;
  Index2 vertex_index(int id) const { return vertex_index_[id]; }
  Vec2 vertex_pos(int id) const { return vertex_pos_[id]; }
  bool vertex_on_boundary(int id) const { return vertex_boundary_[id]; }

  /// Edge id for (subgrid, anchor); -1 if the edge does not exist.
  int edge_id(int sub, Index2 a) const;
  int edge_sub(int id) const { return edge_sub_[id]; }
  Index2 edge_index(int id) const { return edge_index_[id]; }
  /// Vertex ids of the oriented edge: {tail, head}.
  std::array<int, 2> edge_vertices(int id) const { return edge_vertices_[id]; }
  bool edge_on_boundary(int id) const { return edge_boundary_[id]; }

  struct Cell {
    Index2 anchor;
    bool up = true;
  };
  const std::vector<Cell>& cells() const { return cells_; }

 private:
  int grid(Index2 a) const { return a.l * (n_ + 1) + a.k; }
  bool in_domain(Index2 a) const { return 0 <= a.l && a.l <= a.k && a.k <= n_; }

  int level_ = 0;
  int n_ = 1;
  double h_ = 1.0;
  std::vector<Index2> vertex_index_;
  std::vector<Vec2> vertex_pos_;
  std::vector<bool> vertex_boundary_;
  std::vector<int> vertex_map_;
  std::vector<int> edge_sub_;
  std::vector<Index2> edge_index_;
  std::vector<std::array<int, 2>> edge_vertices_;
  std::vector<bool> edge_boundary_;
  std::array<std::vector<int>, 3> edge_map_;
  std::vector<Cell> cells_;
};

/// Plain-text mesh dump: a header line, then one `v k l x y boundary` line per
/// vertex, one `t k l up` line per triangle, and one `e sub k l tail head
/// boundary` line per edge, in enumeration order.
void write_mesh(const TriMesh& mesh, std::ostream& out);

}  // namespace trilfa
