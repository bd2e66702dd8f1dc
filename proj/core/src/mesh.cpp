// Construction and export of the refined equilateral-triangle mesh.
#include "trilfa/mesh.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace trilfa {

TriMesh::TriMesh(int level) : level_(level) {
  if (level < 0 || level > 12) throw std::invalid_argument("TriMesh: level out of range");
  n_ = 1 << level;
  h_ = 1.0 / n_;
  const int grid_size = (n_ + 1) * (n_ + 1);
  vertex_map_.assign(grid_size, -1);
  for (auto& m : edge_map_) m.assign(grid_size, -1);

  const double root3_2 = std::sqrt(3.0) / 2.0;
  for (int l = 0; l <= n_; ++l) {
    for (int k = l; k <= n_; ++k) {
      const Index2 a{k, l};
      vertex_map_[grid(a)] = num_vertices();
      vertex_index_.push_back(a);
      vertex_pos_.push_back(Vec2{h_ * (k - 0.5 * l), h_ * root3_2 * l});
      vertex_boundary_.push_back(l == 0 || k == n_ || k == l);
    }
  }

  // Edge subgrids: +f1 edges (k,l)-(k+1,l) exist for l <= k <= n-1, +f2 edges
  // (k,l)-(k,l+1) for l+1 <= k <= n, +f3 edges (k,l)-(k+1,l+1) for l <= k <= n-1.
  auto add_edge = [&](int sub, Index2 a, Index2 head, bool boundary) {
    edge_map_[sub][grid(a)] = num_edges();
    edge_sub_.push_back(sub);
    edge_index_.push_back(a);
    edge_vertices_.push_back({vertex_id(a), vertex_id(head)});
    edge_boundary_.push_back(boundary);
  };
  for (int l = 0; l <= n_ - 1; ++l)
    for (int k = l; k <= n_ - 1; ++k)
      add_edge(0, {k, l}, {k + 1, l}, l == 0);
  for (int l = 0; l <= n_ - 1; ++l)
    for (int k = l + 1; k <= n_; ++k)
      add_edge(1, {k, l}, {k, l + 1}, k == n_);
  for (int l = 0; l <= n_ - 1; ++l)
    for (int k = l; k <= n_ - 1; ++k)
      add_edge(2, {k, l}, {k + 1, l + 1}, k == l);

  // Down triangles anchored at (k,l) additionally need l < k so that the
  // third vertex (k,l+1) exists.
  for (int l = 0; l <= n_ - 1; ++l) {
    for (int k = l; k <= n_ - 1; ++k) {
      cells_.push_back({{k, l}, true});
      if (k > l) cells_.push_back({{k, l}, false});
    }
  }
}

int TriMesh::vertex_id(Index2 a) const {
  if (!in_domain(a)) return -1;
  return vertex_map_[grid(a)];
}

int TriMesh::edge_id(int sub, Index2 a) const {
  if (sub < 0 || sub > 2 || !in_domain(a)) return -1;
  return edge_map_[sub][grid(a)];
}

void write_mesh(const TriMesh& mesh, std::ostream& out) {
  out << "trimesh level " << mesh.level() << " vertices " << mesh.num_vertices() << " triangles "
      << mesh.num_triangles() << " edges " << mesh.num_edges() << "\n";
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const Index2 a = mesh.vertex_index(v);
    const Vec2 p = mesh.vertex_pos(v);
    out << "v " << a.k << ' ' << a.l << ' ' << p.x << ' ' << p.y << ' '
        << (mesh.vertex_on_boundary(v) ? 1 : 0) << "\n";
  }
  for (const TriMesh::Cell& c : mesh.cells())
    out << "t " << c.anchor.k << ' ' << c.anchor.l << ' ' << (c.up ? 1 : 0) << "\n";
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const Index2 a = mesh.edge_index(e);
    const auto tv = mesh.edge_vertices(e);
    out << "e " << mesh.edge_sub(e) << ' ' << a.k << ' ' << a.l << ' ' << tv[0] << ' ' << tv[1]
        << ' ' << (mesh.edge_on_boundary(e) ? 1 : 0) << "\n";
  }
}

}  // namespace trilfa
