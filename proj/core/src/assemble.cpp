// Assembly of the sparse systems and mesh-level transfer operators.
#include "trilfa/assemble.hpp"

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "fem_element.hpp"
#include "trilfa/transfers.hpp"

namespace trilfa {
namespace {

using Triplet = Eigen::Triplet<double>;

fem::ElementGeometry cell_geometry(const TriMesh& mesh, const fem::Tri& t) {
  const Vec2 p0 = mesh.vertex_pos(mesh.vertex_id(t.v[0]));
  const Vec2 p1 = mesh.vertex_pos(mesh.vertex_id(t.v[1]));
  const Vec2 p2 = mesh.vertex_pos(mesh.vertex_id(t.v[2]));
  return fem::element_geometry(p0, p1, p2);
}

void assemble_stokes(Discretization& d) {
  const TriMesh& mesh = d.mesh;
  const double beta_h2 = d.problem.beta * mesh.h() * mesh.h();

  // Boundary column enumeration: u block then v block, boundary vertices in
  // vertex order.
  std::vector<int> bcol(mesh.num_vertices(), -1);
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (!mesh.vertex_on_boundary(v)) continue;
    bcol[v] = static_cast<int>(d.boundary_vertex.size());
    d.boundary_vertex.push_back(v);
  }
  const int nb = static_cast<int>(d.boundary_vertex.size());

  std::vector<Triplet> sys, bnd;
  auto add = [&](int var_i, int vi, int var_j, int vj, double val) {
    const int row = d.dof[var_i][vi];
    if (row < 0) return;  // wall rows are dropped
    const int col = d.dof[var_j][vj];
    if (col >= 0) {
      sys.emplace_back(row, col, val);
    } else {
      bnd.emplace_back(row, var_j * nb + bcol[vj], val);
    }
  };

  for (const TriMesh::Cell& c : mesh.cells()) {
    const fem::Tri t = c.up ? fem::up_tri(c.anchor) : fem::down_tri(c.anchor);
    const fem::ElementGeometry geo = cell_geometry(mesh, t);
    const Eigen::Matrix3d lap = fem::p1_stiffness(geo);
    const Eigen::Matrix3d bx = fem::p1_grad_x(geo);
    const Eigen::Matrix3d by = fem::p1_grad_y(geo);
    int vid[3];
    for (int i = 0; i < 3; ++i) vid[i] = mesh.vertex_id(t.v[i]);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        add(0, vid[i], 0, vid[j], lap(i, j));
        add(1, vid[i], 1, vid[j], lap(i, j));
        // Pressure gradient in the momentum rows, its transpose in the
        // continuity rows, and the size-scaled pressure stabilization.
        add(0, vid[i], 2, vid[j], bx(i, j));
        add(1, vid[i], 2, vid[j], by(i, j));
        add(2, vid[j], 0, vid[i], bx(i, j));
        add(2, vid[j], 1, vid[i], by(i, j));
        add(2, vid[i], 2, vid[j], -beta_h2 * lap(i, j));
      }
    }
  }

  d.op.resize(d.layout.dim(), d.layout.dim());
  d.op.setFromTriplets(sys.begin(), sys.end());
  d.boundary_coupling.resize(d.layout.dim(), 2 * nb);
  d.boundary_coupling.setFromTriplets(bnd.begin(), bnd.end());
}

void assemble_curlcurl(Discretization& d) {
  const TriMesh& mesh = d.mesh;
  std::vector<Triplet> sys;
  for (const TriMesh::Cell& c : mesh.cells()) {
    const fem::Tri t = c.up ? fem::up_tri(c.anchor) : fem::down_tri(c.anchor);
    const fem::ElementGeometry geo = cell_geometry(mesh, t);
    fem::TriEdge e[3];
    fem::tri_edges(t, c.up, e);
    Eigen::Matrix3d rotrot, mass;
    fem::whitney_matrices(geo, e, rotrot, mass);
    int dof[3];
    for (int a = 0; a < 3; ++a)
      dof[a] = d.dof[e[a].sub][mesh.edge_id(e[a].sub, e[a].anchor)];
    for (int a = 0; a < 3; ++a) {
      if (dof[a] < 0) continue;
      for (int b = 0; b < 3; ++b) {
        if (dof[b] < 0) continue;  // zero tangential trace on the boundary
        sys.emplace_back(dof[a], dof[b], rotrot(a, b) + d.problem.kappa * mass(a, b));
      }
    }
  }
  d.op.resize(d.layout.dim(), d.layout.dim());
  d.op.setFromTriplets(sys.begin(), sys.end());
}

}  // namespace

int Discretization::dof_at(int var, Index2 a) const {
  if (problem.kind == ProblemKind::Stokes) {
    const int vid = mesh.vertex_id(a);
    return vid < 0 ? -1 : dof[var][vid];
  }
  const int eid = mesh.edge_id(var, a);
  return eid < 0 ? -1 : dof[var][eid];
}

Discretization assemble(const ProblemSpec& problem, int level) {
  Discretization d{problem, TriMesh(level), {}, {}, {}, {}, {}};
  const TriMesh& mesh = d.mesh;

  if (problem.kind == ProblemKind::Stokes) {
    d.layout.name = {"u", "v", "p"};
    d.dof.assign(3, std::vector<int>(mesh.num_vertices(), -1));
    int next = 0;
    d.layout.begin = {0};
    for (int var = 0; var < 2; ++var) {
      for (int v = 0; v < mesh.num_vertices(); ++v)
        if (!mesh.vertex_on_boundary(v)) d.dof[var][v] = next++;
      d.layout.begin.push_back(next);
    }
    for (int v = 0; v < mesh.num_vertices(); ++v) d.dof[2][v] = next++;
    d.layout.begin.push_back(next);
    assemble_stokes(d);
  } else {
    d.layout.name = {"e1", "e2", "e3"};
    d.dof.assign(3, std::vector<int>(mesh.num_edges(), -1));
    int next = 0;
    d.layout.begin = {0};
    for (int sub = 0; sub < 3; ++sub) {
      for (int e = 0; e < mesh.num_edges(); ++e)
        if (mesh.edge_sub(e) == sub && !mesh.edge_on_boundary(e)) d.dof[sub][e] = next++;
      d.layout.begin.push_back(next);
    }
    assemble_curlcurl(d);
  }
  return d;
}

SparseMat build_interpolation(const Discretization& fine, const Discretization& coarse) {
  if (fine.mesh.level() != coarse.mesh.level() + 1)
    throw std::invalid_argument("build_interpolation: levels must differ by one");
  std::vector<Triplet> trip;

  if (fine.problem.kind == ProblemKind::Stokes) {
    // Seven-point linear interpolation: coarse-coincident nodes copy, the
    // others average the two coarse endpoints of the containing coarse edge.
    for (int var = 0; var < 3; ++var) {
      for (int v = 0; v < fine.mesh.num_vertices(); ++v) {
        const int row = fine.dof[var][v];
        if (row < 0) continue;
        const Index2 a = fine.mesh.vertex_index(v);
        const bool ek = a.k % 2 == 0, el = a.l % 2 == 0;
        auto tap = [&](Index2 ca, double w) {
          const int col = coarse.dof_at(var, ca);
          if (col >= 0) trip.emplace_back(row, col, w);
        };
        if (ek && el) {
          tap({a.k / 2, a.l / 2}, 1.0);
        } else if (!ek && el) {
          tap({(a.k - 1) / 2, a.l / 2}, 0.5);
          tap({(a.k + 1) / 2, a.l / 2}, 0.5);
        } else if (ek && !el) {
          tap({a.k / 2, (a.l - 1) / 2}, 0.5);
          tap({a.k / 2, (a.l + 1) / 2}, 0.5);
        } else {
          tap({(a.k - 1) / 2, (a.l - 1) / 2}, 0.5);
          tap({(a.k + 1) / 2, (a.l + 1) / 2}, 0.5);
        }
      }
    }
  } else {
    for (int e = 0; e < fine.mesh.num_edges(); ++e) {
      const int sub = fine.mesh.edge_sub(e);
      const int row = fine.dof[sub][e];
      if (row < 0) continue;
      const Index2 x = fine.mesh.edge_index(e);
      for (const EdgeKernelTap& t : edge_kernel_taps()) {
        if (t.i != sub) continue;
        const int dk = x.k - t.y.k, dl = x.l - t.y.l;
        if (dk % 2 != 0 || dl % 2 != 0) continue;
        const int col = coarse.dof_at(t.r, {dk / 2, dl / 2});
        if (col >= 0) trip.emplace_back(row, col, t.num / 4.0);
      }
    }
  }

  SparseMat p(fine.layout.dim(), coarse.layout.dim());
  p.setFromTriplets(trip.begin(), trip.end());
  return p;
}

Eigen::VectorXd cavity_wall_data(const Discretization& d) {
  if (d.problem.kind != ProblemKind::Stokes)
    throw std::invalid_argument("cavity_wall_data: Stokes only");
  const int nb = static_cast<int>(d.boundary_vertex.size());
  Eigen::VectorXd g = Eigen::VectorXd::Zero(2 * nb);
  for (int c = 0; c < nb; ++c) {
    const Index2 a = d.mesh.vertex_index(d.boundary_vertex[c]);
    const bool corner = (a.k == 0 && a.l == 0) || (a.k == d.mesh.n() && a.l == 0);
    if (a.l == 0 && !corner) g[c] = 1.0;  // u component of the translating lid
  }
  return g;
}

}  // namespace trilfa
