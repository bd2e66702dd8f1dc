// Periodic-patch finite-element assembly used as an independent oracle for
// the closed-form stencil generators.
#include "trilfa/patch_oracle.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "fem_element.hpp"

namespace trilfa {
namespace {

using fem::Tri;
using fem::TriEdge;

int wrap(int a, int n) {
  int r = a % n;
  return r < 0 ? r + n : r;
}

// Map a periodic index difference to the representative in (-n/2, n/2].
int centered(int d, int n) {
  int r = wrap(d, n);
  return r > n / 2 ? r - n : r;
}

struct TorusGrid {
  int n;
  double h;
  Vec2 f1, f2;
  TorusGrid(int n_, double h_) : n(n_), h(h_), f1{1.0, 0.0}, f2{-0.5, std::sqrt(3.0) / 2.0} {}
  int node(int k, int l) const { return wrap(l, n) * n + wrap(k, n); }
  Vec2 pos(int k, int l) const {
    return Vec2{h * (k * f1.x + l * f2.x), h * (k * f1.y + l * f2.y)};
  }
};

Eigen::MatrixXd assemble_stokes(const TorusGrid& g, double beta) {
  const int nn = g.n * g.n;
  Eigen::MatrixXd mat = Eigen::MatrixXd::Zero(3 * nn, 3 * nn);
  auto dof = [&](int var, Index2 a) { return var * nn + g.node(a.k, a.l); };

  auto add_element = [&](const Tri& t) {
    const fem::ElementGeometry geo =
        fem::element_geometry(g.pos(t.v[0].k, t.v[0].l), g.pos(t.v[1].k, t.v[1].l),
                         g.pos(t.v[2].k, t.v[2].l));
    const Eigen::Matrix3d lap = fem::p1_stiffness(geo);
    const Eigen::Matrix3d bx = fem::p1_grad_x(geo);
    const Eigen::Matrix3d by = fem::p1_grad_y(geo);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        mat(dof(0, t.v[i]), dof(0, t.v[j])) += lap(i, j);
        mat(dof(1, t.v[i]), dof(1, t.v[j])) += lap(i, j);
        // Pressure gradient in the momentum rows and its transpose in the
        // continuity rows.
        mat(dof(0, t.v[i]), dof(2, t.v[j])) += bx(i, j);
        mat(dof(1, t.v[i]), dof(2, t.v[j])) += by(i, j);
        mat(dof(2, t.v[j]), dof(0, t.v[i])) += bx(i, j);
        mat(dof(2, t.v[j]), dof(1, t.v[i])) += by(i, j);
        // Pressure stabilization, scaled by the element size squared.
        mat(dof(2, t.v[i]), dof(2, t.v[j])) -= beta * g.h * g.h * lap(i, j);
      }
    }
  };

  for (int l = 0; l < g.n; ++l)
    for (int k = 0; k < g.n; ++k) {
      add_element(fem::up_tri({k, l}));
      add_element(fem::down_tri({k, l}));
    }
  return mat;
}

Eigen::MatrixXd assemble_curlcurl(const TorusGrid& g, double kappa) {
  const int nn = g.n * g.n;
  Eigen::MatrixXd mat = Eigen::MatrixXd::Zero(3 * nn, 3 * nn);
  auto dof = [&](const TriEdge& e) { return e.sub * nn + g.node(e.anchor.k, e.anchor.l); };

  auto add_element = [&](const Tri& t, bool up) {
    const fem::ElementGeometry geo =
        fem::element_geometry(g.pos(t.v[0].k, t.v[0].l), g.pos(t.v[1].k, t.v[1].l),
                         g.pos(t.v[2].k, t.v[2].l));
    TriEdge e[3];
    fem::tri_edges(t, up, e);
    Eigen::Matrix3d rotrot, mass;
    fem::whitney_matrices(geo, e, rotrot, mass);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        mat(dof(e[a]), dof(e[b])) += rotrot(a, b) + kappa * mass(a, b);
  };

  for (int l = 0; l < g.n; ++l)
    for (int k = 0; k < g.n; ++k) {
      add_element(fem::up_tri({k, l}), true);
      add_element(fem::down_tri({k, l}), false);
    }
  return mat;
}

}  // namespace

MultiStencil assemble_patch_oracle(const ProblemSpec& spec, int patch_n) {
  if (patch_n < 4) throw std::invalid_argument("assemble_patch_oracle: patch_n must be >= 4");
  const TorusGrid grid(patch_n, spec.h);
  const int nn = patch_n * patch_n;
  const int m = 3;

  Eigen::MatrixXd mat;
  std::vector<int> subgrids;
  if (spec.kind == ProblemKind::Stokes) {
    mat = assemble_stokes(grid, spec.beta);
    subgrids = {0, 0, 0};
  } else {
    mat = assemble_curlcurl(grid, spec.kappa);
    subgrids = {1, 2, 3};
  }

  const Index2 rep{patch_n / 2, patch_n / 2};
  const int rep_id = grid.node(rep.k, rep.l);
  const double scale = mat.cwiseAbs().maxCoeff();

  MultiStencil st(m, subgrids, spec.h);
  for (int i = 0; i < m; ++i) {
    for (int r = 0; r < m; ++r) {
      for (int l = 0; l < patch_n; ++l) {
        for (int k = 0; k < patch_n; ++k) {
          const double val = mat(i * nn + rep_id, r * nn + grid.node(k, l));
          if (std::abs(val) <= 1e-13 * scale) continue;
          st.add(i, r, Index2{centered(k - rep.k, patch_n), centered(l - rep.l, patch_n)}, val);
        }
      }
    }
  }
  return st;
}

}  // namespace trilfa
