// Finite-element assembly on the triangle mesh: degree-of-freedom maps with
// boundary elimination, the sparse system operator per level, the boundary
// coupling block used to impose inhomogeneous wall data, and the mesh-level
// interpolation operators matching the Fourier transfer symbols.
#pragma once

#include <Eigen/Sparse>
#include <string>
#include <vector>

#include "trilfa/mesh.hpp"
#include "trilfa/problems.hpp"

namespace trilfa {

using SparseMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Contiguous index ranges of the variables inside a solution vector.
struct VarLayout {
  std::vector<std::string> name;  // per variable
  std::vector<int> begin;         // size = vars + 1; var v occupies [begin[v], begin[v+1])
  int dim() const { return begin.empty() ? 0 : begin.back(); }
  int size_of(int var) const { return begin[var + 1] - begin[var]; }
};

/// One level's assembled problem: the mesh, the system matrix over the
/// non-eliminated unknowns, and the index maps between lattice positions and
/// global degrees of freedom.
///
/// Stokes: variables (u, v, p) on vertices; u and v are eliminated on the
/// whole boundary (wall data enters through `boundary_coupling`), p is kept
/// everywhere and carries the one-dimensional constant null direction.
/// Curl-curl: variables are the three edge subgrids; boundary edges are
/// eliminated (zero tangential trace).
struct Discretization {
  ProblemSpec problem;
  TriMesh mesh;
  SparseMat op;
  VarLayout layout;

  /// var -> entity id -> global dof (-1 eliminated).  Entities are vertex ids
  /// for Stokes variables and edge ids (var = subgrid) for curl-curl.
  std::vector<std::vector<int>> dof;

  /// Interior x boundary coupling block (Stokes only): columns enumerate the
  /// eliminated boundary values, u block then v block, boundary vertices in
  /// vertex order.  The rhs imposing wall data g is -boundary_coupling * g.
  SparseMat boundary_coupling;
  std::vector<int> boundary_vertex;  // column order of one variable block

  /// Global dof of variable `var` at lattice index `a`; -1 if absent or
  /// eliminated.
  int dof_at(int var, Index2 a) const;
};

Discretization assemble(const ProblemSpec& problem, int level);

/// Mesh-level interpolation from the coarse to the fine discretization
/// (factor-two refinement): seven-point linear interpolation per nodal
/// variable, the canonical edge interpolation for edge variables.  Rows and
/// columns range over non-eliminated unknowns only; taps hitting eliminated
/// coarse unknowns are dropped.  The residual restriction used by the solver
/// is the plain transpose.
SparseMat build_interpolation(const Discretization& fine, const Discretization& coarse);

/// Wall data vector for the translating-lid cavity: tangential velocity (1,0)
/// on the bottom side, zero on the other sides and at the lid corners.
/// Ordered like the columns of `boundary_coupling`.
Eigen::VectorXd cavity_wall_data(const Discretization& d);

}  // namespace trilfa
