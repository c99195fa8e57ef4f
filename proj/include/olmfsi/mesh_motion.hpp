#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "olmfsi/errors.hpp"
#include "olmfsi/linalg.hpp"
#include "olmfsi/mesh.hpp"

namespace olmfsi {

/// Linear-elastic extension of prescribed boundary displacements into a mesh.
/// Prescribed nodes are the interface nodes plus, optionally, all nodes on
/// `fixed_markers` edges (held at zero unless also prescribed).
struct MeshMotionProblem {
  Mesh mesh;
  double mu = 1.0;
  double lambda = 1.0;
  bool stiffen_small_cells = false;  // scale the stiffness of cell T by 1/|T|
  std::vector<Index> interface_nodes;
  std::vector<Vec2> interface_values;
  std::vector<int> fixed_markers;
};

inline std::vector<Vec2> solve_mesh_motion(const MeshMotionProblem& p) {
  const Mesh& m = p.mesh;
  if (!(p.mu > 0.0) || !(p.lambda > 0.0)) throw InputError("mesh motion: Lame parameters must be positive");
  if (p.interface_nodes.size() != p.interface_values.size())
    throw InputError("mesh motion: interface node and value counts differ");

  std::vector<Index> dofs;
  std::vector<double> vals;
  std::vector<char> prescribed(m.num_vertices(), 0);
  for (std::size_t k = 0; k < p.interface_nodes.size(); ++k) {
    const Index v = p.interface_nodes[k];
    prescribed[v] = 1;
    dofs.insert(dofs.end(), {2 * v, 2 * v + 1});
    vals.insert(vals.end(), {p.interface_values[k].x, p.interface_values[k].y});
  }
  for (const BoundaryEdge& e : m.boundary_edges()) {
    if (std::find(p.fixed_markers.begin(), p.fixed_markers.end(), e.marker) == p.fixed_markers.end()) continue;
    for (Index v : e.v) {
      if (prescribed[v]) continue;
      prescribed[v] = 1;
      dofs.insert(dofs.end(), {2 * v, 2 * v + 1});
      vals.insert(vals.end(), {0.0, 0.0});
    }
  }
  if (dofs.empty()) throw SolverError("mesh motion: no prescribed nodes, the elastic system is singular");

  SparseSystem sys(2 * m.num_vertices());
  for (Index c = 0; c < m.num_cells(); ++c) {
    const auto g = p1_gradients(m, c);
    const Cell& cell = m.cell(c);
    const double w = p.stiffen_small_cells ? 1.0 : m.cell_area(c);
    // sigma(e_d (x) g_j) : grad(e_b (x) g_i)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int b = 0; b < 2; ++b)
          for (int d = 0; d < 2; ++d) {
            const double v = p.mu * (dot(g[i], g[j]) * (b == d ? 1.0 : 0.0) + g[i][d] * g[j][b]) +
                             p.lambda * g[i][b] * g[j][d];
            sys.add(2 * cell[i] + b, 2 * cell[j] + d, w * v);
          }
  }
  sys.finalize();
  const Vector x = solve_direct(apply_dirichlet(sys, dofs, vals));
  std::vector<Vec2> u(m.num_vertices());
  for (Index v = 0; v < m.num_vertices(); ++v) u[v] = {x[2 * v], x[2 * v + 1]};
  return u;
}

/// Moves every vertex by its displacement. Cells keep their reference
/// orientation; a cell whose signed area drops to 1e-12 of its reference area
/// or below is reported.
inline Mesh deform_mesh(const Mesh& ref, const std::vector<Vec2>& u) {
  if (u.size() != static_cast<std::size_t>(ref.num_vertices()))
    throw InputError("deform_mesh: displacement has " + std::to_string(u.size()) + " entries for " +
                     std::to_string(ref.num_vertices()) + " vertices");
  std::vector<Vec2> moved(ref.vertices());
  for (std::size_t v = 0; v < moved.size(); ++v) moved[v] += u[v];
  for (Index c = 0; c < ref.num_cells(); ++c) {
    const Cell& t = ref.cell(c);
    const double a = triangle_signed_area(moved[t[0]], moved[t[1]], moved[t[2]]);
    if (!(a > 1e-12 * ref.cell_area(c)))
      throw MeshTangleError("mesh tangling: cell " + std::to_string(c) + " is inverted or collapsed (area " +
                                std::to_string(a) + ")",
                            c);
  }
  return ref.with_vertices(std::move(moved));
}

}  // namespace olmfsi
