#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "olmfsi/coupling.hpp"
#include "olmfsi/errors.hpp"
#include "olmfsi/mesh.hpp"
#include "olmfsi/overlap.hpp"
#include "olmfsi/stokes.hpp"
#include "olmfsi/verification.hpp"

namespace olmfsi {

/// Nodal or cellwise data for a VTK file. Two-component data is written as
/// VECTORS with a zero third component; one-component data as SCALARS.
struct VtkField {
  std::string name;
  int components = 1;
  std::vector<double> values;  // size = components * count
};

inline VtkField scalar_field(std::string name, std::vector<double> v) { return {std::move(name), 1, std::move(v)}; }

inline VtkField vector_field(std::string name, const std::vector<Vec2>& v) {
  VtkField f{std::move(name), 2, {}};
  f.values.reserve(2 * v.size());
  for (const Vec2& x : v) f.values.insert(f.values.end(), {x.x, x.y});
  return f;
}

namespace detail {

inline std::ofstream open_output(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path + " for writing");
  os << std::setprecision(14);
  return os;
}

inline void close_output(std::ofstream& os, const std::string& path) {
  os.close();
  if (!os) throw IoError("write failed for " + path);
}

inline void write_field_block(std::ostream& os, const std::vector<VtkField>& fields, std::size_t count,
                              const std::string& path) {
  for (const VtkField& f : fields) {
    if (f.components != 1 && f.components != 2)
      throw InputError(path + ": field " + f.name + " must have one or two components");
    if (f.values.size() != count * f.components)
      throw InputError(path + ": field " + f.name + " has " + std::to_string(f.values.size()) + " values, expected " +
                       std::to_string(count * f.components));
    if (f.components == 1) {
      os << "SCALARS " << f.name << " double 1\nLOOKUP_TABLE default\n";
      for (double v : f.values) os << v << '\n';
    } else {
      os << "VECTORS " << f.name << " double\n";
      for (std::size_t i = 0; i < count; ++i) os << f.values[2 * i] << ' ' << f.values[2 * i + 1] << " 0\n";
    }
  }
}

}  // namespace detail

/// Legacy ASCII unstructured grid of triangles (VTK cell type 5).
inline void write_vtk(const std::string& path, const Mesh& mesh, const std::vector<VtkField>& point_fields = {},
                      const std::vector<VtkField>& cell_fields = {}, const std::string& title = "olmfsi") {
  std::ofstream os = detail::open_output(path);
  const std::size_t nv = mesh.num_vertices(), nc = mesh.num_cells();
  os << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << nv << " double\n";
  for (const Vec2& p : mesh.vertices()) os << p.x << ' ' << p.y << " 0\n";
  os << "CELLS " << nc << ' ' << 4 * nc << '\n';
  for (const Cell& c : mesh.cells()) os << "3 " << c[0] << ' ' << c[1] << ' ' << c[2] << '\n';
  os << "CELL_TYPES " << nc << '\n';
  for (std::size_t c = 0; c < nc; ++c) os << "5\n";
  if (!point_fields.empty()) {
    os << "POINT_DATA " << nv << '\n';
    detail::write_field_block(os, point_fields, nv, path);
  }
  if (!cell_fields.empty()) {
    os << "CELL_DATA " << nc << '\n';
    detail::write_field_block(os, cell_fields, nc, path);
  }
  detail::close_output(os, path);
}

/// Legacy ASCII polydata: polygons, or open polylines when `lines` is set.
inline void write_polydata(const std::string& path, const std::vector<Polygon>& items, bool lines,
                           const std::vector<VtkField>& cell_fields = {}, const std::string& title = "olmfsi") {
  std::ofstream os = detail::open_output(path);
  std::size_t np = 0;
  for (const Polygon& p : items) np += p.size();
  os << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET POLYDATA\n";
  os << "POINTS " << np << " double\n";
  for (const Polygon& p : items)
    for (const Vec2& x : p) os << x.x << ' ' << x.y << " 0\n";
  os << (lines ? "LINES " : "POLYGONS ") << items.size() << ' ' << np + items.size() << '\n';
  std::size_t next = 0;
  for (const Polygon& p : items) {
    os << p.size();
    for (std::size_t k = 0; k < p.size(); ++k) os << ' ' << next++;
    os << '\n';
  }
  if (!cell_fields.empty()) {
    os << "CELL_DATA " << items.size() << '\n';
    detail::write_field_block(os, cell_fields, items.size(), path);
  }
  detail::close_output(os, path);
}

/// Geometry debug output: background classes, interface segments with
/// normals, and overlap polygons.
inline void write_cutdump(const std::string& dir, const FluidGeometry& geo) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
  std::vector<double> cls(geo.background.num_cells());
  for (std::size_t c = 0; c < cls.size(); ++c) cls[c] = static_cast<double>(geo.topo.cell_class[c]);
  write_vtk(dir + "/background_classes.vtk", geo.background, {}, {scalar_field("cell_class", cls)});
  write_vtk(dir + "/front.vtk", geo.front, {}, {scalar_field("region", [&] {
              std::vector<double> r(geo.front.num_cells());
              for (std::size_t c = 0; c < r.size(); ++c) r[c] = geo.front.region_of(static_cast<Index>(c));
              return r;
            }())});
  std::vector<Polygon> segs;
  std::vector<Vec2> normals;
  for (const InterfaceSegment& s : geo.topo.interface_segments) {
    segs.push_back({s.a, s.b});
    normals.push_back(s.normal);
  }
  write_polydata(dir + "/interface.vtk", segs, true, {vector_field("normal", normals)});
  std::vector<Polygon> polys;
  std::vector<double> parent;
  for (const OverlapPair& p : geo.topo.overlap_pairs) {
    polys.push_back(p.polygon);
    parent.push_back(static_cast<double>(p.background_cell));
  }
  write_polydata(dir + "/overlap.vtk", polys, false, {scalar_field("background_cell", parent)});
}

inline std::string format_optional(const std::optional<double>& v) {
  if (!v) return {};
  std::ostringstream os;
  os << std::setprecision(12) << *v;
  return os.str();
}

inline void write_convergence_csv(const std::string& path, const ConvergenceReport& rep) {
  std::ofstream os = detail::open_output(path);
  os << std::setprecision(12);
  os << "level,h,err_u_h1,eoc_u,err_p_l2,eoc_p,err_s_h1,eoc_s,iters\n";
  for (const ConvergenceRow& r : rep.rows) {
    os << r.level << ',' << r.h << ',' << r.err_u_h1 << ',' << format_optional(r.eoc_u) << ',' << r.err_p_l2 << ','
       << format_optional(r.eoc_p) << ',' << format_optional(r.err_s_h1) << ',' << format_optional(r.eoc_s) << ','
       << r.iterations << '\n';
  }
  detail::close_output(os, path);
}

inline void write_iterations_csv(const std::string& path, const std::vector<FsiIteration>& history) {
  std::ofstream os = detail::open_output(path);
  os << std::setprecision(12);
  os << "k,omega,increment,fluid_dofs,cut_cells,interface_gap,newton_iterations\n";
  for (const FsiIteration& it : history)
    os << it.k << ',' << it.omega << ',' << it.increment << ',' << it.fluid_dofs << ',' << it.cut_cells << ','
       << it.interface_gap << ',' << it.newton_iterations << '\n';
  detail::close_output(os, path);
}

/// Fluid fields on both meshes: background (inactive vertices carry zeros)
/// and the moving fluid mesh in its current configuration.
inline void write_fluid_vtk(const std::string& dir, const FluidGeometry& geo, const FluidSolution& s) {
  std::vector<double> cls(geo.background.num_cells());
  for (std::size_t c = 0; c < cls.size(); ++c) cls[c] = static_cast<double>(geo.topo.cell_class[c]);
  write_vtk(dir + "/fluid_background.vtk", geo.background,
            {vector_field("velocity", s.u1), scalar_field("pressure", s.p1)}, {scalar_field("cell_class", cls)});
  write_vtk(dir + "/fluid_moving.vtk", geo.fluid2.mesh, {vector_field("velocity", s.u2), scalar_field("pressure", s.p2)});
}

/// All files of an FSI run: fluid fields, solid and mesh displacements on the
/// reference meshes, the deformed solid, iterations.csv and, when a report is
/// given, convergence.csv.
inline void write_outputs(const FsiState& st, const ConvergenceReport* report, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
  write_fluid_vtk(dir, st.geometry, st.fluid);
  write_vtk(dir + "/solid_reference.vtk", st.front.solid.mesh, {vector_field("displacement", st.solid_u)});
  write_vtk(dir + "/solid_deformed.vtk", st.solid_deformed(), {vector_field("displacement", st.solid_u)});
  write_vtk(dir + "/mesh_motion.vtk", st.front.fluid2.mesh, {vector_field("displacement", st.mesh_u)});
  write_iterations_csv(dir + "/iterations.csv", st.history);
  if (report) write_convergence_csv(dir + "/convergence.csv", *report);
}

}  // namespace olmfsi
