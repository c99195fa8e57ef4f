#pragma once

#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "olmfsi/errors.hpp"
#include "olmfsi/mesh.hpp"

namespace olmfsi {

// Text format:
//   mesh2d <nv> <nc> <nbe>
//   v x y            (nv lines)
//   c i j k [tag]    (nc lines, tag defaults to 0)
//   b i j marker     (nbe lines)
// Lines may appear in any order after the header; '#' starts a comment.

inline void write_mesh(std::ostream& os, const Mesh& mesh) {
  os << "mesh2d " << mesh.num_vertices() << ' ' << mesh.num_cells() << ' ' << mesh.boundary_edges().size() << '\n';
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const Vec2& p : mesh.vertices()) os << "v " << p.x << ' ' << p.y << '\n';
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    const Cell& t = mesh.cell(c);
    os << "c " << t[0] << ' ' << t[1] << ' ' << t[2] << ' ' << mesh.region_of(c) << '\n';
  }
  for (const BoundaryEdge& e : mesh.boundary_edges()) os << "b " << e.v[0] << ' ' << e.v[1] << ' ' << e.marker << '\n';
}

inline Mesh read_mesh(std::istream& is) {
  std::string line;
  auto next_line = [&](std::string& out) {
    while (std::getline(is, out)) {
      const auto hash = out.find('#');
      if (hash != std::string::npos) out.erase(hash);
      if (out.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };
  if (!next_line(line)) throw InputError("mesh2d: empty input");
  std::istringstream header(line);
  std::string magic;
  long nv = -1, nc = -1, nbe = -1;
  header >> magic >> nv >> nc >> nbe;
  if (magic != "mesh2d" || !header || nv < 0 || nc < 0 || nbe < 0) throw InputError("mesh2d: bad header '" + line + "'");

  std::vector<Vec2> v;
  std::vector<Cell> cells;
  std::vector<int> regions;
  std::vector<BoundaryEdge> b;
  while (next_line(line)) {
    std::istringstream ls(line);
    std::string kind;
    ls >> kind;
    if (kind == "v") {
      Vec2 p;
      if (!(ls >> p.x >> p.y)) throw InputError("mesh2d: bad vertex line '" + line + "'");
      v.push_back(p);
    } else if (kind == "c") {
      Cell t{};
      if (!(ls >> t[0] >> t[1] >> t[2])) throw InputError("mesh2d: bad cell line '" + line + "'");
      int tag = 0;
      if (!(ls >> tag)) tag = 0;
      cells.push_back(t);
      regions.push_back(tag);
    } else if (kind == "b") {
      BoundaryEdge e;
      if (!(ls >> e.v[0] >> e.v[1] >> e.marker)) throw InputError("mesh2d: bad boundary line '" + line + "'");
      b.push_back(e);
    } else {
      throw InputError("mesh2d: unknown record '" + kind + "'");
    }
  }
  if (static_cast<long>(v.size()) != nv || static_cast<long>(cells.size()) != nc || static_cast<long>(b.size()) != nbe)
    throw InputError("mesh2d: record counts do not match header");
  return Mesh(std::move(v), std::move(cells), std::move(b), std::move(regions));
}

inline void write_mesh_file(const std::string& path, const Mesh& mesh) {
  std::ofstream os(path);
  if (!os) throw InputError("cannot open '" + path + "' for writing");
  write_mesh(os, mesh);
}

inline Mesh read_mesh_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InputError("cannot open '" + path + "'");
  return read_mesh(is);
}

}  // namespace olmfsi
