#pragma once

#include <memory>
#include <string>
#include <utility>

#include "hsmod/common.hpp"

namespace hsmod {

struct FaceStep {
  int edge;
  int sign;  // +1 traverses tail->head, -1 head->tail
};

struct Surface {
  std::string name;
  int vertex_count = 0;
  std::vector<std::pair<int, int>> edges;  // (tail, head)
  std::vector<std::vector<FaceStep>> faces;
  std::vector<int> face_base;  // start vertex of each face cycle
  RMat d0, d1;                 // |E|x|V|, |F|x|E|
  RVec m0, m1, m2;             // diagonal mass weights
  RMat J;                      // complex structure on 1-cochains

  int nv() const { return vertex_count; }
  int ne() const { return static_cast<int>(edges.size()); }
  int nf() const { return static_cast<int>(faces.size()); }
  int tail(int e) const { return edges[e].first; }
  int head(int e) const { return edges[e].second; }
  int euler() const { return nv() - ne() + nf(); }
  int genus() const { return 1 - euler() / 2; }
  RMat M1() const { return m1.asDiagonal(); }
};

using SurfacePtr = std::shared_ptr<const Surface>;

struct CellSpec {
  int vertices = 0;
  std::vector<std::pair<int, int>> edges;
  // Signed 1-based edge references: +k is edge k-1 forwards, -k backwards.
  std::vector<std::vector<int>> faces;
  RVec m0, m1, m2;  // optional; empty means identity
  // Optional explicit complex structure on edges; empty means constructed.
  RMat J;
};

SurfacePtr build_torus_grid(int nx, int ny);
SurfacePtr build_octmin();
SurfacePtr build_cw_complex(const CellSpec& spec, const std::string& name = "cw");
// Builtins "torus:nx:ny" and "octmin".
SurfacePtr build_builtin(const std::string& spec);

struct Check {
  std::string name;
  double residual;
  double tol;
  bool ok() const { return residual <= tol; }
};

struct Diagnostics {
  std::vector<Check> checks;
  bool ok() const;
};

Diagnostics validate(const Surface& s);

// Cochain index helpers for torus grids.
inline int torus_vertex(int i, int j, int nx, int ny) { return ((i % nx + nx) % nx) + nx * ((j % ny + ny) % ny); }

}  // namespace hsmod
