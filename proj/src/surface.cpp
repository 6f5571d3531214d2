#include "hsmod/surface.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <map>
#include <sstream>

namespace hsmod {

namespace {

int step_start(const Surface& s, const FaceStep& st) { return st.sign > 0 ? s.tail(st.edge) : s.head(st.edge); }
int step_end(const Surface& s, const FaceStep& st) { return st.sign > 0 ? s.head(st.edge) : s.tail(st.edge); }

void assemble_operators(Surface& s) {
  const int nv = s.nv(), ne = s.ne(), nf = s.nf();
  s.d0 = RMat::Zero(ne, nv);
  for (int e = 0; e < ne; ++e) {
    s.d0(e, s.head(e)) += 1.0;
    s.d0(e, s.tail(e)) -= 1.0;
  }
  s.d1 = RMat::Zero(nf, ne);
  s.face_base.assign(nf, 0);
  for (int f = 0; f < nf; ++f) {
    for (const auto& st : s.faces[f]) s.d1(f, st.edge) += st.sign;
    s.face_base[f] = step_start(s, s.faces[f].front());
  }
}

std::string step_where(int f, int k) {
  std::ostringstream os;
  os << "faces[" << f << "][" << k << "]";
  return os.str();
}

// Checks that the faces glue into a closed oriented surface: every edge is
// used once in each direction, cycles close, and each vertex link is a
// single cycle.
void check_closed_surface(const Surface& s) {
  const int ne = s.ne();
  std::vector<int> fwd(ne, 0), bwd(ne, 0);
  // dart (e, dir) -> (face, step) where it is traversed
  std::map<std::pair<int, int>, std::pair<int, int>> where;
  for (int f = 0; f < s.nf(); ++f) {
    const auto& cyc = s.faces[f];
    if (cyc.empty()) throw Error(ErrorKind::Topology, "face " + std::to_string(f) + " is empty", -1, f);
    for (size_t k = 0; k < cyc.size(); ++k) {
      const auto& st = cyc[k];
      if (st.edge < 0 || st.edge >= ne)
        throw Error(ErrorKind::Topology, step_where(f, static_cast<int>(k)) + ": edge reference out of range", -1, f);
      const auto& nx = cyc[(k + 1) % cyc.size()];
      if (step_end(s, st) != step_start(s, nx))
        throw Error(ErrorKind::Topology,
                    step_where(f, static_cast<int>(k)) + ": boundary cycle does not close (end vertex " +
                        std::to_string(step_end(s, st)) + " != next start " + std::to_string(step_start(s, nx)) + ")",
                    -1, f);
      (st.sign > 0 ? fwd : bwd)[st.edge] += 1;
      where[{st.edge, st.sign}] = {f, static_cast<int>(k)};
    }
  }
  for (int e = 0; e < ne; ++e) {
    if (fwd[e] != 1 || bwd[e] != 1)
      throw Error(ErrorKind::Topology,
                  "edges[" + std::to_string(e) + "]: used " + std::to_string(fwd[e]) + " times forwards and " +
                      std::to_string(bwd[e]) + " times backwards; a closed oriented surface needs exactly one of each",
                  -1, e);
  }
  // Vertex links: permutation on darts leaving each vertex.
  std::map<std::pair<int, int>, std::pair<int, int>> next;
  for (const auto& [dart, loc] : where) {
    (void)dart;
    const auto& cyc = s.faces[loc.first];
    const auto& st = cyc[loc.second];
    const auto& nx = cyc[(loc.second + 1) % cyc.size()];
    // arriving along st at v; the reverse of st leaves v
    next[{st.edge, -st.sign}] = {nx.edge, nx.sign};
  }
  std::vector<int> darts_at(s.nv(), 0);
  for (int e = 0; e < ne; ++e) {
    darts_at[s.tail(e)] += 1;
    darts_at[s.head(e)] += 1;
  }
  std::vector<bool> seen_vertex(s.nv(), false);
  for (const auto& [start, unused] : next) {
    (void)unused;
    const int v = start.second > 0 ? s.tail(start.first) : s.head(start.first);
    if (seen_vertex[v]) continue;
    seen_vertex[v] = true;
    int len = 0;
    auto d = start;
    do {
      d = next.at(d);
      ++len;
    } while (d != start && len <= 2 * ne);
    if (len != darts_at[v])
      throw Error(ErrorKind::Topology, "vertex " + std::to_string(v) + ": link is not a single cycle (not a surface)",
                  -1, v);
  }
  for (int v = 0; v < s.nv(); ++v)
    if (!seen_vertex[v]) throw Error(ErrorKind::Topology, "vertex " + std::to_string(v) + " is isolated", -1, v);
}

// Candidate star from the rotation of darts around vertices, made an exact
// complex structure by the orthogonal polar factor in the M1 inner product.
RMat polar_complex_structure(const Surface& s) {
  const int ne = s.ne();
  RMat a = RMat::Zero(ne, ne);
  for (int f = 0; f < s.nf(); ++f) {
    const auto& cyc = s.faces[f];
    for (size_t k = 0; k < cyc.size(); ++k) {
      const auto& in = cyc[k];
      const auto& out = cyc[(k + 1) % cyc.size()];
      // corner at the shared vertex: outgoing edge rotated into reversed incoming edge
      const double sgn = static_cast<double>(out.sign) * static_cast<double>(-in.sign);
      a(in.edge, out.edge) += sgn;
      a(out.edge, in.edge) -= sgn;
    }
  }
  RVec rs = s.m1.cwiseSqrt();
  RVec irs = rs.cwiseInverse();
  RMat k = irs.asDiagonal() * a * irs.asDiagonal();
  Eigen::JacobiSVD<RMat> svd(k, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.singularValues().minCoeff() < 1e-10 * std::max(1.0, svd.singularValues().maxCoeff()))
    throw Error(ErrorKind::NoComplexStructure, "candidate star is singular; supply complex_structure explicitly");
  RMat q = svd.matrixU() * svd.matrixV().transpose();
  q = 0.5 * (q - q.transpose());
  return irs.asDiagonal() * q * rs.asDiagonal();
}

}  // namespace

bool Diagnostics::ok() const {
  for (const auto& c : checks)
    if (!c.ok()) return false;
  return true;
}

SurfacePtr build_torus_grid(int nx, int ny) {
  if (nx < 2 || ny < 2) throw Error(ErrorKind::InvalidMesh, "torus grid needs nx, ny >= 2");
  auto s = std::make_shared<Surface>();
  s->name = "torus:" + std::to_string(nx) + ":" + std::to_string(ny);
  s->vertex_count = nx * ny;
  s->edges.resize(2 * nx * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int v = torus_vertex(i, j, nx, ny);
      s->edges[2 * v] = {v, torus_vertex(i + 1, j, nx, ny)};
      s->edges[2 * v + 1] = {v, torus_vertex(i, j + 1, nx, ny)};
    }
  s->faces.resize(nx * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int v = torus_vertex(i, j, nx, ny);
      s->faces[v] = {{2 * v, +1},
                     {2 * torus_vertex(i + 1, j, nx, ny) + 1, +1},
                     {2 * torus_vertex(i, j + 1, nx, ny), -1},
                     {2 * v + 1, -1}};
    }
  s->m0 = RVec::Ones(s->nv());
  s->m1 = RVec::Ones(s->ne());
  s->m2 = RVec::Ones(s->nf());
  s->J = RMat::Zero(s->ne(), s->ne());
  for (int v = 0; v < s->nv(); ++v) {
    s->J(2 * v + 1, 2 * v) = 1.0;
    s->J(2 * v, 2 * v + 1) = -1.0;
  }
  assemble_operators(*s);
  return s;
}

SurfacePtr build_octmin() {
  CellSpec spec;
  spec.vertices = 1;
  spec.edges = {{0, 0}, {0, 0}, {0, 0}, {0, 0}};
  spec.faces = {{1, 2, -1, -2, 3, 4, -3, -4}};
  spec.J = RMat::Zero(4, 4);
  spec.J(1, 0) = 1.0;
  spec.J(0, 1) = -1.0;
  spec.J(3, 2) = 1.0;
  spec.J(2, 3) = -1.0;
  return build_cw_complex(spec, "octmin");
}

SurfacePtr build_cw_complex(const CellSpec& spec, const std::string& name) {
  auto s = std::make_shared<Surface>();
  s->name = name;
  if (spec.vertices < 1) throw Error(ErrorKind::InvalidMesh, "vertices must be >= 1");
  s->vertex_count = spec.vertices;
  for (size_t e = 0; e < spec.edges.size(); ++e) {
    const auto [t, h] = spec.edges[e];
    if (t < 0 || t >= spec.vertices || h < 0 || h >= spec.vertices)
      throw Error(ErrorKind::Topology, "edges[" + std::to_string(e) + "]: vertex index out of range", -1,
                  static_cast<int>(e));
    s->edges.emplace_back(t, h);
  }
  for (size_t f = 0; f < spec.faces.size(); ++f) {
    std::vector<FaceStep> cyc;
    for (size_t k = 0; k < spec.faces[f].size(); ++k) {
      const int r = spec.faces[f][k];
      if (r == 0 || std::abs(r) > static_cast<int>(spec.edges.size()))
        throw Error(ErrorKind::Topology, step_where(static_cast<int>(f), static_cast<int>(k)) + ": bad edge reference",
                    -1, static_cast<int>(f));
      cyc.push_back({std::abs(r) - 1, r > 0 ? 1 : -1});
    }
    s->faces.push_back(std::move(cyc));
  }
  check_closed_surface(*s);
  if (s->ne() % 2 != 0)
    throw Error(ErrorKind::NoComplexStructure, "odd number of edges: no complex structure on 1-cochains");
  if (s->euler() > 0 || s->euler() % 2 != 0)
    throw Error(ErrorKind::Topology, "genus must be >= 1 (Euler characteristic " + std::to_string(s->euler()) + ")");
  auto weights = [](const RVec& w, int n, const char* what) {
    if (w.size() == 0) return RVec(RVec::Ones(n));
    if (w.size() != n) throw Error(ErrorKind::InvalidMesh, std::string("weights.") + what + " has wrong length");
    if ((w.array() <= 0).any()) throw Error(ErrorKind::InvalidMesh, std::string("weights.") + what + " must be > 0");
    return w;
  };
  s->m0 = weights(spec.m0, s->nv(), "m0");
  s->m1 = weights(spec.m1, s->ne(), "m1");
  s->m2 = weights(spec.m2, s->nf(), "m2");
  assemble_operators(*s);
  if (spec.J.size() > 0) {
    if (spec.J.rows() != s->ne() || spec.J.cols() != s->ne())
      throw Error(ErrorKind::InvalidMesh, "complex_structure has wrong shape");
    s->J = spec.J;
  } else {
    s->J = polar_complex_structure(*s);
  }
  return s;
}

SurfacePtr build_builtin(const std::string& spec) {
  if (spec == "octmin") return build_octmin();
  if (spec.rfind("torus:", 0) == 0) {
    int nx = 0, ny = 0;
    char c1 = 0, c2 = 0;
    std::istringstream is(spec.substr(5));
    if (!(is >> c1 >> nx >> c2 >> ny) || c1 != ':' || c2 != ':' || !is.eof())
      throw Error(ErrorKind::InvalidMesh, "malformed builtin mesh '" + spec + "', expected torus:nx:ny");
    return build_torus_grid(nx, ny);
  }
  throw Error(ErrorKind::InvalidMesh, "unknown builtin mesh '" + spec + "'");
}

Diagnostics validate(const Surface& s) {
  Diagnostics d;
  const int ne = s.ne();
  d.checks.push_back({"d1_d0_zero", (s.d1 * s.d0).cwiseAbs().maxCoeff(), 0.0});
  auto min_w = [](const RVec& w) { return w.size() ? w.minCoeff() : 0.0; };
  const double mw = std::min({min_w(s.m0), min_w(s.m1), min_w(s.m2)});
  d.checks.push_back({"mass_positive", mw > 0 ? 0.0 : 1.0 - mw, 0.0});
  RMat id = RMat::Identity(ne, ne);
  d.checks.push_back({"J_squared_minus_id", (s.J * s.J + id).cwiseAbs().maxCoeff(), 1e-12});
  RMat m1 = s.M1();
  d.checks.push_back({"J_preserves_M1", (s.J.transpose() * m1 * s.J - m1).cwiseAbs().maxCoeff(), 1e-12});
  RMat mj = m1 * s.J;
  d.checks.push_back({"M1J_antisymmetric", (mj + mj.transpose()).cwiseAbs().maxCoeff(), 1e-12});
  d.checks.push_back({"genus_at_least_one", s.genus() >= 1 ? 0.0 : 1.0, 0.0});
  d.checks.push_back({"even_edge_count", ne % 2 == 0 ? 0.0 : 1.0, 0.0});
  return d;
}

}  // namespace hsmod
