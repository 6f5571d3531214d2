#include "doctest.h"

#include <Eigen/Eigenvalues>

#include "hsmod/surface.hpp"

using namespace hsmod;

namespace {

double max_check(const Diagnostics& d) {
  double m = 0;
  for (const auto& c : d.checks) m = std::max(m, c.residual);
  return m;
}

double check_residual(const Diagnostics& d, const std::string& prefix) {
  for (const auto& c : d.checks)
    if (c.name.rfind(prefix, 0) == 0) return c.residual;
  FAIL("no check named " << prefix);
  return 0;
}

// Genus-2 octagon with the a1 and b1 loops each subdivided by a vertex.
CellSpec subdivided_octagon() {
  CellSpec spec;
  spec.vertices = 3;
  spec.edges = {{0, 1}, {1, 0}, {0, 2}, {2, 0}, {0, 0}, {0, 0}};
  spec.faces = {{1, 2, 3, 4, -2, -1, -4, -3, 5, 6, -5, -6}};
  return spec;
}

void check_complex_structure(const Surface& s) {
  const Eigen::Index m = s.ne();
  const RMat id = RMat::Identity(m, m);
  CHECK((s.J * s.J + id).cwiseAbs().maxCoeff() < 1e-12);
  const RMat m1 = s.M1();
  CHECK((s.J.transpose() * m1 * s.J - m1).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((m1 * s.J + (m1 * s.J).transpose()).cwiseAbs().maxCoeff() < 1e-12);
}

}  // namespace

TEST_CASE("torus grid counts") {
  for (auto [nx, ny] : {std::pair{2, 2}, std::pair{3, 4}, std::pair{4, 4}}) {
    const SurfacePtr s = build_torus_grid(nx, ny);
    CHECK(s->nv() == nx * ny);
    CHECK(s->ne() == 2 * nx * ny);
    CHECK(s->nf() == nx * ny);
    CHECK(s->euler() == 0);
    CHECK(s->genus() == 1);
    CHECK((s->d1 * s->d0).cwiseAbs().maxCoeff() == 0.0);
    CHECK((s->J * s->J + RMat::Identity(s->ne(), s->ne())).cwiseAbs().maxCoeff() == 0.0);
    CHECK(max_check(validate(*s)) < 1e-12);
    CHECK(validate(*s).ok());
  }
  CHECK_THROWS_AS(build_torus_grid(1, 3), Error);
}

TEST_CASE("torus J rotates x-edges into y-edges at the same site") {
  const SurfacePtr s = build_torus_grid(3, 3);
  for (int v = 0; v < s->nv(); ++v) {
    RVec ex = RVec::Zero(s->ne());
    ex[2 * v] = 1;
    const RVec jx = s->J * ex;
    CHECK(jx[2 * v + 1] == 1.0);
    CHECK(jx.cwiseAbs().sum() == 1.0);
  }
}

TEST_CASE("octmin") {
  const SurfacePtr s = build_octmin();
  CHECK(s->nv() == 1);
  CHECK(s->ne() == 4);
  CHECK(s->nf() == 1);
  CHECK(s->euler() == -2);
  CHECK(s->genus() == 2);
  CHECK(s->d0.cwiseAbs().maxCoeff() == 0.0);
  // a1 -> b1, b1 -> -a1, a2 -> b2, b2 -> -a2
  RMat expect = RMat::Zero(4, 4);
  expect(1, 0) = 1;
  expect(0, 1) = -1;
  expect(3, 2) = 1;
  expect(2, 3) = -1;
  CHECK((s->J - expect).cwiseAbs().maxCoeff() == 0.0);
  check_complex_structure(*s);
}

TEST_CASE("scalar Laplacian on a torus has one-dimensional kernel") {
  const SurfacePtr s = build_torus_grid(4, 3);
  const RMat lap = s->d0.transpose() * s->M1() * s->d0;
  Eigen::SelfAdjointEigenSolver<RMat> es(lap);
  int zeros = 0;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) zeros += std::abs(es.eigenvalues()[k]) < 1e-10;
  CHECK(zeros == 1);
}

TEST_CASE("(1,0) projector") {
  const SurfacePtr s = build_torus_grid(3, 2);
  const Eigen::Index m = s->ne();
  const Eigen::MatrixXcd p = 0.5 * (Eigen::MatrixXcd::Identity(m, m) - cplx(0, 1) * s->J.cast<cplx>());
  CHECK((p * p - p).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((s->J.cast<cplx>() * p - cplx(0, 1) * p).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("cw complex with constructed complex structure") {
  const SurfacePtr s = build_cw_complex(subdivided_octagon(), "subdivided");
  CHECK(s->genus() == 2);
  CHECK((s->d1 * s->d0).cwiseAbs().maxCoeff() == 0.0);
  check_complex_structure(*s);
  CHECK(validate(*s).ok());

  CellSpec weighted = subdivided_octagon();
  weighted.m1 = (RVec(6) << 1.0, 2.0, 0.5, 1.5, 1.0, 3.0).finished();
  const SurfacePtr w = build_cw_complex(weighted);
  check_complex_structure(*w);
}

TEST_CASE("cw complex rejects bad specs") {
  auto kind_of = [](const CellSpec& spec) {
    try {
      build_cw_complex(spec);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::Invariant;
  };
  CellSpec open = subdivided_octagon();
  open.faces[0].pop_back();
  CHECK(kind_of(open) == ErrorKind::Topology);

  CellSpec twice = subdivided_octagon();
  twice.faces[0][11] = 6;
  CHECK(kind_of(twice) == ErrorKind::Topology);

  // subdividing only one loop leaves five edges
  CellSpec odd;
  odd.vertices = 2;
  odd.edges = {{0, 1}, {1, 0}, {0, 0}, {0, 0}, {0, 0}};
  odd.faces = {{1, 2, 3, -2, -1, -3, 4, 5, -4, -5}};
  CHECK(kind_of(odd) == ErrorKind::NoComplexStructure);

  CellSpec badref = subdivided_octagon();
  badref.faces[0][0] = 9;
  CHECK(kind_of(badref) == ErrorKind::Topology);

  CellSpec badweight = subdivided_octagon();
  badweight.m0 = RVec::Constant(3, -1.0);
  CHECK(kind_of(badweight) == ErrorKind::InvalidMesh);
}

TEST_CASE("validate flags injected faults") {
  Surface s = *build_torus_grid(3, 3);
  s.d1(0, 0) += 1.0;
  CHECK_FALSE(validate(s).ok());
  CHECK(check_residual(validate(s), "d1_d0") > 0.5);

  Surface t = *build_torus_grid(3, 3);
  t.J = RMat::Identity(t.ne(), t.ne());
  CHECK_FALSE(validate(t).ok());
  CHECK(check_residual(validate(t), "J_squared") > 0.5);
}

TEST_CASE("builtin specs") {
  CHECK(build_builtin("torus:3:5")->nv() == 15);
  CHECK(build_builtin("octmin")->genus() == 2);
  CHECK_THROWS_AS(build_builtin("torus:3"), Error);
  CHECK_THROWS_AS(build_builtin("sphere"), Error);
}
