#include "doctest.h"

#include "hsmod/degeneracy.hpp"
#include "hsmod/hypersym.hpp"
#include "hsmod/solver.hpp"

using namespace hsmod;

namespace {

// Distance of a gauge transformation from the center: max_v |u_v - z Id|
// for the best common phase z.
double center_distance(const GaugeTransformation& g) {
  const int n = static_cast<int>(g.u[0].rows());
  const cplx z = g.u[0].trace() / double(n);
  double m = 0;
  for (const auto& u : g.u) m = std::max(m, (u - z * Mat::Identity(n, n)).norm());
  return m;
}

FieldState irreducible_state(Rng& rng, SurfacePtr s, int n) {
  FieldState st = FieldState::zero_higgs(random_connection(rng, s, n, 0.6));
  st.phi = random_cochain1(rng, *s, n, 0.2);
  return st;
}

Connection uniform_u1(SurfacePtr s, double tx, double ty) {
  Connection c = Connection::trivial(s, 1);
  for (int e = 0; e < s->ne(); ++e) c.transport[e](0, 0) = std::exp(cplx(0, e % 2 == 0 ? tx : ty));
  return c;
}

}  // namespace

TEST_CASE("NewtonConfig validation") {
  NewtonConfig c;
  CHECK_NOTHROW(c.validate());
  c.tol = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = NewtonConfig{};
  c.max_iter = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = NewtonConfig{};
  c.step_damping = 1.5;
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("coulomb_fix recovers constructed gauge transformations") {
  Rng rng(41);
  for (const char* spec : {"octmin", "torus:3:3"}) {
    const SurfacePtr s = build_builtin(spec);
    const FieldState ref = irreducible_state(rng, s, 2);
    const CoulombResult same = coulomb_fix(ref, ref, NewtonConfig{});
    CHECK(same.iterations == 0);
    CHECK(center_distance(same.u) < 1e-14);
    for (int k = 0; k < 3; ++k) {
      const GaugeTransformation v = exp_gauge(random_cochain0(rng, *s, 2, 0.05));
      const FieldState target = gauge_act(v, ref);
      const CoulombResult r = coulomb_fix(ref, target, NewtonConfig{});
      CHECK(r.residual < 1e-10);
      CHECK(center_distance(compose(v, r.u)) < 1e-9);
      // different start, same answer modulo the center
      const GaugeTransformation start = exp_gauge(random_cochain0(rng, *s, 2, 0.02));
      const CoulombResult r2 = coulomb_fix(ref, target, NewtonConfig{}, CoulombMode::Reference, start);
      CHECK(center_distance(compose(inverse(r.u), r2.u)) < 1e-9);
      // covariance: fixing w.target gives w^-1 u
      const GaugeTransformation w = exp_gauge(random_cochain0(rng, *s, 2, 0.03));
      const CoulombResult rw = coulomb_fix(ref, gauge_act(w, target), NewtonConfig{});
      CHECK(center_distance(compose(compose(w, rw.u), inverse(r.u))) < 1e-9);
    }
  }
}

TEST_CASE("coulomb_fix failure modes") {
  Rng rng(42);
  const SurfacePtr s = build_torus_grid(3, 3);
  const FieldState triv = FieldState::zero_higgs(Connection::trivial(s, 2));
  const FieldState moved = gauge_act(exp_gauge(random_cochain0(rng, *s, 2, 0.05)), triv);
  try {
    coulomb_fix(triv, moved, NewtonConfig{});
    FAIL("expected a reducible-reference error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ReducibleReference);
  }
  const FieldState ref = irreducible_state(rng, s, 2);
  NewtonConfig one;
  one.max_iter = 1;
  one.tol = 1e-15;
  try {
    coulomb_fix(ref, gauge_act(exp_gauge(random_cochain0(rng, *s, 2, 0.1)), ref), one);
    FAIL("expected non-convergence");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonConvergence);
    CHECK(e.residual() > 0);
  }
}

TEST_CASE("find_flat") {
  Rng rng(43);
  const SurfacePtr t = build_torus_grid(4, 4);
  const Connection flat = uniform_u1(t, 0.4, -0.7);
  const FlatResult same = find_flat(flat, NewtonConfig{});
  CHECK(same.iterations == 0);

  // abelian: noise on a flat holonomy field is projected away linearly
  const double eps = 1e-2;
  const Connection noisy = chart_shift(flat, random_cochain1(rng, *t, 1, eps));
  NewtonConfig tight;
  tight.tol = 1e-12;
  const FlatResult fr = find_flat(noisy, tight);
  CHECK(fr.residual < 1e-12);
  // holonomy around the x cycle at j = 0 stays within O(eps)
  cplx hol = 1.0;
  for (int i = 0; i < 4; ++i) hol *= fr.conn.transport[2 * torus_vertex(i, 0, 4, 4)](0, 0);
  CHECK(std::abs(std::arg(hol) - 4 * 0.4) < 20 * eps);

  const Connection seed = genus2_flat_seed(8);
  const Connection kicked = chart_shift(seed, random_cochain1(rng, seed.surf(), 2, 0.05));
  tight.tol = 1e-11;
  CHECK(find_flat(kicked, tight).residual < 1e-11);
}

TEST_CASE("genus-two irreducible seeds") {
  const Connection a = genus2_flat_seed(1), b = genus2_flat_seed(2);
  for (const Connection* c : {&a, &b}) {
    CHECK(norm2c(c->surf(), curvature(*c)) < 1e-12);
    CHECK(reducibility_check(*c) == 1);
    for (const auto& u : c->transport) CHECK(std::abs(u.determinant() - 1.0) < 1e-12);
  }
  // character traces distinguish the two representations
  const double d1 = std::abs(a.transport[0].trace() - b.transport[0].trace());
  const double d2 = std::abs((a.transport[0] * a.transport[3]).trace() - (b.transport[0] * b.transport[3]).trace());
  CHECK(std::max(d1, d2) > 1e-3);
  CHECK_THROWS_AS(genus2_flat_seed(1, 3), Error);
}

TEST_CASE("harmonic reconstruction") {
  Rng rng(44);
  SUBCASE("equal endpoints give zero Higgs field") {
    const Connection c = genus2_flat_seed(9);
    const HarmonicResult r = harmonic_from_endpoints(c, c, NewtonConfig{});
    double m = 0;
    for (const auto& p : r.state.phi.v) m = std::max(m, p.norm());
    CHECK(m < 1e-12);
  }
  SUBCASE("abelian closed form") {
    const SurfacePtr t = build_torus_grid(4, 4);
    const double a1 = 0.31, a2 = -0.12, b1 = 0.27, b2 = -0.05;
    const Connection plus = gauge_act(exp_gauge(random_cochain0(rng, *t, 1, 0.01)), uniform_u1(t, a1, a2));
    const Connection minus = uniform_u1(t, b1, b2);
    const HarmonicResult r = harmonic_from_endpoints(plus, minus, NewtonConfig{});
    CHECK(r.residuals.real_max() < 1e-10);
    CHECK(r.residuals.complex_max() < 1e-10);
    for (int e = 0; e < t->ne(); ++e) {
      const double expect = e % 2 == 0 ? (a1 - b1) / 2 : (a2 - b2) / 2;
      CHECK(std::abs(r.state.phi[e](0, 0) - cplx(0, expect)) < 1e-10);
    }
  }
  SUBCASE("genus two pipeline and endpoint swap") {
    const Connection plus = genus2_flat_seed(10);
    const Connection minus =
        find_flat(chart_shift(plus, random_cochain1(rng, plus.surf(), 2, 0.02)), NewtonConfig{}).conn;
    const HarmonicResult r = harmonic_from_endpoints(plus, minus, NewtonConfig{});
    CHECK(r.residuals.real_max() < 1e-8);
    const auto [p, m] = p_theta(r.state, 0.0);
    CHECK(state_distance(FieldState::zero_higgs(m), FieldState::zero_higgs(minus)) < 1e-9);
    const CoulombResult back = coulomb_fix(FieldState::zero_higgs(plus), FieldState::zero_higgs(p), NewtonConfig{});
    CHECK(state_distance(gauge_act(back.u, FieldState::zero_higgs(p)), FieldState::zero_higgs(plus)) < 1e-9);

    const HarmonicResult sw = harmonic_from_endpoints(minus, plus, NewtonConfig{});
    FieldState flipped = r.state;
    flipped.phi = cplx(-1) * flipped.phi;
    const CoulombResult al = coulomb_fix(flipped, sw.state, NewtonConfig{});
    CHECK(state_distance(gauge_act(al.u, sw.state), flipped) < 1e-8);
  }
  SUBCASE("far endpoints are rejected") {
    const Connection a = genus2_flat_seed(11), b = genus2_flat_seed(12);
    try {
      harmonic_from_endpoints(a, b, NewtonConfig{});
      FAIL("expected a basin error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Basin);
    }
  }
}

TEST_CASE("deformation dimension") {
  Rng rng(45);
  const FieldState oct = FieldState::zero_higgs(genus2_flat_seed(13));
  const SpectrumReport sp = deformation_dimension(oct);
  CHECK(sp.kernel_count == 20);
  CHECK(sp.gap_ratio > 1e6);
  const SpectrumReport gauged = deformation_dimension(gauge_act(random_gauge(rng, oct.conn.surf(), 2), oct));
  CHECK(gauged.kernel_count == 20);
  const Cohomology h = deformation_cohomology(oct);
  CHECK(h.h0 == 1);
  CHECK(h.h2 == 3);
  CHECK(h.h1 == 20);

  const SurfacePtr t2 = build_torus_grid(2, 2);
  const Connection u1 = find_flat(random_connection(rng, t2, 1, 0.4), NewtonConfig{}).conn;
  CHECK(deformation_dimension(FieldState::zero_higgs(u1)).kernel_count == 4);

  // reducible U(2): diagonal holonomies; the count exceeds the irreducible formula
  Connection diag = Connection::trivial(t2, 2);
  for (int e = 0; e < t2->ne(); ++e) {
    diag.transport[e](0, 0) = std::exp(cplx(0, e % 2 ? 0.3 : 0.1));
    diag.transport[e](1, 1) = std::exp(cplx(0, e % 2 ? -0.2 : 0.5));
  }
  CHECK(reducibility_check(diag) == 2);
  CHECK(deformation_dimension(FieldState::zero_higgs(diag)).kernel_count > 4);
}

TEST_CASE("unitary equivalence check") {
  Rng rng(46);
  const Connection plus = genus2_flat_seed(14);
  const Connection minus =
      find_flat(chart_shift(plus, random_cochain1(rng, plus.surf(), 2, 0.02)), NewtonConfig{}).conn;
  const FieldState s1 = harmonic_from_endpoints(plus, minus, NewtonConfig{}).state;
  const Surface& s = s1.conn.surf();
  const GaugeTransformation w = random_gauge(rng, s, 2);
  const FieldState s2 = gauge_act(w, s1);
  const GaugeTransformation winv = inverse(w);

  const UnitaryEquivVerdict v = unitary_equiv_check(s1, s2, winv.u);
  CHECK(v.bound_holds);
  CHECK(v.equivalent);
  CHECK(v.intertwining_residual < 1e-9);
  for (size_t i = 0; i < winv.u.size(); ++i) CHECK((v.unitary.u[i] - winv.u[i]).norm() < 1e-12);

  // a parallel positive hermitian factor is removed by the polar step
  std::vector<Mat> uc = winv.u;
  for (auto& m : uc) m *= std::exp(0.3);
  const UnitaryEquivVerdict vh = unitary_equiv_check(s1, s2, uc);
  CHECK(vh.equivalent);
  for (size_t i = 0; i < winv.u.size(); ++i) CHECK((vh.unitary.u[i] - winv.u[i]).norm() < 1e-9);

  const FieldState flat = FieldState::zero_higgs(plus);
  const UnitaryEquivVerdict vf = unitary_equiv_check(flat, flat, GaugeTransformation::identity(s, 2).u);
  CHECK(vf.wedge_norm2 == 0.0);
  CHECK(vf.lambda1 > 0);
  CHECK(vf.bound_holds);

  std::vector<Mat> sing(s.nv(), Mat::Zero(2, 2));
  CHECK_THROWS_AS(unitary_equiv_check(flat, flat, sing), Error);
}
