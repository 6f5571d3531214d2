#include "doctest.h"

#include <Eigen/Eigenvalues>

#include "hsmod/degeneracy.hpp"
#include "hsmod/hypersym.hpp"
#include "hsmod/solver.hpp"

using namespace hsmod;

namespace {

double max_abs(const RMat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

RVec eigenvalues(const RMat& m) {
  return Eigen::SelfAdjointEigenSolver<RMat>(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly).eigenvalues();
}

// Harmonic state whose plus endpoint is a diagonal (reducible) flat U(2)
// connection on OCT-MIN; the minus endpoint is a flattened perturbation.
FieldState reducible_endpoint_state(std::uint64_t seed, double spread) {
  const SurfacePtr s = build_octmin();
  Rng rng(seed);
  std::normal_distribution<double> nd;
  Connection plus = Connection::trivial(s, 2);
  for (auto& u : plus.transport) {
    u(0, 0) = std::exp(cplx(0, 0.3 * nd(rng)));
    u(1, 1) = std::exp(cplx(0, 0.3 * nd(rng)));
  }
  const Connection minus = find_flat(chart_shift(plus, random_cochain1(rng, *s, 2, spread)), NewtonConfig{}).conn;
  return harmonic_from_endpoints(plus, minus, NewtonConfig{}).state;
}

FieldState generic_state(std::uint64_t seed, double spread) {
  Rng rng(seed);
  const Connection plus = genus2_flat_seed(seed);
  const Connection minus =
      find_flat(chart_shift(plus, random_cochain1(rng, plus.surf(), 2, spread)), NewtonConfig{}).conn;
  return harmonic_from_endpoints(plus, minus, NewtonConfig{}).state;
}

}  // namespace

TEST_CASE("degeneracy operator structure") {
  Rng rng(51);
  const SurfacePtr t = build_torus_grid(3, 3);
  FieldState st = FieldState::zero_higgs(random_connection(rng, t, 2, 0.5));
  st.phi = random_cochain1(rng, *t, 2, 0.3);
  const DegeneracyOperator op = degeneracy_operator(st);
  CHECK(max_abs(op.total() - op.total().transpose()) < 1e-12);
  CHECK(eigenvalues(op.laplacian).minCoeff() > -1e-12);
  CHECK(eigenvalues(op.phi_term).maxCoeff() < 1e-12);

  const DegeneracyOperator zero = degeneracy_operator(FieldState::zero_higgs(st.conn));
  CHECK(max_abs(zero.phi_term) < 1e-15);
  CHECK(eigenvalues(zero.total()).minCoeff() > -1e-12);

  FieldState ab = FieldState::zero_higgs(random_connection(rng, t, 1, 0.5));
  ab.phi = random_cochain1(rng, *t, 1);
  CHECK(max_abs(degeneracy_operator(ab).phi_term) < 1e-15);
}

TEST_CASE("degeneracy spectrum is gauge invariant") {
  Rng rng(52);
  const SurfacePtr s = build_octmin();
  FieldState st = FieldState::zero_higgs(random_connection(rng, s, 2, 0.5));
  st.phi = random_cochain1(rng, *s, 2, 0.3);
  const RVec a = eigenvalues(degeneracy_operator(st).total());
  const RVec b = eigenvalues(degeneracy_operator(gauge_act(random_gauge(rng, *s, 2), st)).total());
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("reducibility") {
  const SurfacePtr s = build_octmin();
  CHECK(reducibility_check(Connection::trivial(s, 2)) == 4);
  CHECK(reducibility_check(genus2_flat_seed(3)) == 1);
  Connection diag = Connection::trivial(s, 2);
  for (int e = 0; e < 4; ++e) {
    diag.transport[e](0, 0) = std::exp(cplx(0, 0.2 + 0.1 * e));
    diag.transport[e](1, 1) = std::exp(cplx(0, -0.4 + 0.3 * e));
  }
  CHECK(reducibility_check(diag) == 2);
}

TEST_CASE("irreducible flat points are nondegenerate") {
  const DegeneracyReport r = degeneracy_spectrum(FieldState::zero_higgs(genus2_flat_seed(4)));
  CHECK_FALSE(r.is_degenerate);
  CHECK(r.lambda_min > 0);
  CHECK_FALSE(r.witness.has_value());
}

TEST_CASE("reducible plus endpoint lies in the degeneracy locus") {
  const FieldState st = reducible_endpoint_state(3, 0.005);
  CHECK(reducibility_check(p_theta(st, 0.0).first) == 2);
  const DegeneracyReport r = degeneracy_spectrum(st);
  CHECK(r.is_degenerate);
  REQUIRE(r.witness.has_value());
  const Cochain0 zero = Cochain0::zeros(st.conn.surf().nv(), 2);
  CHECK(jacobi_witness_check(st, *r.witness, zero) < 1e-9);
  CHECK(gram_singular(orbit_gram(st)));
  // the witness is insensitive to a central shift
  Cochain0 shifted = *r.witness;
  for (auto& m : shifted.v) m += cplx(0, 0.7) * Mat::Identity(2, 2);
  CHECK(std::abs(jacobi_witness_check(st, shifted, zero) - jacobi_witness_check(st, *r.witness, zero)) < 1e-12);
  CHECK_THROWS_AS(jacobi_witness_check(st, zero, zero), Error);
}

TEST_CASE("lambda_min varies continuously under phi scaling") {
  const FieldState base = generic_state(6, 0.02);
  double prev = -1;
  for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    FieldState st = base;
    st.phi = cplx(t) * base.phi;
    const double l = degeneracy_spectrum(st).lambda_min;
    CHECK(l > 0);
    if (prev > 0) CHECK(std::abs(l - prev) < 0.05 * prev);
    prev = l;
  }
}

TEST_CASE("small-phi certificate") {
  Rng rng(53);
  const FieldState flat = FieldState::zero_higgs(genus2_flat_seed(7));
  const Certificate c0 = small_phi_certificate(flat);
  CHECK(c0.certified);
  CHECK(c0.threshold > 0);
  CHECK(c0.phi_norm == 0.0);

  const FieldState red = reducible_endpoint_state(3, 0.005);
  try {
    small_phi_certificate(red);
    FAIL("expected a hypothesis error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Hypothesis);
  }

  // nondegenerate random state: witness residual bounded below by |lambda_min|
  const FieldState g = generic_state(8, 0.02);
  const DegeneracyReport r = degeneracy_spectrum(g);
  const Cochain0 xi = random_cochain0(rng, g.conn.surf(), 2);
  CHECK(jacobi_witness_check(g, xi, Cochain0::zeros(g.conn.surf().nv(), 2)) >= std::abs(r.lambda_min) * (1 - 1e-9));
}

TEST_CASE("orbit Gram singularity matches the spectrum") {
  const FieldState g = generic_state(9, 0.02);
  CHECK_FALSE(gram_singular(orbit_gram(g)));
  CHECK_FALSE(degeneracy_spectrum(g).is_degenerate);
  const FieldState red = reducible_endpoint_state(5, 0.005);
  CHECK(gram_singular(orbit_gram(red)) == degeneracy_spectrum(red).is_degenerate);
}

TEST_CASE("phi four-norm") {
  const SurfacePtr s = build_octmin();
  Cochain1 phi = Cochain1::zeros(4, 1);
  for (int e = 0; e < 4; ++e) phi[e](0, 0) = cplx(0, 1.0);
  CHECK(phi_four_norm(*s, phi) == doctest::Approx(std::pow(s->m1.sum(), 0.25)));
  phi[0](0, 0) = cplx(0, 2.0);
  CHECK(phi_four_norm(*s, phi) == doctest::Approx(std::pow(s->m1.sum() + 15 * s->m1[0], 0.25)));
}
