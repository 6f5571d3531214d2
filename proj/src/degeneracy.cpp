#include "hsmod/degeneracy.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "hsmod/hypersym.hpp"

namespace hsmod {

namespace {

int dim0(const Surface& s, int n) { return s.nv() * n * n; }

RVec center_coords(const Surface& s, int n) {
  // i*Id in lie_basis coordinates: ones on the n diagonal generators,
  // scaled by sqrt(m0) for the symmetrized coordinates.
  RVec c = RVec::Zero(dim0(s, n));
  for (int v = 0; v < s.nv(); ++v)
    for (int k = 0; k < n; ++k) c[v * n * n + k] = std::sqrt(s.m0[v]);
  return c.normalized();
}

RVec sqrt_m0_weights(const Surface& s, int n) {
  RVec w(dim0(s, n));
  for (int v = 0; v < s.nv(); ++v) w.segment(v * n * n, n * n).setConstant(std::sqrt(s.m0[v]));
  return w;
}

// Matrix of x -> f(x) on 0-cochains, conjugated by M0^{1/2}.
RMat symmetrized(const Surface& s, int n, const std::function<Cochain0(const Cochain0&)>& f) {
  const RVec w = sqrt_m0_weights(s, n);
  const int nv = s.nv();
  return assemble(
      [&](const RVec& y) {
        const RVec x = y.cwiseQuotient(w);
        const RVec fx = to_real(f(from_real<0>(x, nv, n)));
        return RVec(fx.cwiseProduct(w));
      },
      dim0(s, n));
}

std::vector<double> eigenvalues(const RMat& m) {
  Eigen::SelfAdjointEigenSolver<RMat> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::NonConvergence, "symmetric eigensolver failed");
  const RVec ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

}  // namespace

DegeneracyOperator degeneracy_operator(const FieldState& st) {
  const Surface& s = st.conn.surf();
  const int n = st.conn.rank;
  DegeneracyOperator op;
  op.basis = complement_basis(center_coords(s, n));
  const RMat lap = symmetrized(s, n, [&](const Cochain0& xi) {
    return covariant_d0_adjoint(st.conn, covariant_d0(st.conn, xi));
  });
  // split adjoint of (0, [phi, xi]) is minus the L2 adjoint
  const RMat phi = symmetrized(s, n, [&](const Cochain0& xi) {
    TangentPair tp = TangentPair::zeros(s, n);
    tp.psi = d1_action(st, xi).psi;
    return d1_split_adjoint(st, tp);
  });
  op.laplacian = op.basis.transpose() * lap * op.basis;
  op.phi_term = op.basis.transpose() * phi * op.basis;
  return op;
}

DegeneracyReport degeneracy_spectrum(const FieldState& st, int count) {
  const Surface& s = st.conn.surf();
  const int n = st.conn.rank;
  const DegeneracyOperator op = degeneracy_operator(st);
  const RMat l = op.total();
  Eigen::SelfAdjointEigenSolver<RMat> es(0.5 * (l + l.transpose()));
  if (es.info() != Eigen::Success) throw Error(ErrorKind::NonConvergence, "degeneracy eigensolver failed");
  const RVec ev = es.eigenvalues();
  std::vector<double> all(ev.data(), ev.data() + ev.size());
  DegeneracyReport rep;
  SpectrumReport full = classify_spectrum(all);
  rep.is_degenerate = full.kernel_count > 0;
  Eigen::Index imin = 0;
  ev.cwiseAbs().minCoeff(&imin);
  rep.lambda_min = ev[imin];
  rep.spectrum = full;
  if (static_cast<int>(rep.spectrum.values.size()) > count) rep.spectrum.values.resize(count);
  if (rep.is_degenerate) {
    const RVec y = op.basis * es.eigenvectors().col(imin);
    const RVec x = y.cwiseQuotient(sqrt_m0_weights(s, n));
    rep.witness = from_real<0>(x, s.nv(), n);
  }
  return rep;
}

int reducibility_check(const Connection& c) {
  const Surface& s = c.surf();
  const int n = c.rank;
  const RMat d = assemble(
      [&](const RVec& x) { return to_real(covariant_d0(c, from_real<0>(x, s.nv(), n))); }, dim0(s, n));
  return singular_spectrum(d).kernel_count;
}

double phi_four_norm(const Surface& s, const Cochain1& phi) {
  double r = 0;
  for (int e = 0; e < phi.size(); ++e) r += s.m1[e] * std::pow(phi[e].squaredNorm(), 2);
  return std::pow(r, 0.25);
}

Certificate small_phi_certificate(const FieldState& st) {
  const Surface& s = st.conn.surf();
  const int n = st.conn.rank;
  const Connection plus = p_theta(st, 0.0).first;
  if (reducibility_check(plus) != 1)
    throw Error(ErrorKind::Hypothesis, "small_phi_certificate: nabla+ is reducible");
  const RMat basis = complement_basis(center_coords(s, n));
  const RMat lap = symmetrized(s, n, [&](const Cochain0& xi) {
    return covariant_d0_adjoint(plus, covariant_d0(plus, xi));
  });
  const std::vector<double> ev = eigenvalues(basis.transpose() * lap * basis);
  Certificate c;
  c.lambda_min = ev.front();
  c.kappa = 1.0 / std::sqrt(1.0 + c.lambda_min);
  c.phi_norm = phi_four_norm(s, st.phi);
  c.threshold = 1.0 / (4.0 * c.kappa * (1.0 + 1.0 / c.lambda_min));
  c.certified = c.phi_norm < c.threshold;
  return c;
}

double jacobi_witness_check(const FieldState& st, const Cochain0& xi_plus, const Cochain0& xi_minus) {
  const Surface& s = st.conn.surf();
  const Cochain0 raw = xi_plus - xi_minus;
  const Cochain0 xi = project_out_center(s, raw);
  const double nx = norm0(s, xi);
  const double scale = std::max(1.0, norm0(s, xi_plus) + norm0(s, xi_minus));
  if (nx <= 1e-14 * scale)
    throw Error(ErrorKind::DegenerateInput, "jacobi_witness_check: witness vanishes modulo the center");
  const Cochain0 lxi = d1_split_adjoint(st, d1_action(st, xi));
  return norm0(s, lxi) / nx;
}

RMat orbit_gram(const FieldState& st) {
  const Surface& s = st.conn.surf();
  const int n = st.conn.rank;
  const RVec w = sqrt_m0_weights(s, n);
  const RMat basis = complement_basis(center_coords(s, n));
  std::vector<TangentPair> orbit;
  for (Eigen::Index k = 0; k < basis.cols(); ++k) {
    const RVec x = basis.col(k).cwiseQuotient(w);
    orbit.push_back(d1_action(st, from_real<0>(x, s.nv(), n)));
  }
  const Eigen::Index m = basis.cols();
  RMat g(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = i; j < m; ++j) g(i, j) = g(j, i) = metric_g(s, orbit[i], orbit[j]);
  return g;
}

bool gram_singular(const RMat& gram) { return classify_spectrum(eigenvalues(gram)).kernel_count > 0; }

}  // namespace hsmod
