#include "hsmod/moment.hpp"

#include <cmath>

#include "hsmod/hypersym.hpp"

namespace hsmod {

namespace {

Mat dual_block(const Mat& x, const Mat& dx) {
  const Eigen::Index n = x.rows();
  Mat b = Mat::Zero(2 * n, 2 * n);
  b.topLeftCorner(n, n) = x;
  b.bottomRightCorner(n, n) = x;
  b.topRightCorner(n, n) = dx;
  return b;
}

Cochain2 upper_right(const Cochain2& x) {
  Cochain2 out;
  for (const auto& m : x.v) {
    const Eigen::Index n = m.rows() / 2;
    out.v.push_back(m.topRightCorner(n, n));
  }
  return out;
}

}  // namespace

Cochain2 wedge_term(const Surface& s, const Cochain1& phi) {
  const Eigen::Index m = phi[0].rows();
  Cochain2 out = Cochain2::zeros(s.nf(), static_cast<int>(m));
  std::vector<std::vector<int>> star(s.nv());
  for (int e = 0; e < s.ne(); ++e) star[s.tail(e)].push_back(e);
  for (int f = 0; f < s.nf(); ++f) {
    const auto& es = star[s.face_base[f]];
    for (int e : es)
      for (int ep : es) {
        const double w = s.J(ep, e);
        if (w != 0.0) out[f] += (0.5 * w) * (phi[e] * phi[ep] - phi[ep] * phi[e]);
      }
  }
  return out;
}

MomentValue moment(const FieldState& st) {
  const Surface& s = st.conn.surf();
  MomentValue mv;
  mv.mu_I = curvature(st.conn) + wedge_term(s, st.phi);
  mv.mu_C = kMuCNormalization * covariant_d1(st.conn, phi_to_higgs(s, st.phi));
  return mv;
}

MomentValue moment_linearization(const FieldState& st, const TangentPair& tp) {
  const Surface& s = st.conn.surf();
  std::vector<Mat> ub, ubinv;
  for (int e = 0; e < s.ne(); ++e) {
    const Mat& u = st.conn.transport[e];
    const Mat ui = u.adjoint();
    ub.push_back(dual_block(u, tp.a[e] * u));
    ubinv.push_back(dual_block(ui, -ui * tp.a[e]));
  }
  Cochain1 phib;
  for (int e = 0; e < s.ne(); ++e) phib.v.push_back(dual_block(st.phi[e], tp.psi[e]));
  Cochain2 curv;
  for (int f = 0; f < s.nf(); ++f) {
    const Mat hb = face_holonomy_raw(s, ub, ubinv, f);
    const Eigen::Index n = st.conn.rank;
    const Mat h = hb.topLeftCorner(n, n);
    // guard the branch in the same way as curvature()
    (void)group_log(h);
    curv.v.push_back(dual_block(Mat::Zero(n, n), log_frechet(h, hb.topRightCorner(n, n))));
  }
  MomentValue out;
  out.mu_I = upper_right(curv + wedge_term(s, phib));
  out.mu_C = kMuCNormalization * upper_right(covariant_d1_raw(s, ub, ubinv, phi_to_higgs(s, phib)));
  return out;
}

cplx moment_pairing(const Surface& s, const Cochain2& mu, const Cochain0& xi) {
  cplx r = 0;
  for (int f = 0; f < s.nf(); ++f) r += (mu[f] * xi[s.face_base[f]]).trace();
  return r;
}

MomentCheck moment_derivative_check(const FieldState& st, const TangentPair& tp, const Cochain0& xi, double h) {
  const Surface& s = st.conn.surf();
  const MomentValue m0 = moment(st);
  FieldState sh;
  sh.conn = chart_shift(st.conn, tp.a, h);
  sh.phi = st.phi + cplx(h) * tp.psi;
  const MomentValue m1 = moment(sh);
  const cplx pi = moment_pairing(s, m1.mu_I - m0.mu_I, xi) / h;
  const cplx pc = moment_pairing(s, m1.mu_C - m0.mu_C, xi) / h;
  const TangentPair x = d1_action(st, xi);
  MomentCheck c;
  c.res_I = std::abs(pi.real() - omega(s, StructureSelector::I(), x, tp));
  c.res_S = std::abs(pc.real() - omega(s, StructureSelector::S(), x, tp));
  c.res_T = std::abs(pc.imag() - omega(s, StructureSelector::T(), x, tp));
  return c;
}

double norm2c(const Surface& s, const Cochain2& x) {
  double r = 0;
  for (int f = 0; f < x.size(); ++f) r += s.m2[f] * x[f].squaredNorm();
  return std::sqrt(r);
}

ResidualReport residual(const FieldState& st) {
  const Surface& s = st.conn.surf();
  ResidualReport r;
  const MomentValue mv = moment(st);
  r.mu_I_norm = norm2c(s, mv.mu_I);
  r.mu_C_norm = norm2c(s, mv.mu_C);
  const auto [plus, minus] = p_theta(st, 0.0);
  r.F_plus_norm = norm2c(s, curvature(plus));
  r.F_minus_norm = norm2c(s, curvature(minus));
  r.coclosed_norm = norm0(s, covariant_d0_adjoint(st.conn, st.phi));
  return r;
}

}  // namespace hsmod
