#include "hsmod/hypersym.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

namespace hsmod {

namespace {

struct Coeffs {
  double i, s, t;
};

Coeffs coeffs(const StructureSelector& sel) {
  using K = StructureSelector::Kind;
  switch (sel.kind) {
    case K::I: return {1, 0, 0};
    case K::S: return {0, 1, 0};
    case K::T: return {0, 0, 1};
    case K::STheta: return {0, std::cos(sel.theta), -std::sin(sel.theta)};
    case K::TTheta: return {0, std::sin(sel.theta), std::cos(sel.theta)};
    case K::IZeta: {
      const double r2 = std::norm(sel.zeta);
      if (std::abs(1.0 - std::abs(sel.zeta)) < 1e-9)
        throw Error(ErrorKind::InvalidArgument, "I_zeta: |zeta| = 1 is not allowed");
      const double c = 1.0 / (1.0 - r2);
      return {c * (1.0 + r2), 2.0 * c * sel.zeta.real(), -2.0 * c * sel.zeta.imag()};
    }
  }
  return {0, 0, 0};
}

RMat edge_kron(const RMat& j, int n) {
  const int d = n * n;
  RMat out = RMat::Zero(j.rows() * d, j.cols() * d);
  for (Eigen::Index r = 0; r < j.rows(); ++r)
    for (Eigen::Index c = 0; c < j.cols(); ++c)
      if (j(r, c) != 0.0) out.block(r * d, c * d, d, d) = j(r, c) * RMat::Identity(d, d);
  return out;
}

Cochain1 lin(double x, const Cochain1& a, double y, const Cochain1& b) {
  Cochain1 out;
  for (int e = 0; e < a.size(); ++e) out.v.push_back(x * a[e] + y * b[e]);
  return out;
}

}  // namespace

StructureSelector StructureSelector::i_zeta(cplx z) {
  if (std::abs(1.0 - std::abs(z)) < 1e-9)
    throw Error(ErrorKind::InvalidArgument, "I_zeta: |zeta| within 1e-9 of the unit circle");
  return {Kind::IZeta, 0.0, z};
}

double metric_g(const Surface& s, const TangentPair& x, const TangentPair& y) {
  return inner1(s, x.a, y.a) - inner1(s, x.psi, y.psi);
}

TangentPair apply_structure(const Surface& s, const StructureSelector& sel, const TangentPair& tp) {
  const Coeffs c = coeffs(sel);
  const Cochain1 ja = apply_J(s, tp.a);
  const Cochain1 jp = apply_J(s, tp.psi);
  TangentPair out;
  out.a = lin(-c.i, ja, 1.0, lin(-c.s, tp.psi, c.t, jp));
  out.psi = lin(c.i, jp, 1.0, lin(-c.s, tp.a, -c.t, ja));
  return out;
}

double omega(const Surface& s, const StructureSelector& sel, const TangentPair& x, const TangentPair& y) {
  return metric_g(s, apply_structure(s, sel, x), y);
}

cplx omega_c(const Surface& s, const TangentPair& x, const TangentPair& y) {
  return {omega(s, StructureSelector::S(), x, y), omega(s, StructureSelector::T(), x, y)};
}

RMat structure_matrix(const Surface& s, int n, const StructureSelector& sel) {
  const Coeffs c = coeffs(sel);
  const RMat jj = edge_kron(s.J, n);
  const Eigen::Index h = jj.rows();
  const RMat id = RMat::Identity(h, h);
  RMat m(2 * h, 2 * h);
  m.topLeftCorner(h, h) = -c.i * jj;
  m.topRightCorner(h, h) = -c.s * id + c.t * jj;
  m.bottomLeftCorner(h, h) = -c.s * id - c.t * jj;
  m.bottomRightCorner(h, h) = c.i * jj;
  return m;
}

RMat metric_matrix(const Surface& s, int n) {
  const int d = n * n;
  const Eigen::Index h = static_cast<Eigen::Index>(s.ne()) * d;
  RVec w(2 * h);
  for (int e = 0; e < s.ne(); ++e) {
    w.segment(e * d, d).setConstant(s.m1[e]);
    w.segment(h + e * d, d).setConstant(-s.m1[e]);
  }
  return w.asDiagonal();
}

Cochain1 rotate_J(const Surface& s, const Cochain1& x, double theta) {
  return lin(std::cos(theta), x, std::sin(theta), apply_J(s, x));
}

std::pair<Connection, Connection> p_theta(const FieldState& st, double theta) {
  const Cochain1 r = rotate_J(st.conn.surf(), st.phi, theta);
  return {chart_shift(st.conn, r, 1.0), chart_shift(st.conn, r, -1.0)};
}

FieldState p_theta_inverse(const Connection& plus, const Connection& minus, double theta) {
  if (plus.surface != minus.surface || plus.rank != minus.rank)
    throw Error(ErrorKind::InvalidArgument, "p_theta_inverse: connections live on different bundles");
  Cochain1 half;
  for (size_t e = 0; e < plus.transport.size(); ++e)
    half.v.push_back(0.5 * group_log(plus.transport[e] * minus.transport[e].adjoint()));
  FieldState st;
  st.conn = chart_shift(plus, half, -1.0);
  st.phi = rotate_J(plus.surf(), half, -theta);
  return st;
}

FieldState circle_act(const FieldState& st, double alpha) {
  return {st.conn, rotate_J(st.conn.surf(), st.phi, alpha)};
}

RMat circle_matrix(const Surface& s, int n, double alpha) {
  const RMat jj = edge_kron(s.J, n);
  const Eigen::Index h = jj.rows();
  RMat m = RMat::Identity(2 * h, 2 * h);
  m.bottomRightCorner(h, h) = std::cos(alpha) * RMat::Identity(h, h) + std::sin(alpha) * jj;
  return m;
}

std::vector<CVec> apply_lambda(const LambdaConnection& lc, const std::vector<CVec>& sec) {
  const Surface& s = lc.base.surf();
  const int n = lc.base.rank;
  // d^nabla s, then its (1,0)-part (J acts on the edge index)
  std::vector<CVec> ds(s.ne());
  for (int e = 0; e < s.ne(); ++e) ds[e] = lc.base.transport[e] * sec[s.head(e)] - sec[s.tail(e)];
  std::vector<CVec> out(s.ne(), CVec::Zero(n));
  for (int e = 0; e < s.ne(); ++e) {
    CVec jds = CVec::Zero(n);
    for (int k = 0; k < s.ne(); ++k)
      if (s.J(e, k) != 0.0) jds += s.J(e, k) * ds[k];
    out[e] = lc.lambda * 0.5 * (ds[e] - cplx(0, 1) * jds) + lc.higgs[e] * sec[s.tail(e)];
  }
  return out;
}

std::vector<CVec> leibniz_term(const LambdaConnection& lc, const std::vector<cplx>& f, const std::vector<CVec>& sec) {
  const Surface& s = lc.base.surf();
  std::vector<CVec> fs(sec.size());
  for (size_t v = 0; v < sec.size(); ++v) fs[v] = f[v] * sec[v];
  std::vector<CVec> a = apply_lambda(lc, fs);
  std::vector<CVec> b = apply_lambda(lc, sec);
  for (int e = 0; e < s.ne(); ++e) a[e] -= f[s.tail(e)] * b[e];
  return a;
}

FZeta f_zeta(const FieldState& st, cplx zeta) {
  if (std::abs(1.0 - std::abs(zeta)) < 1e-9)
    throw Error(ErrorKind::InvalidArgument, "f_zeta: |zeta| within 1e-9 of the unit circle");
  const Surface& s = st.conn.surf();
  const cplx lam = cplx(0, -1) * std::conj(zeta);
  const Cochain1 higgs = phi_to_higgs(s, st.phi);
  FZeta out;
  out.dbar.conn = st.conn;
  out.dbar.offset = lam * star_conj(higgs);
  out.lc.lambda = lam;
  out.lc.base = st.conn;
  out.lc.higgs = higgs;
  return out;
}

RMat df_zeta_matrix(const Surface& s, int n, cplx zeta) {
  if (std::abs(1.0 - std::abs(zeta)) < 1e-9)
    throw Error(ErrorKind::InvalidArgument, "df_zeta: |zeta| within 1e-9 of the unit circle");
  const int ne = s.ne();
  const int dim = 2 * ne * n * n;
  const cplx lam = cplx(0, -1) * std::conj(zeta);
  RMat m(4 * ne * n * n, dim);
  for (int k = 0; k < dim; ++k) {
    RVec basis = RVec::Zero(dim);
    basis[k] = 1.0;
    const TangentPair tp = tp_from_real(basis, ne, n);
    const Cochain1 ja = apply_J(s, tp.a);
    Cochain1 a01;
    for (int e = 0; e < ne; ++e) a01.v.push_back(0.5 * (tp.a[e] + cplx(0, 1) * ja[e]));
    const Cochain1 higgs = phi_to_higgs(s, tp.psi);
    const Cochain1 o1 = a01 + lam * star_conj(higgs);
    const Cochain1 o2 = higgs + lam * star_conj(a01);
    const RVec r1 = complex_to_real(o1), r2 = complex_to_real(o2);
    m.col(k) << r1, r2;
  }
  return m;
}

RMat complex_unit_matrix(int m) {
  RMat out = RMat::Zero(m, m);
  for (int k = 0; k + 1 < m; k += 2) {
    out(k, k + 1) = -1.0;
    out(k + 1, k) = 1.0;
  }
  return out;
}

LambdaConnection lambda_rescale(const LambdaConnection& lc, cplx zeta) {
  if (lc.lambda == cplx(0.0) || zeta == cplx(0.0))
    throw Error(ErrorKind::InvalidArgument, "lambda_rescale: lambda and zeta must be nonzero");
  LambdaConnection out = lc;
  const cplx r = zeta / lc.lambda;
  out.lambda = zeta;
  for (auto& m : out.higgs.v) m *= r;
  return out;
}

void write_triplets(std::ostream& os, const RMat& m, double drop) {
  os << std::setprecision(17);
  os << "# rows " << m.rows() << " cols " << m.cols() << "\n";
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      if (std::abs(m(r, c)) > drop) os << r << " " << c << " " << m(r, c) << "\n";
}

}  // namespace hsmod
