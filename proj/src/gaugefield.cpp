#include "hsmod/gaugefield.hpp"

#include <cmath>

namespace hsmod {

namespace {

void require_rank(const Connection& c, const std::vector<Mat>& v, const char* what) {
  for (const auto& m : v)
    if (m.rows() != c.rank || m.cols() != c.rank)
      throw Error(ErrorKind::InvalidArgument, std::string(what) + ": rank mismatch");
}

}  // namespace

Connection Connection::trivial(SurfacePtr s, int n) {
  Connection c;
  c.rank = n;
  c.transport.assign(s->ne(), Mat::Identity(n, n));
  c.surface = std::move(s);
  return c;
}

FieldState FieldState::zero_higgs(const Connection& c) {
  return {c, Cochain1::zeros(c.surf().ne(), c.rank)};
}

TangentPair TangentPair::zeros(const Surface& s, int n) {
  return {Cochain1::zeros(s.ne(), n), Cochain1::zeros(s.ne(), n)};
}

GaugeTransformation GaugeTransformation::identity(const Surface& s, int n) {
  return {std::vector<Mat>(s.nv(), Mat::Identity(n, n))};
}

double inner0(const Surface& s, const Cochain0& x, const Cochain0& y) {
  double r = 0;
  for (int i = 0; i < x.size(); ++i) r += s.m0[i] * trace_inner(x[i], y[i]);
  return r;
}
double inner1(const Surface& s, const Cochain1& x, const Cochain1& y) {
  double r = 0;
  for (int i = 0; i < x.size(); ++i) r += s.m1[i] * trace_inner(x[i], y[i]);
  return r;
}
double inner2(const Surface& s, const Cochain2& x, const Cochain2& y) {
  double r = 0;
  for (int i = 0; i < x.size(); ++i) r += s.m2[i] * trace_inner(x[i], y[i]);
  return r;
}
double norm0(const Surface& s, const Cochain0& x) { return std::sqrt(inner0(s, x, x)); }
double norm1(const Surface& s, const Cochain1& x) { return std::sqrt(inner1(s, x, x)); }
double norm2(const Surface& s, const Cochain2& x) { return std::sqrt(inner2(s, x, x)); }
double inner_tp(const Surface& s, const TangentPair& x, const TangentPair& y) {
  return inner1(s, x.a, y.a) + inner1(s, x.psi, y.psi);
}

Cochain1 apply_J(const Surface& s, const Cochain1& x) {
  const int ne = s.ne();
  const Eigen::Index r = x[0].rows(), c = x[0].cols();
  Cochain1 out(std::vector<Mat>(ne, Mat::Zero(r, c)));
  for (int j = 0; j < ne; ++j)
    for (int i = 0; i < ne; ++i) {
      const double w = s.J(i, j);
      if (w != 0.0) out[i] += w * x[j];
    }
  return out;
}

Cochain1 covariant_d0(const Connection& c, const Cochain0& xi) {
  require_rank(c, xi.v, "covariant_d0");
  const Surface& s = c.surf();
  Cochain1 out;
  out.v.reserve(s.ne());
  for (int e = 0; e < s.ne(); ++e) {
    const Mat& u = c.transport[e];
    out.v.push_back(u * xi[s.head(e)] * u.adjoint() - xi[s.tail(e)]);
  }
  return out;
}

Cochain2 covariant_d1_raw(const Surface& s, const std::vector<Mat>& u, const std::vector<Mat>& uinv,
                          const Cochain1& a) {
  const Eigen::Index n = u[0].rows();
  const Eigen::Index m = a[0].rows();
  Cochain2 out;
  out.v.reserve(s.nf());
  for (int f = 0; f < s.nf(); ++f) {
    Mat p = Mat::Identity(n, n), pinv = Mat::Identity(n, n);
    Mat acc = Mat::Zero(m, m);
    for (const auto& st : s.faces[f]) {
      if (st.sign > 0) {
        acc += p * a[st.edge] * pinv;
        p = p * u[st.edge];
        pinv = uinv[st.edge] * pinv;
      } else {
        p = p * uinv[st.edge];
        pinv = u[st.edge] * pinv;
        acc -= p * a[st.edge] * pinv;
      }
    }
    out.v.push_back(acc);
  }
  return out;
}

Cochain2 covariant_d1(const Connection& c, const Cochain1& a) {
  require_rank(c, a.v, "covariant_d1");
  std::vector<Mat> inv;
  inv.reserve(c.transport.size());
  for (const auto& u : c.transport) inv.push_back(u.adjoint());
  return covariant_d1_raw(c.surf(), c.transport, inv, a);
}

Mat face_holonomy(const Connection& c, int f) {
  Mat h = Mat::Identity(c.rank, c.rank);
  for (const auto& st : c.surf().faces[f])
    h = st.sign > 0 ? Mat(h * c.transport[st.edge]) : Mat(h * c.transport[st.edge].adjoint());
  return h;
}

Mat face_holonomy_raw(const Surface& s, const std::vector<Mat>& u, const std::vector<Mat>& uinv, int f) {
  Mat h = Mat::Identity(u[0].rows(), u[0].cols());
  for (const auto& st : s.faces[f]) h = h * (st.sign > 0 ? u[st.edge] : uinv[st.edge]);
  return h;
}

Cochain2 curvature(const Connection& c) {
  Cochain2 out;
  out.v.reserve(c.surf().nf());
  for (int f = 0; f < c.surf().nf(); ++f) {
    try {
      out.v.push_back(group_log(face_holonomy(c, f)));
    } catch (const Error& e) {
      throw Error(ErrorKind::BranchCut, "curvature: face " + std::to_string(f) + " holonomy has eigenvalue -1", -1, f);
    }
  }
  return out;
}

Connection gauge_act(const GaugeTransformation& g, const Connection& c) {
  require_rank(c, g.u, "gauge_act");
  Connection out = c;
  const Surface& s = c.surf();
  for (int e = 0; e < s.ne(); ++e) out.transport[e] = g.u[s.tail(e)].adjoint() * c.transport[e] * g.u[s.head(e)];
  return out;
}

FieldState gauge_act(const GaugeTransformation& g, const FieldState& st) {
  return {gauge_act(g, st.conn), conj_edges(g, st.conn.surf(), st.phi)};
}

GaugeTransformation compose(const GaugeTransformation& u, const GaugeTransformation& v) {
  GaugeTransformation w;
  for (size_t i = 0; i < u.u.size(); ++i) w.u.push_back(u.u[i] * v.u[i]);
  return w;
}

GaugeTransformation inverse(const GaugeTransformation& u) {
  GaugeTransformation w;
  for (const auto& m : u.u) w.u.push_back(m.adjoint());
  return w;
}

Cochain0 conj_vertices(const GaugeTransformation& g, const Cochain0& x) {
  Cochain0 out;
  for (int v = 0; v < x.size(); ++v) out.v.push_back(g.u[v].adjoint() * x[v] * g.u[v]);
  return out;
}

Cochain1 conj_edges(const GaugeTransformation& g, const Surface& s, const Cochain1& x) {
  Cochain1 out;
  for (int e = 0; e < x.size(); ++e) out.v.push_back(g.u[s.tail(e)].adjoint() * x[e] * g.u[s.tail(e)]);
  return out;
}

Cochain2 conj_faces(const GaugeTransformation& g, const Surface& s, const Cochain2& x) {
  Cochain2 out;
  for (int f = 0; f < x.size(); ++f) {
    const Mat& u = g.u[s.face_base[f]];
    out.v.push_back(u.adjoint() * x[f] * u);
  }
  return out;
}

TangentPair d1_action(const FieldState& st, const Cochain0& xi) {
  const Surface& s = st.conn.surf();
  TangentPair tp;
  tp.a = covariant_d0(st.conn, xi);
  for (int e = 0; e < s.ne(); ++e) tp.psi.v.push_back(bracket(st.phi[e], xi[s.tail(e)]));
  return tp;
}

Cochain0 covariant_d0_adjoint(const Connection& c, const Cochain1& a) {
  require_rank(c, a.v, "covariant_d0_adjoint");
  const Surface& s = c.surf();
  Cochain0 out = Cochain0::zeros(s.nv(), c.rank);
  for (int e = 0; e < s.ne(); ++e) {
    const Mat& u = c.transport[e];
    out[s.head(e)] += s.m1[e] * (u.adjoint() * a[e] * u);
    out[s.tail(e)] -= s.m1[e] * a[e];
  }
  for (int v = 0; v < s.nv(); ++v) out[v] /= s.m0[v];
  return out;
}

namespace {

Cochain0 adjoint_with_sign(const FieldState& st, const TangentPair& tp, double psi_sign) {
  const Surface& s = st.conn.surf();
  require_rank(st.conn, tp.psi.v, "d1 adjoint");
  Cochain0 out = covariant_d0_adjoint(st.conn, tp.a);
  // <[phi, xi], psi> = <xi, [psi, phi]> for skew-hermitian phi
  for (int e = 0; e < s.ne(); ++e)
    out[s.tail(e)] += (psi_sign * s.m1[e] / s.m0[s.tail(e)]) * bracket(tp.psi[e], st.phi[e]);
  return out;
}

}  // namespace

Cochain0 d1_l2_adjoint(const FieldState& st, const TangentPair& tp) { return adjoint_with_sign(st, tp, 1.0); }
Cochain0 d1_split_adjoint(const FieldState& st, const TangentPair& tp) { return adjoint_with_sign(st, tp, -1.0); }

Cochain1 phi_to_higgs(const Surface& s, const Cochain1& phi) {
  Cochain1 jp = apply_J(s, phi);
  Cochain1 out;
  for (int e = 0; e < phi.size(); ++e) out.v.push_back(0.5 * (phi[e] - cplx(0, 1) * jp[e]));
  return out;
}

Cochain1 star_conj(const Cochain1& x) {
  Cochain1 out;
  for (const auto& m : x.v) out.v.push_back(m.adjoint());
  return out;
}

Cochain1 higgs_to_phi(const Surface&, const Cochain1& higgs) {
  Cochain1 out;
  for (const auto& m : higgs.v) out.v.push_back(m - m.adjoint());
  return out;
}

Connection chart_shift(const Connection& c, const Cochain1& a, double t) {
  Connection out = c;
  for (size_t e = 0; e < c.transport.size(); ++e) out.transport[e] = group_exp(t * a[e]) * c.transport[e];
  return out;
}

Cochain1 chart_difference(const Connection& c2, const Connection& c1) {
  Cochain1 out;
  for (size_t e = 0; e < c1.transport.size(); ++e)
    out.v.push_back(group_log(c2.transport[e] * c1.transport[e].adjoint()));
  return out;
}

Cochain0 center_direction(const Surface& s, int n) {
  const double scale = 1.0 / std::sqrt(n * s.m0.sum());
  return Cochain0(std::vector<Mat>(s.nv(), cplx(0, scale) * Mat::Identity(n, n)));
}

Cochain0 project_out_center(const Surface& s, const Cochain0& x) {
  const int n = static_cast<int>(x[0].rows());
  Cochain0 c = center_direction(s, n);
  const double p = inner0(s, c, x);
  Cochain0 out = x;
  for (int v = 0; v < x.size(); ++v) out[v] -= p * c[v];
  return out;
}

Connection random_connection(Rng& rng, SurfacePtr s, int n, double scale) {
  Connection c = Connection::trivial(s, n);
  for (auto& u : c.transport) u = group_exp(random_skew(rng, n, scale));
  return c;
}

Cochain0 random_cochain0(Rng& rng, const Surface& s, int n, double scale) {
  Cochain0 x;
  for (int v = 0; v < s.nv(); ++v) x.v.push_back(random_skew(rng, n, scale));
  return x;
}

Cochain1 random_cochain1(Rng& rng, const Surface& s, int n, double scale) {
  Cochain1 x;
  for (int e = 0; e < s.ne(); ++e) x.v.push_back(random_skew(rng, n, scale));
  return x;
}

TangentPair random_tangent(Rng& rng, const Surface& s, int n, double scale) {
  TangentPair tp;
  tp.a = random_cochain1(rng, s, n, scale);
  tp.psi = random_cochain1(rng, s, n, scale);
  return tp;
}

GaugeTransformation random_gauge(Rng& rng, const Surface& s, int n) {
  GaugeTransformation g;
  for (int v = 0; v < s.nv(); ++v) g.u.push_back(random_unitary(rng, n));
  return g;
}

GaugeTransformation exp_gauge(const Cochain0& xi) {
  GaugeTransformation g;
  for (const auto& x : xi.v) g.u.push_back(group_exp(x));
  return g;
}

RVec tp_to_real(const TangentPair& tp) {
  RVec a = to_real(tp.a), p = to_real(tp.psi);
  RVec out(a.size() + p.size());
  out << a, p;
  return out;
}

TangentPair tp_from_real(const RVec& c, int edges, int n) {
  const int half = edges * n * n;
  return {from_real<1>(c.head(half), edges, n), from_real<1>(c.tail(half), edges, n)};
}

}  // namespace hsmod
