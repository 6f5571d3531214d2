#include "hsmod/solver.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>
#include <cmath>

#include "hsmod/degeneracy.hpp"
#include "hsmod/hypersym.hpp"

namespace hsmod {

namespace {

constexpr double kTikhonov = 1e-14;
constexpr double kFdStep = 1e-6;

// Tikhonov-regularized least-squares step, computed through the SVD:
// (J^T J + 1e-14) dx = -J^T r.
RVec regularized_step(const RMat& j, const RVec& r, int* kernel = nullptr) {
  Eigen::BDCSVD<RMat> svd(j, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVec sv = svd.singularValues();
  RVec filt(sv.size());
  for (Eigen::Index k = 0; k < sv.size(); ++k) filt[k] = sv[k] / (sv[k] * sv[k] + kTikhonov);
  if (kernel) {
    std::vector<double> vals(sv.data(), sv.data() + sv.size());
    while (static_cast<Eigen::Index>(vals.size()) < j.cols()) vals.push_back(0.0);
    *kernel = classify_spectrum(vals).kernel_count;
  }
  return -(svd.matrixV() * filt.asDiagonal() * (svd.matrixU().transpose() * r));
}

RVec center_gauge_coords(const Surface& s, int n) {
  RVec c = RVec::Zero(s.nv() * n * n);
  for (int v = 0; v < s.nv(); ++v)
    for (int k = 0; k < n; ++k) c[v * n * n + k] = 1.0;
  return c.normalized();
}

GaugeTransformation right_multiply(const GaugeTransformation& u, const RVec& eta, int n) {
  GaugeTransformation out = u;
  for (size_t v = 0; v < u.u.size(); ++v) out.u[v] = u.u[v] * group_exp(lie_from_coords(eta.data() + v * n * n, n));
  return out;
}

Mat dual_block(const Mat& x, const Mat& dx) {
  const Eigen::Index n = x.rows();
  Mat b = Mat::Zero(2 * n, 2 * n);
  b.topLeftCorner(n, n) = x;
  b.bottomRightCorner(n, n) = x;
  b.topRightCorner(n, n) = dx;
  return b;
}

void record(Trace* trace, const char* name, int it, double res, double step) {
  if (trace) trace->push_back({name, it, res, step});
}

Mat random_su2(Rng& rng) {
  Mat q = random_unitary(rng, 2);
  const cplx d = q.determinant();
  return q / std::sqrt(d);
}

Mat commutator(const Mat& a, const Mat& b) { return a * b * a.adjoint() * b.adjoint(); }

const std::vector<Mat>& pauli_basis() {
  static const std::vector<Mat> b = [] {
    std::vector<Mat> out(3, Mat::Zero(2, 2));
    out[0] << cplx(0, 1), 0, 0, cplx(0, -1);
    out[1] << 0, 1, -1, 0;
    out[2] << 0, cplx(0, 1), cplx(0, 1), 0;
    return out;
  }();
  return b;
}

RVec su2_coords(const Mat& x) {
  RVec c(3);
  for (int k = 0; k < 3; ++k) c[k] = 0.5 * trace_inner(pauli_basis()[k], x);
  return c;
}

Mat su2_from(const double* c) {
  Mat x = Mat::Zero(2, 2);
  for (int k = 0; k < 3; ++k) x += c[k] * pauli_basis()[k];
  return x;
}

}  // namespace

void NewtonConfig::validate() const {
  if (!(tol > 0)) throw Error(ErrorKind::Config, "tolerances.tol must be > 0");
  if (max_iter < 1) throw Error(ErrorKind::Config, "tolerances.max_iter must be >= 1");
  if (!(step_damping > 0 && step_damping <= 1)) throw Error(ErrorKind::Config, "tolerances.step_damping must be in (0,1]");
}

RVec coulomb_residual(const FieldState& ref, const FieldState& target, const GaugeTransformation& u,
                      CoulombMode mode) {
  if (mode == CoulombMode::Reference) {
    const FieldState t = gauge_act(u, target);
    TangentPair diff{chart_difference(t.conn, ref.conn), t.phi - ref.phi};
    return to_real(d1_l2_adjoint(ref, diff));
  }
  const Connection plus = gauge_act(u, target.conn);
  const FieldState mid = p_theta_inverse(plus, ref.conn, 0.0);
  return to_real(covariant_d0_adjoint(mid.conn, mid.phi));
}

CoulombResult coulomb_fix(const FieldState& ref, const FieldState& target, const NewtonConfig& cfg, CoulombMode mode,
                          const std::optional<GaugeTransformation>& start, Trace* trace) {
  cfg.validate();
  const Surface& s = ref.conn.surf();
  const int n = ref.conn.rank;
  if (target.conn.surface != ref.conn.surface || target.conn.rank != n)
    throw Error(ErrorKind::InvalidArgument, "coulomb_fix: states live on different bundles");
  const int dim = s.nv() * n * n;
  const RVec center = center_gauge_coords(s, n);
  CoulombResult res;
  res.u = start ? *start : GaugeTransformation::identity(s, n);
  const char* name = mode == CoulombMode::Reference ? "coulomb_fix" : "coulomb_midpoint";
  double step = 0.0;
  for (int it = 0; it <= cfg.max_iter; ++it) {
    const RVec r = coulomb_residual(ref, target, res.u, mode);
    res.residual = r.norm();
    res.iterations = it;
    record(trace, name, it, res.residual, step);
    if (res.residual < cfg.tol) return res;
    if (it == cfg.max_iter) break;
    RMat jac(r.size(), dim);
    for (int k = 0; k < dim; ++k) {
      RVec e = RVec::Zero(dim);
      e[k] = kFdStep;
      const RVec rp = coulomb_residual(ref, target, right_multiply(res.u, e, n), mode);
      const RVec rm = coulomb_residual(ref, target, right_multiply(res.u, -e, n), mode);
      jac.col(k) = (rp - rm) / (2 * kFdStep);
    }
    int kernel = 0;
    RVec delta = regularized_step(jac, r, &kernel);
    // In midpoint mode extra kernel only reflects the stabilizer of the
    // moving endpoint; the minimum-norm step handles it.
    if (it == 0 && kernel > 1 && mode == CoulombMode::Reference)
      throw Error(ErrorKind::ReducibleReference,
                  "coulomb_fix: Newton system is singular beyond the center (reducible reference)", res.residual);
    if (cfg.center_projection) delta -= center.dot(delta) * center;
    delta *= cfg.step_damping;
    step = delta.norm();
    res.u = right_multiply(res.u, delta, n);
  }
  throw Error(ErrorKind::NonConvergence, "coulomb_fix: max_iter exceeded", res.residual);
}

FlatResult find_flat(const Connection& seed, const NewtonConfig& cfg, Trace* trace) {
  cfg.validate();
  const Surface& s = seed.surf();
  const int n = seed.rank;
  const int dim = s.ne() * n * n;
  FlatResult res;
  res.conn = seed;
  double step = 0.0;
  for (int it = 0; it <= cfg.max_iter; ++it) {
    const RVec r = to_real(curvature(res.conn));
    res.residual = r.norm();
    res.iterations = it;
    record(trace, "find_flat", it, res.residual, step);
    if (res.residual < cfg.tol) return res;
    if (it == cfg.max_iter) break;
    const FieldState st = FieldState::zero_higgs(res.conn);
    const RMat jac = assemble(
        [&](const RVec& x) {
          TangentPair tp = TangentPair::zeros(s, n);
          tp.a = from_real<1>(x, s.ne(), n);
          return to_real(moment_linearization(st, tp).mu_I);
        },
        dim);
    RVec delta = regularized_step(jac, r) * cfg.step_damping;
    step = delta.norm();
    res.conn = chart_shift(res.conn, from_real<1>(delta, s.ne(), n));
  }
  throw Error(ErrorKind::NonConvergence, "find_flat: max_iter exceeded", res.residual);
}

Connection genus2_flat_seed(std::uint64_t rng_seed, int rank) {
  if (rank != 2) throw Error(ErrorKind::InvalidArgument, "genus2_flat_seed: rank must be 2");
  static const SurfacePtr oct = build_octmin();
  Rng rng(rng_seed);
  for (int attempt = 0; attempt < 10; ++attempt) {
    const Mat a1 = random_su2(rng), b1 = random_su2(rng);
    Mat a2 = random_su2(rng), b2 = random_su2(rng);
    const Mat target = commutator(a1, b1).adjoint();
    auto resid = [&](const Mat& x, const Mat& y) { return su2_coords(group_log(commutator(x, y) * target.adjoint())); };
    bool ok = false;
    try {
      for (int it = 0; it < 100; ++it) {
        const RVec r = resid(a2, b2);
        if (r.norm() < 1e-14) {
          ok = true;
          break;
        }
        RMat jac(3, 6);
        for (int k = 0; k < 6; ++k) {
          double c[6] = {0, 0, 0, 0, 0, 0};
          c[k] = kFdStep;
          const Mat ap = mat_exp(su2_from(c)) * a2, bp = mat_exp(su2_from(c + 3)) * b2;
          c[k] = -kFdStep;
          const Mat am = mat_exp(su2_from(c)) * a2, bm = mat_exp(su2_from(c + 3)) * b2;
          jac.col(k) = (resid(ap, bp) - resid(am, bm)) / (2 * kFdStep);
        }
        RVec d = regularized_step(jac, r);
        const double dn = d.norm();
        if (dn > 0.5) d *= 0.5 / dn;
        a2 = mat_exp(su2_from(d.data())) * a2;
        b2 = mat_exp(su2_from(d.data() + 3)) * b2;
      }
    } catch (const Error&) {
      ok = false;
    }
    if (!ok) continue;
    Connection c = Connection::trivial(oct, 2);
    c.transport = {a1, b1, a2, b2};
    if (norm2c(*oct, curvature(c)) > 1e-12) continue;
    if (reducibility_check(c) != 1) continue;
    return c;
  }
  throw Error(ErrorKind::NonConvergence, "genus2_flat_seed: commutator solve failed after 10 draws");
}

double chart_distance(const Connection& a, const Connection& b) {
  double m = 0;
  const Cochain1 d = chart_difference(a, b);
  for (const auto& x : d.v) m = std::max(m, x.norm());
  return m;
}

HarmonicResult harmonic_from_endpoints(const Connection& plus, const Connection& minus, const NewtonConfig& cfg,
                                       Trace* trace) {
  cfg.validate();
  if (plus.surface != minus.surface || plus.rank != minus.rank)
    throw Error(ErrorKind::InvalidArgument, "harmonic_from_endpoints: endpoints live on different bundles");
  const Surface& s = plus.surf();
  const double fp = norm2c(s, curvature(plus)), fm = norm2c(s, curvature(minus));
  if (fp >= cfg.tol || fm >= cfg.tol)
    throw Error(ErrorKind::InvalidArgument, "harmonic_from_endpoints: endpoints are not flat", std::max(fp, fm));
  const double dist = chart_distance(plus, minus);
  if (dist >= kBasinBound)
    throw Error(ErrorKind::Basin, "harmonic_from_endpoints: endpoints farther apart than the basin bound", dist);
  const CoulombResult cr =
      coulomb_fix(FieldState::zero_higgs(minus), FieldState::zero_higgs(plus), cfg, CoulombMode::Midpoint, std::nullopt,
                  trace);
  HarmonicResult out;
  out.u = cr.u;
  out.iterations = cr.iterations;
  out.state = p_theta_inverse(gauge_act(cr.u, plus), minus, 0.0);
  out.residuals = residual(out.state);
  if (out.residuals.real_max() >= 10 * cfg.tol)
    throw Error(ErrorKind::NonConvergence, "harmonic_from_endpoints: real-form residual above 10*tol",
                out.residuals.real_max());
  return out;
}

RMat deformation_operator(const FieldState& st) {
  const Surface& s = st.conn.surf();
  const int n = st.conn.rank;
  const cplx inv_norm = 1.0 / kMuCNormalization;
  return assemble(
      [&](const RVec& x) {
        const TangentPair tp = tp_from_real(x, s.ne(), n);
        const MomentValue ml = moment_linearization(st, tp);
        const RVec r0 = to_real(d1_l2_adjoint(st, tp));
        const RVec r1 = to_real(ml.mu_I);
        const RVec r2 = complex_to_real(inv_norm * ml.mu_C);
        RVec out(r0.size() + r1.size() + r2.size());
        out << r0, r1, r2;
        return out;
      },
      2 * s.ne() * n * n);
}

SpectrumReport deformation_dimension(const FieldState& st) { return singular_spectrum(deformation_operator(st)); }

RMat real_deformation_operator(const FieldState& st) {
  const Surface& s = st.conn.surf();
  const int n = st.conn.rank;
  return assemble(
      [&](const RVec& x) {
        const TangentPair tp = tp_from_real(x, s.ne(), n);
        std::vector<RVec> parts{to_real(d1_l2_adjoint(st, tp))};
        for (double sign : {1.0, -1.0}) {
          std::vector<Mat> ub, ubinv;
          for (int e = 0; e < s.ne(); ++e) {
            const Mat u = dual_block(st.conn.transport[e], tp.a[e] * st.conn.transport[e]);
            const Mat link = mat_exp(dual_block(sign * st.phi[e], sign * tp.psi[e])) * u;
            ub.push_back(link);
            ubinv.push_back(link.inverse());
          }
          Cochain2 df;
          for (int f = 0; f < s.nf(); ++f) {
            const Mat hb = face_holonomy_raw(s, ub, ubinv, f);
            df.v.push_back(log_frechet(hb.topLeftCorner(n, n), hb.topRightCorner(n, n)));
          }
          parts.push_back(to_real(df));
        }
        // derivative of (d^nabla)^* phi
        Cochain0 dc = Cochain0::zeros(s.nv(), n);
        for (int e = 0; e < s.ne(); ++e) {
          const Mat& u = st.conn.transport[e];
          const Mat du = tp.a[e] * u;
          const Mat ui = u.adjoint();
          const Mat dui = -ui * tp.a[e];
          dc[s.head(e)] += s.m1[e] * (dui * st.phi[e] * u + ui * tp.psi[e] * u + ui * st.phi[e] * du);
          dc[s.tail(e)] -= s.m1[e] * tp.psi[e];
        }
        for (int v = 0; v < s.nv(); ++v) dc[v] /= s.m0[v];
        parts.push_back(to_real(dc));
        Eigen::Index total = 0;
        for (const auto& p : parts) total += p.size();
        RVec out(total);
        Eigen::Index off = 0;
        for (const auto& p : parts) {
          out.segment(off, p.size()) = p;
          off += p.size();
        }
        return out;
      },
      2 * s.ne() * n * n);
}

Cohomology deformation_cohomology(const FieldState& st) {
  const Surface& s = st.conn.surf();
  const int n = st.conn.rank;
  Cohomology h;
  const RMat d1 = assemble(
      [&](const RVec& x) { return tp_to_real(d1_action(st, from_real<0>(x, s.nv(), n))); }, s.nv() * n * n);
  h.h0 = singular_spectrum(d1).kernel_count;
  const RMat t = deformation_operator(st);
  const Eigen::Index r0 = s.nv() * n * n;
  const RMat dg = t.bottomRows(t.rows() - r0);
  h.h1 = singular_spectrum(t).kernel_count;
  h.h2 = singular_spectrum(RMat(dg.transpose())).kernel_count;
  return h;
}

namespace {

// Induced connection on Hom(E2 -> E1)-valued 0-cochains: X_t -> U2 X_h U1^-1.
RMat induced_laplacian(const FieldState& s1, const FieldState& s2) {
  const Surface& s = s1.conn.surf();
  const int n = s1.conn.rank;
  const int per = 2 * n * n;
  auto unpack = [&](const RVec& x) {
    std::vector<Mat> out;
    for (int v = 0; v < s.nv(); ++v) {
      Mat m(n, n);
      for (int k = 0; k < n * n; ++k) m(k / n, k % n) = cplx(x[v * per + 2 * k], x[v * per + 2 * k + 1]);
      out.push_back(m);
    }
    return out;
  };
  auto pack = [&](const std::vector<Mat>& xs) {
    RVec out(s.nv() * per);
    for (int v = 0; v < s.nv(); ++v)
      for (int k = 0; k < n * n; ++k) {
        out[v * per + 2 * k] = xs[v](k / n, k % n).real();
        out[v * per + 2 * k + 1] = xs[v](k / n, k % n).imag();
      }
    return out;
  };
  RVec w(s.nv() * per);
  for (int v = 0; v < s.nv(); ++v) w.segment(v * per, per).setConstant(std::sqrt(s.m0[v]));
  return assemble(
      [&](const RVec& y) {
        const std::vector<Mat> x = unpack(y.cwiseQuotient(w));
        std::vector<Mat> out(s.nv(), Mat::Zero(n, n));
        for (int e = 0; e < s.ne(); ++e) {
          const Mat& u1 = s1.conn.transport[e];
          const Mat& u2 = s2.conn.transport[e];
          const Mat d = u2 * x[s.head(e)] * u1.adjoint() - x[s.tail(e)];
          out[s.head(e)] += s.m1[e] * (u2.adjoint() * d * u1);
          out[s.tail(e)] -= s.m1[e] * d;
        }
        for (int v = 0; v < s.nv(); ++v) out[v] /= s.m0[v];
        return RVec(pack(out).cwiseProduct(w));
      },
      s.nv() * per);
}

Mat higgs_operator(const Mat& phi1, const Mat& phi2) {
  const Eigen::Index n = phi1.rows();
  const Mat id = Mat::Identity(n, n);
  return Eigen::kroneckerProduct(id, phi2).eval() - Eigen::kroneckerProduct(Mat(phi1.transpose()), id).eval();
}

}  // namespace

double state_distance(const FieldState& a, const FieldState& b) {
  double m = 0;
  for (size_t e = 0; e < a.conn.transport.size(); ++e) {
    m = std::max(m, (a.conn.transport[e] - b.conn.transport[e]).norm());
    m = std::max(m, (a.phi[e] - b.phi[e]).norm());
  }
  return m;
}

UnitaryEquivVerdict unitary_equiv_check(const FieldState& s1, const FieldState& s2, const std::vector<Mat>& uc) {
  const Surface& s = s1.conn.surf();
  const int n = s1.conn.rank;
  if (static_cast<int>(uc.size()) != s.nv()) throw Error(ErrorKind::InvalidArgument, "unitary_equiv_check: bad gauge data");
  UnitaryEquivVerdict v;
  // Intertwining of the dbar-operators and Higgs fields by uc.
  {
    double num = 0, den = 0;
    std::vector<Mat> du(s.ne());
    for (int e = 0; e < s.ne(); ++e)
      du[e] = s2.conn.transport[e] * uc[s.head(e)] * s1.conn.transport[e].adjoint() - uc[s.tail(e)];
    const Cochain1 h1 = phi_to_higgs(s, s1.phi), h2 = phi_to_higgs(s, s2.phi);
    for (int e = 0; e < s.ne(); ++e) {
      Mat jdu = Mat::Zero(n, n);
      for (int k = 0; k < s.ne(); ++k)
        if (s.J(e, k) != 0.0) jdu += s.J(e, k) * du[k];
      const Mat d01 = 0.5 * (du[e] + cplx(0, 1) * jdu);
      num += d01.squaredNorm() + (h2[e] * uc[s.tail(e)] - uc[s.tail(e)] * h1[e]).squaredNorm();
    }
    for (const auto& m : uc) den += m.squaredNorm();
    v.intertwining_residual = std::sqrt(num / std::max(den, 1e-300));
  }
  const RMat lap = induced_laplacian(s1, s2);
  Eigen::SelfAdjointEigenSolver<RMat> es(0.5 * (lap + lap.transpose()), Eigen::EigenvaluesOnly);
  const RVec ev = es.eigenvalues();
  const double thr = kKernelRelTol * std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
  v.lambda1 = 0;
  for (Eigen::Index k = 0; k < ev.size(); ++k)
    if (ev[k] > thr) {
      v.lambda1 = ev[k];
      break;
    }
  // ||Phi ^ Phi*||^2 on End via the discrete wedge of the induced operators.
  Cochain1 ops;
  for (int e = 0; e < s.ne(); ++e) ops.v.push_back(higgs_operator(s1.phi[e], s2.phi[e]));
  const Cochain2 w = wedge_term(s, ops);
  v.wedge_norm2 = 0;
  for (int f = 0; f < s.nf(); ++f) v.wedge_norm2 += s.m2[f] * w[f].squaredNorm();
  v.margin = v.lambda1 - v.wedge_norm2;
  v.bound_holds = v.margin > 0;
  if (!v.bound_holds) return v;
  for (int i = 0; i < s.nv(); ++i) {
    Eigen::JacobiSVD<Mat> svd(uc[i], Eigen::ComputeFullU | Eigen::ComputeFullV);
    if (svd.singularValues().minCoeff() < 1e-12 * std::max(1.0, svd.singularValues().maxCoeff()))
      throw Error(ErrorKind::DegenerateInput, "unitary_equiv_check: gauge data is singular (degenerate u)", -1, i);
    v.unitary.u.push_back(svd.matrixU() * svd.matrixV().adjoint());
  }
  for (const auto& m : v.unitary.u) v.unitary_residual = std::max(v.unitary_residual, (m.adjoint() * m - Mat::Identity(n, n)).norm());
  v.gauge_residual = state_distance(gauge_act(v.unitary, s2), s1);
  v.equivalent = v.unitary_residual < 1e-9 && v.gauge_residual < 1e-9;
  return v;
}

}  // namespace hsmod
