#pragma once

#include "hsmod/matalg.hpp"
#include "hsmod/surface.hpp"

namespace hsmod {

// Matrix-valued k-cochain; one n x n matrix per k-cell.
template <int K>
struct Cochain {
  std::vector<Mat> v;

  Cochain() = default;
  explicit Cochain(std::vector<Mat> values) : v(std::move(values)) {}
  static Cochain zeros(int cells, int n) { return Cochain(std::vector<Mat>(cells, Mat::Zero(n, n))); }

  int size() const { return static_cast<int>(v.size()); }
  Mat& operator[](int i) { return v[i]; }
  const Mat& operator[](int i) const { return v[i]; }

  Cochain& operator+=(const Cochain& o) {
    for (size_t i = 0; i < v.size(); ++i) v[i] += o.v[i];
    return *this;
  }
  Cochain& operator-=(const Cochain& o) {
    for (size_t i = 0; i < v.size(); ++i) v[i] -= o.v[i];
    return *this;
  }
  Cochain& operator*=(cplx s) {
    for (auto& m : v) m *= s;
    return *this;
  }
  friend Cochain operator+(Cochain a, const Cochain& b) { return a += b; }
  friend Cochain operator-(Cochain a, const Cochain& b) { return a -= b; }
  friend Cochain operator*(cplx s, Cochain a) { return a *= s; }
};

using Cochain0 = Cochain<0>;
using Cochain1 = Cochain<1>;
using Cochain2 = Cochain<2>;

struct Connection {
  SurfacePtr surface;
  int rank = 1;
  std::vector<Mat> transport;  // per edge; maps the head fiber to the tail fiber

  static Connection trivial(SurfacePtr s, int n);
  const Surface& surf() const { return *surface; }
};

struct FieldState {
  Connection conn;
  Cochain1 phi;
  static FieldState zero_higgs(const Connection& c);
};

struct TangentPair {
  Cochain1 a;
  Cochain1 psi;
  static TangentPair zeros(const Surface& s, int n);
};

struct GaugeTransformation {
  std::vector<Mat> u;  // per vertex
  static GaugeTransformation identity(const Surface& s, int n);
};

// Weighted norms/inner products; weights taken from the surface masses.
double inner0(const Surface& s, const Cochain0& x, const Cochain0& y);
double inner1(const Surface& s, const Cochain1& x, const Cochain1& y);
double inner2(const Surface& s, const Cochain2& x, const Cochain2& y);
double norm0(const Surface& s, const Cochain0& x);
double norm1(const Surface& s, const Cochain1& x);
double norm2(const Surface& s, const Cochain2& x);
double inner_tp(const Surface& s, const TangentPair& x, const TangentPair& y);

// J1 acting on the form index.
Cochain1 apply_J(const Surface& s, const Cochain1& x);

Cochain1 covariant_d0(const Connection& c, const Cochain0& xi);
// Works for complex-valued (End) cochains as well.
Cochain2 covariant_d1(const Connection& c, const Cochain1& a);
// Same with explicit transports and inverses (used with block "dual" matrices).
Cochain2 covariant_d1_raw(const Surface& s, const std::vector<Mat>& u, const std::vector<Mat>& uinv,
                          const Cochain1& a);
Mat face_holonomy(const Connection& c, int f);
Mat face_holonomy_raw(const Surface& s, const std::vector<Mat>& u, const std::vector<Mat>& uinv, int f);
Cochain2 curvature(const Connection& c);

Connection gauge_act(const GaugeTransformation& g, const Connection& c);
FieldState gauge_act(const GaugeTransformation& g, const FieldState& s);
GaugeTransformation compose(const GaugeTransformation& u, const GaugeTransformation& v);  // pointwise u*v
GaugeTransformation inverse(const GaugeTransformation& u);
Cochain0 conj_vertices(const GaugeTransformation& g, const Cochain0& x);  // u_v^-1 x_v u_v
Cochain1 conj_edges(const GaugeTransformation& g, const Surface& s, const Cochain1& x);  // at tails
Cochain2 conj_faces(const GaugeTransformation& g, const Surface& s, const Cochain2& x);  // at bases

TangentPair d1_action(const FieldState& s, const Cochain0& xi);
Cochain0 d1_l2_adjoint(const FieldState& s, const TangentPair& tp);
Cochain0 d1_split_adjoint(const FieldState& s, const TangentPair& tp);
// Adjoint of covariant_d0 alone, i.e. (d^nabla)^* on 1-cochains.
Cochain0 covariant_d0_adjoint(const Connection& c, const Cochain1& a);

Cochain1 phi_to_higgs(const Surface& s, const Cochain1& phi);
Cochain1 higgs_to_phi(const Surface& s, const Cochain1& higgs);
// Entrywise conjugate transpose per cell (the form-index conjugation is
// implicit: it maps (1,0)-cochains to (0,1)-cochains).
Cochain1 star_conj(const Cochain1& x);

// Affine chart: links exp(t a_e) U_e.
Connection chart_shift(const Connection& c, const Cochain1& a, double t = 1.0);
// log(U'_e U_e^-1), the chart difference of c2 relative to c1.
Cochain1 chart_difference(const Connection& c2, const Connection& c1);

// Centre handling on 0-cochains.
Cochain0 center_direction(const Surface& s, int n);  // unit-norm i*Id everywhere
Cochain0 project_out_center(const Surface& s, const Cochain0& x);

// Random objects.
Connection random_connection(Rng& rng, SurfacePtr s, int n, double scale);
Cochain0 random_cochain0(Rng& rng, const Surface& s, int n, double scale = 1.0);
Cochain1 random_cochain1(Rng& rng, const Surface& s, int n, double scale = 1.0);
TangentPair random_tangent(Rng& rng, const Surface& s, int n, double scale = 1.0);
GaugeTransformation random_gauge(Rng& rng, const Surface& s, int n);
GaugeTransformation exp_gauge(const Cochain0& xi);

// Flattening of skew cochains into real coordinates (lie_basis ordering).
template <int K>
RVec to_real(const Cochain<K>& x) {
  if (x.v.empty()) return RVec();
  const int n = static_cast<int>(x.v[0].rows());
  RVec out(x.size() * n * n);
  for (int i = 0; i < x.size(); ++i) out.segment(i * n * n, n * n) = lie_coords(x.v[i]);
  return out;
}
template <int K>
Cochain<K> from_real(const RVec& c, int cells, int n) {
  Cochain<K> x;
  x.v.reserve(cells);
  for (int i = 0; i < cells; ++i) x.v.push_back(lie_from_coords(c.data() + i * n * n, n));
  return x;
}
RVec tp_to_real(const TangentPair& tp);
TangentPair tp_from_real(const RVec& c, int edges, int n);

// Complex cochains as real vectors of (re, im) entries, row-major per cell.
template <int K>
RVec complex_to_real(const Cochain<K>& x) {
  if (x.v.empty()) return RVec();
  const int n = static_cast<int>(x.v[0].rows());
  RVec out(2 * x.size() * n * n);
  int k = 0;
  for (const auto& m : x.v)
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        out[k++] = m(r, c).real();
        out[k++] = m(r, c).imag();
      }
  return out;
}

}  // namespace hsmod
