#include "hsmod/matalg.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <map>
#include <mutex>
#include <unsupported/Eigen/MatrixFunctions>

namespace hsmod {

const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::InvalidMesh: return "invalid-mesh";
    case ErrorKind::Topology: return "topology";
    case ErrorKind::NoComplexStructure: return "no-complex-structure";
    case ErrorKind::BranchCut: return "branch-cut";
    case ErrorKind::NonConvergence: return "non-convergence";
    case ErrorKind::ReducibleReference: return "reducible-reference";
    case ErrorKind::Basin: return "basin";
    case ErrorKind::Hypothesis: return "hypothesis";
    case ErrorKind::DegenerateInput: return "degenerate-input";
    case ErrorKind::Config: return "config";
    case ErrorKind::Invariant: return "invariant";
  }
  return "unknown";
}

Mat project_skew(const Mat& m) { return (m - m.adjoint()) * 0.5; }

Mat bracket(const Mat& x, const Mat& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols() || x.rows() != x.cols())
    throw Error(ErrorKind::InvalidArgument, "bracket: dimension mismatch");
  return x * y - y * x;
}

Mat mat_exp(const Mat& x) { return x.exp(); }

Mat group_exp(const Mat& x) { return x.exp(); }

Mat group_log(const Mat& u) {
  const Eigen::Index n = u.rows();
  Eigen::ComplexSchur<Mat> schur(u);
  const Mat& t = schur.matrixT();
  const Mat& z = schur.matrixU();
  Mat d = Mat::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const cplx lam = t(k, k);
    const double ang = std::arg(lam);
    if (M_PI - std::abs(ang) < 1e-8)
      throw Error(ErrorKind::BranchCut, "group_log: eigenvalue at the branch cut -1");
    d(k, k) = cplx(std::log(std::abs(lam)), ang);
  }
  // Schur form of a normal matrix is diagonal; the off-diagonal part is roundoff.
  return project_skew(z * d * z.adjoint());
}

Mat mat_log(const Mat& x) { return x.log(); }

Mat log_frechet(const Mat& x, const Mat& e) {
  const Eigen::Index n = x.rows();
  Mat big = Mat::Zero(2 * n, 2 * n);
  big.topLeftCorner(n, n) = x;
  big.bottomRightCorner(n, n) = x;
  big.topRightCorner(n, n) = e;
  Mat l = big.log();
  return l.topRightCorner(n, n);
}

double trace_inner(const Mat& x, const Mat& y) { return (x.adjoint() * y).trace().real(); }

bool is_skew(const Mat& x, double tol) {
  const double scale = std::max(1.0, x.cwiseAbs().maxCoeff());
  return (x + x.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
}

bool is_unitary(const Mat& u, double tol) {
  return (u.adjoint() * u - Mat::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() <= tol;
}

const std::vector<Mat>& lie_basis(int n) {
  static std::mutex mu;
  static std::map<int, std::vector<Mat>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<Mat> b;
  const double r = 1.0 / std::sqrt(2.0);
  for (int k = 0; k < n; ++k) {
    Mat m = Mat::Zero(n, n);
    m(k, k) = cplx(0, 1);
    b.push_back(m);
  }
  for (int k = 0; k < n; ++k)
    for (int l = k + 1; l < n; ++l) {
      Mat m = Mat::Zero(n, n);
      m(k, l) = r;
      m(l, k) = -r;
      b.push_back(m);
      Mat q = Mat::Zero(n, n);
      q(k, l) = cplx(0, r);
      q(l, k) = cplx(0, r);
      b.push_back(q);
    }
  return cache.emplace(n, std::move(b)).first->second;
}

RVec lie_coords(const Mat& x) {
  const auto& b = lie_basis(static_cast<int>(x.rows()));
  RVec c(b.size());
  for (size_t k = 0; k < b.size(); ++k) c[k] = trace_inner(b[k], x);
  return c;
}

Mat lie_from_coords(const double* c, int n) {
  const auto& b = lie_basis(n);
  Mat x = Mat::Zero(n, n);
  for (size_t k = 0; k < b.size(); ++k) x += c[k] * b[k];
  return x;
}

Mat random_complex(Rng& rng, int n, int m, double scale) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Mat x(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) {
      const double re = nd(rng);
      const double im = nd(rng);
      x(i, j) = cplx(re, im) * scale;
    }
  return x;
}

Mat random_skew(Rng& rng, int n, double scale) {
  std::normal_distribution<double> nd(0.0, 1.0);
  RVec c(n * n);
  for (int k = 0; k < n * n; ++k) c[k] = nd(rng) * scale;
  return lie_from_coords(c.data(), n);
}

Mat random_unitary(Rng& rng, int n) {
  Mat g = random_complex(rng, n, n);
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ() * Mat::Identity(n, n);
  Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < n; ++k) {
    const cplx d = r(k, k);
    const double a = std::abs(d);
    if (a > 0) q.col(k) *= d / a;
  }
  return q;
}

}  // namespace hsmod
