#include "hsmod/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hsmod {

SpectrumReport classify_spectrum(std::vector<double> values) {
  for (auto& v : values) v = std::abs(v);
  std::sort(values.begin(), values.end());
  SpectrumReport r;
  r.values = values;
  if (values.empty()) return r;
  const double vmax = values.back();
  const double thr = kKernelRelTol * vmax;
  int k = 0;
  while (k < static_cast<int>(values.size()) && values[k] < thr) ++k;
  if (vmax == 0.0) k = static_cast<int>(values.size());
  r.kernel_count = k;
  const double floor = std::numeric_limits<double>::epsilon() * std::max(vmax, 1e-300);
  if (k == static_cast<int>(values.size())) {
    r.gap_ratio = 0.0;
  } else {
    const double dropped = k > 0 ? std::max(values[k - 1], floor) : floor;
    r.gap_ratio = values[k] / dropped;
  }
  return r;
}

SpectrumReport singular_spectrum(const RMat& m) {
  Eigen::BDCSVD<RMat> svd(m);
  const RVec sv = svd.singularValues();
  std::vector<double> vals(sv.data(), sv.data() + sv.size());
  while (static_cast<Eigen::Index>(vals.size()) < m.cols()) vals.push_back(0.0);
  return classify_spectrum(vals);
}

RMat assemble(const std::function<RVec(const RVec&)>& f, int in_dim) {
  RMat out;
  for (int k = 0; k < in_dim; ++k) {
    RVec e = RVec::Zero(in_dim);
    e[k] = 1.0;
    const RVec col = f(e);
    if (k == 0) out.resize(col.size(), in_dim);
    out.col(k) = col;
  }
  return out;
}

RMat complement_basis(const RVec& c) {
  const Eigen::Index d = c.size();
  RMat a(d, d);
  a.col(0) = c.normalized();
  a.rightCols(d - 1) = RMat::Identity(d, d).leftCols(d - 1);
  Eigen::HouseholderQR<RMat> qr(a);
  RMat q = qr.householderQ() * RMat::Identity(d, d);
  return q.rightCols(d - 1);
}

}  // namespace hsmod
