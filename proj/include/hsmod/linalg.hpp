#pragma once

#include <functional>

#include "hsmod/common.hpp"

namespace hsmod {

inline constexpr double kKernelRelTol = 1e-8;
inline constexpr double kMinGapRatio = 1e3;

struct SpectrumReport {
  std::vector<double> values;  // ascending, nonnegative
  int kernel_count = 0;
  double gap_ratio = 0.0;  // first kept / last dropped
  bool gap_ok() const { return gap_ratio >= kMinGapRatio; }
};

// Applies the threshold rule (values below kKernelRelTol * max count as kernel).
// Values are taken by magnitude and sorted ascending.
SpectrumReport classify_spectrum(std::vector<double> values);

// Singular values of a dense matrix, padded with zeros up to the column count
// so that the kernel of a wide matrix is counted.
SpectrumReport singular_spectrum(const RMat& m);

// Dense matrix of a linear map R^in -> R^out given as a callback.
RMat assemble(const std::function<RVec(const RVec&)>& f, int in_dim);

// Orthonormal basis (columns) of the orthogonal complement of span(c) in R^d.
RMat complement_basis(const RVec& c);

}  // namespace hsmod
