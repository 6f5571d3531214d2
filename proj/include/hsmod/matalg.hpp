#pragma once

#include "hsmod/common.hpp"

namespace hsmod {

// (M - M^dagger)/2.
Mat project_skew(const Mat& m);
Mat bracket(const Mat& x, const Mat& y);

// Exponential of a skew-hermitian matrix (unitary result).
Mat group_exp(const Mat& x);
// Principal logarithm of a unitary matrix. Eigenvalues within 1e-8 of -1
// raise ErrorKind::BranchCut.
Mat group_log(const Mat& u);
// General matrix exponential/log (no structure assumed).
Mat mat_exp(const Mat& x);
Mat mat_log(const Mat& x);
// Fréchet derivative of the principal log at x in direction e.
Mat log_frechet(const Mat& x, const Mat& e);

// Re tr(X^dagger Y).
double trace_inner(const Mat& x, const Mat& y);

bool is_skew(const Mat& x, double tol = 1e-14);
bool is_unitary(const Mat& u, double tol = 1e-12);

// Orthonormal basis of u(n) for Re tr(X^dagger Y); n*n elements.
const std::vector<Mat>& lie_basis(int n);
// Coordinates of a skew-hermitian matrix in lie_basis(n), and back.
RVec lie_coords(const Mat& x);
Mat lie_from_coords(const double* c, int n);

// Random skew-hermitian matrix with i.i.d. normal coordinates times scale.
Mat random_skew(Rng& rng, int n, double scale = 1.0);
// Haar-ish random unitary (QR of a complex Ginibre matrix).
Mat random_unitary(Rng& rng, int n);
Mat random_complex(Rng& rng, int n, int m, double scale = 1.0);

}  // namespace hsmod
