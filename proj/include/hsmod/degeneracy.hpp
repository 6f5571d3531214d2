#pragma once

#include <optional>

#include "hsmod/gaugefield.hpp"
#include "hsmod/linalg.hpp"

namespace hsmod {

// Dense operator on center-orthogonal 0-cochains, expressed in an
// orthonormal basis of that complement (after M0^{1/2} symmetrization).
struct DegeneracyOperator {
  RMat laplacian;  // (d^nabla)^* d^nabla part, positive semidefinite
  RMat phi_term;   // -(ad phi)^* (ad phi) part, negative semidefinite
  RMat basis;      // columns: complement basis in M0^{1/2}-scaled coordinates
  RMat total() const { return laplacian + phi_term; }
};

DegeneracyOperator degeneracy_operator(const FieldState& st);

struct DegeneracyReport {
  SpectrumReport spectrum;  // lowest values of |L|
  double lambda_min = 0;    // eigenvalue of smallest magnitude (signed)
  bool is_degenerate = false;
  std::optional<Cochain0> witness;
};

DegeneracyReport degeneracy_spectrum(const FieldState& st, int count = 10);

// Kernel dimension of covariant_d0 on 0-cochains.
int reducibility_check(const Connection& c);

struct Certificate {
  double phi_norm = 0;
  double threshold = 0;
  double kappa = 0;
  double lambda_min = 0;
  bool certified = false;
};
Certificate small_phi_certificate(const FieldState& st);

double jacobi_witness_check(const FieldState& st, const Cochain0& xi_plus, const Cochain0& xi_minus);

// Gram matrix of the split metric on d1_action images of an orthonormal
// basis of center-orthogonal 0-cochains.
RMat orbit_gram(const FieldState& st);
// Threshold rule applied to the Gram eigenvalues.
bool gram_singular(const RMat& gram);

// Edgewise 4-norm (sum m1 |phi_e|_F^4)^{1/4}.
double phi_four_norm(const Surface& s, const Cochain1& phi);

}  // namespace hsmod
