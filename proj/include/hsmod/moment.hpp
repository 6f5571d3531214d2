#pragma once

#include "hsmod/gaugefield.hpp"

namespace hsmod {

// Normalization of mu_C relative to the complexified covariant_d1 of Phi.
inline const cplx kMuCNormalization{0.0, -2.0};

struct MomentValue {
  Cochain2 mu_I;  // skew-hermitian per face
  Cochain2 mu_C;  // mu_S + i mu_T per face
};

// Discrete -[Phi ^ Phi*] per face: 1/2 sum J_{e'e} [phi_e, phi_e'] over edges
// whose tail is the face base. Works for any square matrix values.
Cochain2 wedge_term(const Surface& s, const Cochain1& phi);

MomentValue moment(const FieldState& st);
// Exact directional derivative of moment() along tp (link chart exp(t a) U).
MomentValue moment_linearization(const FieldState& st, const TangentPair& tp);

// sum_f tr(mu_f xi_{base(f)}).
cplx moment_pairing(const Surface& s, const Cochain2& mu, const Cochain0& xi);

struct MomentCheck {
  double res_I = 0, res_S = 0, res_T = 0;
  double max() const { return std::max({res_I, res_S, res_T}); }
};

// Forward finite difference of the moment maps along tp with step h, paired
// with xi, against omega_X(d1_action(xi), tp).
MomentCheck moment_derivative_check(const FieldState& st, const TangentPair& tp, const Cochain0& xi, double h);

struct ResidualReport {
  double mu_I_norm = 0, mu_C_norm = 0;
  double F_plus_norm = 0, F_minus_norm = 0, coclosed_norm = 0;
  double complex_max() const { return std::max(mu_I_norm, mu_C_norm); }
  double real_max() const { return std::max({F_plus_norm, F_minus_norm, coclosed_norm}); }
};

ResidualReport residual(const FieldState& st);

// Norm of a complex 2-cochain with face masses.
double norm2c(const Surface& s, const Cochain2& x);

}  // namespace hsmod
