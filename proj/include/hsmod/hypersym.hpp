#pragma once

#include <iosfwd>
#include <utility>

#include "hsmod/gaugefield.hpp"

namespace hsmod {

struct StructureSelector {
  enum class Kind { I, S, T, STheta, TTheta, IZeta };
  Kind kind = Kind::I;
  double theta = 0.0;
  cplx zeta = 0.0;

  static StructureSelector I() { return {Kind::I, 0.0, 0.0}; }
  static StructureSelector S() { return {Kind::S, 0.0, 0.0}; }
  static StructureSelector T() { return {Kind::T, 0.0, 0.0}; }
  static StructureSelector s_theta(double th) { return {Kind::STheta, th, 0.0}; }
  static StructureSelector t_theta(double th) { return {Kind::TTheta, th, 0.0}; }
  // Rejects |zeta| within 1e-9 of the unit circle.
  static StructureSelector i_zeta(cplx z);
};

double metric_g(const Surface& s, const TangentPair& x, const TangentPair& y);
TangentPair apply_structure(const Surface& s, const StructureSelector& sel, const TangentPair& tp);
double omega(const Surface& s, const StructureSelector& sel, const TangentPair& x, const TangentPair& y);
cplx omega_c(const Surface& s, const TangentPair& x, const TangentPair& y);

// Dense matrices in tp_to_real coordinates (a block, then psi block).
RMat structure_matrix(const Surface& s, int n, const StructureSelector& sel);
RMat metric_matrix(const Surface& s, int n);

// cos(theta) x + sin(theta) J x.
Cochain1 rotate_J(const Surface& s, const Cochain1& x, double theta);

std::pair<Connection, Connection> p_theta(const FieldState& st, double theta);
FieldState p_theta_inverse(const Connection& plus, const Connection& minus, double theta);

// Phi -> e^{i alpha} Phi.
FieldState circle_act(const FieldState& st, double alpha);
RMat circle_matrix(const Surface& s, int n, double alpha);

// Discrete (0,1) operator: the link field together with a (0,1)-cochain
// offset B, representing dbar^nabla + B.
struct DbarOperator {
  Connection conn;
  Cochain1 offset;
};

// lambda * partial^nabla + higgs, with partial the (1,0)-part of d^nabla.
struct LambdaConnection {
  cplx lambda = 0.0;
  Connection base;
  Cochain1 higgs;  // complex (1,0)-cochain
};

// Applies a lambda-connection to a section (one C^n vector per vertex);
// returns one vector per edge, located at the tail.
std::vector<CVec> apply_lambda(const LambdaConnection& lc, const std::vector<CVec>& sec);
// Derivative term of the Leibniz rule: D(f s) - f_tail D(s) for a scalar
// function f on vertices.
std::vector<CVec> leibniz_term(const LambdaConnection& lc, const std::vector<cplx>& f, const std::vector<CVec>& sec);

struct FZeta {
  DbarOperator dbar;
  LambdaConnection lc;
};

FZeta f_zeta(const FieldState& st, cplx zeta);
// Real-linear differential of F_zeta as a matrix from tp_to_real coordinates
// to complex_to_real coordinates of the two output cochains.
RMat df_zeta_matrix(const Surface& s, int n, cplx zeta);
// Multiplication by i on complex_to_real coordinates of length m.
RMat complex_unit_matrix(int m);

LambdaConnection lambda_rescale(const LambdaConnection& lc, cplx zeta);

// Nonzero entries "row col value" with 17 significant digits.
void write_triplets(std::ostream& os, const RMat& m, double drop = 0.0);

}  // namespace hsmod
