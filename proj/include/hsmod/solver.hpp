#pragma once

#include <optional>
#include <string>

#include "hsmod/gaugefield.hpp"
#include "hsmod/linalg.hpp"
#include "hsmod/moment.hpp"

namespace hsmod {

struct NewtonConfig {
  int max_iter = 200;
  double tol = 1e-10;
  double step_damping = 1.0;
  bool center_projection = true;
  void validate() const;
};

struct IterRecord {
  std::string solver;
  int iter;
  double residual;
  double step_norm;
};
using Trace = std::vector<IterRecord>;

enum class CoulombMode {
  // d1_l2_adjoint at ref of the log-chart difference (target - ref)
  Reference,
  // (d^nabla)^* phi for the midpoint state of (u.target, ref)
  Midpoint,
};

struct CoulombResult {
  GaugeTransformation u;
  double residual = 0;
  int iterations = 0;
};

CoulombResult coulomb_fix(const FieldState& ref, const FieldState& target, const NewtonConfig& cfg,
                          CoulombMode mode = CoulombMode::Reference,
                          const std::optional<GaugeTransformation>& start = std::nullopt, Trace* trace = nullptr);
// Residual vector whose vanishing defines the Coulomb condition.
RVec coulomb_residual(const FieldState& ref, const FieldState& target, const GaugeTransformation& u,
                      CoulombMode mode);

struct FlatResult {
  Connection conn;
  double residual = 0;
  int iterations = 0;
};
FlatResult find_flat(const Connection& seed, const NewtonConfig& cfg, Trace* trace = nullptr);

// Irreducible flat SU(2) connection on OCT-MIN (embedded in U(2)).
Connection genus2_flat_seed(std::uint64_t rng_seed, int rank = 2);

// Sup over edges of the Frobenius norm of the log-chart difference.
double chart_distance(const Connection& a, const Connection& b);
inline constexpr double kBasinBound = 0.1;

struct HarmonicResult {
  FieldState state;
  GaugeTransformation u;  // applied to the plus endpoint
  ResidualReport residuals;
  int iterations = 0;
};
HarmonicResult harmonic_from_endpoints(const Connection& plus, const Connection& minus, const NewtonConfig& cfg,
                                       Trace* trace = nullptr);

// Deformation operator T(a, psi) = (d1_l2_adjoint, dG) in tp_to_real
// coordinates; rows: 0-cochain, mu_I part, complex dbar part.
RMat deformation_operator(const FieldState& st);
SpectrumReport deformation_dimension(const FieldState& st);
// Linearization of the equivalent real system (F^{nabla+phi}, F^{nabla-phi},
// (d^nabla)^* phi) stacked under d1_l2_adjoint.
RMat real_deformation_operator(const FieldState& st);

struct Cohomology {
  int h0 = 0;
  int h1 = 0;
  int h2 = 0;
};
Cohomology deformation_cohomology(const FieldState& st);

struct UnitaryEquivVerdict {
  double lambda1 = 0;
  double wedge_norm2 = 0;
  double margin = 0;  // lambda1 - wedge_norm2
  bool bound_holds = false;
  double intertwining_residual = 0;
  double unitary_residual = 0;
  double gauge_residual = 0;
  bool equivalent = false;
  GaugeTransformation unitary;
};
UnitaryEquivVerdict unitary_equiv_check(const FieldState& s1, const FieldState& s2, const std::vector<Mat>& uc);

// Max over cells of the matrix difference between two states.
double state_distance(const FieldState& a, const FieldState& b);

}  // namespace hsmod
