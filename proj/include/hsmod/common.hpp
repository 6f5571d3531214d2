#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace hsmod {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using Rng = std::mt19937_64;

enum class ErrorKind {
  InvalidArgument,
  InvalidMesh,
  Topology,
  NoComplexStructure,
  BranchCut,
  NonConvergence,
  ReducibleReference,
  Basin,
  Hypothesis,
  DegenerateInput,
  Config,
  Invariant,
};

const char* error_kind_name(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what, double residual = -1.0, int index = -1)
      : std::runtime_error(what), kind_(kind), residual_(residual), index_(index) {}
  ErrorKind kind() const { return kind_; }
  // Final residual for solver failures, negative when not applicable.
  double residual() const { return residual_; }
  // Offending cell index (face for branch cuts), -1 when not applicable.
  int index() const { return index_; }

 private:
  ErrorKind kind_;
  double residual_;
  int index_;
};

}  // namespace hsmod
