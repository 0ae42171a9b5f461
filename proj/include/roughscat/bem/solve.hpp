#pragma once

#include <Eigen/Dense>

#include "roughscat/common.hpp"

namespace roughscat::bem {

enum class SolveMethod { kDirect, kGmres };

struct SolveOptions {
  SolveMethod method = SolveMethod::kDirect;
  double tol = 1e-10;
  int restart = 100;
  int max_iterations = 2000;
  /// Systems with a condition estimate above this are rejected.
  double max_condition = 1e14;
};

/// Coefficients of the Neumann trace in the per-element basis.
struct NeumannTrace {
  Eigen::VectorXcd coefficients;
  double relative_residual = 0.0;  // |A x - b| / |b|
  int iterations = 0;              // 0 for the direct solver
};

/// Throws InvalidArgument for shape mismatches and NumericalError when the
/// matrix is singular or ill-conditioned, or when GMRES does not reach `tol`.
NeumannTrace solve_density(const Eigen::MatrixXcd& matrix, const Eigen::VectorXcd& rhs, const SolveOptions& options = {});

}  // namespace roughscat::bem
