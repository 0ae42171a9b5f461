#pragma once

#include <functional>
#include <vector>

#include <Eigen/Core>

#include "roughscat/randfield/covariance.hpp"

namespace roughscat::randfield {

/// Raised when a pivot falls below -1e-10.
class NotPositiveSemidefinite : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

struct PivotedCholeskyResult {
  Eigen::MatrixXd factor;              // dim x m
  std::vector<int> pivots;             // m entries
  std::vector<double> residual_trace;  // initial trace followed by one value per step
  double tolerance = 0.0;
  bool converged = false;  // residual reached tolerance * initial trace

  [[nodiscard]] int rank() const { return static_cast<int>(pivots.size()); }
  [[nodiscard]] double initial_trace() const { return residual_trace.front(); }
  [[nodiscard]] double final_trace() const { return residual_trace.back(); }
};

inline constexpr double kNegativePivotSlack = 1e-10;
inline constexpr double kPivotFloor = 1e-14;

/// Greedy largest-diagonal pivoted Cholesky.  Stops when the residual trace
/// is at most tol * initial trace, or when the largest remaining pivot is
/// below 1e-14 * initial max diagonal (then `converged` is false unless the
/// tolerance happens to be met).  Only the requested columns are evaluated.
PivotedCholeskyResult pivoted_cholesky(const SymmetricOracle& oracle, double tol);

PivotedCholeskyResult pivoted_cholesky(const std::function<double(int, int)>& entry, int dim, double tol);

}  // namespace roughscat::randfield
