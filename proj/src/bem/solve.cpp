#include "roughscat/bem/solve.hpp"

#include <cmath>

#include <unsupported/Eigen/IterativeSolvers>

namespace roughscat::bem {

namespace {

double relative_residual(const Eigen::MatrixXcd& a, const Eigen::VectorXcd& x, const Eigen::VectorXcd& b) {
  const double nb = b.norm();
  const double r = (a * x - b).norm();
  return nb > 0.0 ? r / nb : r;
}

}  // namespace

NeumannTrace solve_density(const Eigen::MatrixXcd& matrix, const Eigen::VectorXcd& rhs, const SolveOptions& options) {
  if (matrix.rows() != matrix.cols()) throw InvalidArgument("solve_density: matrix is not square");
  if (matrix.rows() != rhs.size()) throw InvalidArgument("solve_density: right-hand side size mismatch");
  if (!matrix.allFinite() || !rhs.allFinite()) throw NumericalError("solve_density: non-finite input");
  NeumannTrace out;
  if (matrix.rows() == 0) return out;

  if (options.method == SolveMethod::kDirect) {
    const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(matrix);
    const double rcond = lu.rcond();
    if (!(rcond * options.max_condition > 1.0)) {
      throw NumericalError("solve_density: matrix is singular or ill-conditioned (condition estimate " +
                           std::to_string(1.0 / rcond) + ")");
    }
    out.coefficients = lu.solve(rhs);
  } else {
    Eigen::GMRES<Eigen::MatrixXcd, Eigen::IdentityPreconditioner> gmres;
    gmres.set_restart(options.restart);
    gmres.setMaxIterations(options.max_iterations);
    gmres.setTolerance(options.tol);
    gmres.compute(matrix);
    out.coefficients = gmres.solve(rhs);
    out.iterations = static_cast<int>(gmres.iterations());
    if (gmres.info() != Eigen::Success) {
      throw NumericalError("solve_density: GMRES did not converge (estimated residual " +
                           std::to_string(gmres.error()) + ")");
    }
  }
  out.relative_residual = relative_residual(matrix, out.coefficients, rhs);
  if (!out.coefficients.allFinite()) throw NumericalError("solve_density: non-finite solution");
  if (options.method == SolveMethod::kGmres && out.relative_residual > 10.0 * options.tol) {
    throw NumericalError("solve_density: GMRES residual above tolerance");
  }
  return out;
}

}  // namespace roughscat::bem
