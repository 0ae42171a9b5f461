#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "roughscat/bem/discretization.hpp"
#include "roughscat/bem/wave.hpp"

namespace roughscat::bem {

struct AssemblyOptions {
  /// Gauss points per direction for regular element pairs and for the cells
  /// of the near-field subdivision; 0 selects p + 3.  Must be at least p + 2.
  int quad_order = 0;
  /// Angular Gauss points in each triangle of the polar rule; 0 selects p + 3.
  int polar_order = 0;
  /// Radial Gauss points of the polar rule; 0 selects 2 (p + 2).
  int polar_radial_order = 0;
  /// Maximum depth of the 4-way subdivision for near-singular pairs.
  int max_depth = 4;
  /// A cell (or element) is integrated by plain Gauss when the target lies
  /// farther than this multiple of its radius from its centre.
  double admissibility = 3.0;
  int workers = 1;
};

/// Work done by one assembly, for deterministic cost models.
struct AssemblyStats {
  std::int64_t kernel_evaluations = 0;
};

/// Coefficients of a * I + b * K* + c * V.
struct OperatorTerms {
  cplx identity = 0.5;
  double adjoint_double_layer = 1.0;
  cplx single_layer = 0.0;
};

/// (1/2) I + K* - i eta V.
OperatorTerms cfie_terms(const WaveSetup& wave);

/// Collocation matrix of the operator described by `terms` at wavenumber
/// kappa >= 0.  Row i collocates at disc.point(i); column j is basis
/// function j.  Throws NumericalError on degenerate elements.  When `stats`
/// is given, the number of kernel evaluations is stored there.
Eigen::MatrixXcd assemble_operator(const BoundaryDiscretization& disc, double kappa, const OperatorTerms& terms,
                                   const AssemblyOptions& options = {}, AssemblyStats* stats = nullptr);

Eigen::MatrixXcd assemble_cfie(const BoundaryDiscretization& disc, const WaveSetup& wave,
                               const AssemblyOptions& options = {}, AssemblyStats* stats = nullptr);

/// Entries d u_inc / dn (x_i) - i eta u_inc(x_i).
Eigen::VectorXcd rhs_incident(const BoundaryDiscretization& disc, const WaveSetup& wave);

}  // namespace roughscat::bem
