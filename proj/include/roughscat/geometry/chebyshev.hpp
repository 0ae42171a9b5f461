#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

namespace roughscat::geometry {

/// Interpolation nodes on [0,1] together with their barycentric weights.
///
/// `chebyshev_grid` produces Chebyshev points of the second kind (endpoints
/// included); `chebyshev_first_kind_grid` produces the interior points of
/// the first kind, used for collocation where nodes must not lie on edges.
struct ChebyshevGrid {
  int degree = 0;
  std::vector<double> nodes;
  std::vector<double> weights;

  [[nodiscard]] int size() const { return degree + 1; }
};

/// Nodes (1 - cos(k pi / q)) / 2 with weights (-1)^k delta_k.  Requires q >= 1.
ChebyshevGrid chebyshev_grid(int q);

/// Nodes (1 - cos((2k+1) pi / (2p+2))) / 2 with weights (-1)^k sin((2k+1) pi / (2p+2)).
/// p = 0 gives the single midpoint.
ChebyshevGrid chebyshev_first_kind_grid(int p);

/// Distance below which an evaluation point is treated as hitting a node.
inline constexpr double kNodeHitTolerance = 1e-14;

/// Barycentric interpolant of `values` at s.
double bary_eval_1d(const ChebyshevGrid& grid, std::span<const double> values, double s);

/// Cardinal function values l_k(s), so that p(s) = sum_k l_k(s) f_k.
/// At a node hit the output is the corresponding unit vector.
void bary_basis(const ChebyshevGrid& grid, double s, std::span<double> out);

/// Spectral differentiation matrix D with (D f)_i = p'(xi_i).
Eigen::MatrixXd differentiation_matrix(const ChebyshevGrid& grid);

}  // namespace roughscat::geometry
