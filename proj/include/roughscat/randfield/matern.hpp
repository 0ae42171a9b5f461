#pragma once

#include <limits>

namespace roughscat::randfield {

inline constexpr double kGaussianSmoothness = std::numeric_limits<double>::infinity();

/// Matern correlation k_nu(r) with smoothness nu in (0, inf] and length l.
/// nu = inf is the Gaussian kernel exp(-r^2 / (2 l^2)).
struct MaternKernel {
  double nu = 1.5;
  double length = 1.0;
};

/// Closed forms for nu in {1/2, 3/2, 5/2, inf}; other nu go through the
/// modified Bessel function K_nu.  Throws InvalidArgument for r < 0 or an
/// invalid kernel.
double matern_eval(const MaternKernel& kernel, double r);

}  // namespace roughscat::randfield
