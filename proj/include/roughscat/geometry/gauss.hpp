#pragma once

#include <vector>

namespace roughscat::geometry {

/// Gauss-Legendre rule mapped to [0,1]; weights sum to 1.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point rule (n >= 1).  Rules are computed once per n and cached.
const GaussRule& gauss_legendre(int n);

}  // namespace roughscat::geometry
