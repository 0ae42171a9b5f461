#include "roughscat/geometry/chebyshev.hpp"

#include <cmath>

#include "roughscat/common.hpp"

namespace roughscat::geometry {

ChebyshevGrid chebyshev_grid(int q) {
  if (q < 1) {
    throw InvalidArgument("chebyshev_grid: degree must be >= 1, got " + std::to_string(q));
  }
  ChebyshevGrid grid;
  grid.degree = q;
  grid.nodes.resize(q + 1);
  grid.weights.resize(q + 1);
  for (int k = 0; k <= q; ++k) {
    grid.nodes[k] = 0.5 * (1.0 - std::cos(k * kPi / q));
    const double delta = (k == 0 || k == q) ? 0.5 : 1.0;
    grid.weights[k] = (k % 2 == 0 ? 1.0 : -1.0) * delta;
  }
  // cos(pi/2) is not exactly zero in floating point; pin the symmetric midpoint
  // and the endpoints so node hits are exact.
  grid.nodes[0] = 0.0;
  grid.nodes[q] = 1.0;
  if (q % 2 == 0) grid.nodes[q / 2] = 0.5;
  return grid;
}

ChebyshevGrid chebyshev_first_kind_grid(int p) {
  if (p < 0) {
    throw InvalidArgument("chebyshev_first_kind_grid: degree must be >= 0");
  }
  ChebyshevGrid grid;
  grid.degree = p;
  grid.nodes.resize(p + 1);
  grid.weights.resize(p + 1);
  for (int k = 0; k <= p; ++k) {
    const double theta = (2 * k + 1) * kPi / (2.0 * (p + 1));
    grid.nodes[k] = 0.5 * (1.0 - std::cos(theta));
    grid.weights[k] = (k % 2 == 0 ? 1.0 : -1.0) * std::sin(theta);
  }
  if (p % 2 == 0) grid.nodes[p / 2] = 0.5;
  return grid;
}

void bary_basis(const ChebyshevGrid& grid, double s, std::span<double> out) {
  const int n = grid.size();
  for (int k = 0; k < n; ++k) {
    if (std::abs(s - grid.nodes[k]) < kNodeHitTolerance) {
      for (int j = 0; j < n; ++j) out[j] = 0.0;
      out[k] = 1.0;
      return;
    }
  }
  double denom = 0.0;
  for (int k = 0; k < n; ++k) {
    out[k] = grid.weights[k] / (s - grid.nodes[k]);
    denom += out[k];
  }
  const double inv = 1.0 / denom;
  for (int k = 0; k < n; ++k) out[k] *= inv;
}

double bary_eval_1d(const ChebyshevGrid& grid, std::span<const double> values, double s) {
  if (static_cast<int>(values.size()) != grid.size()) {
    throw InvalidArgument("bary_eval_1d: value count does not match grid");
  }
  double num = 0.0;
  double den = 0.0;
  for (int k = 0; k < grid.size(); ++k) {
    const double diff = s - grid.nodes[k];
    if (std::abs(diff) < kNodeHitTolerance) return values[k];
    const double a = grid.weights[k] / diff;
    num += a * values[k];
    den += a;
  }
  return num / den;
}

Eigen::MatrixXd differentiation_matrix(const ChebyshevGrid& grid) {
  const int n = grid.size();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      d(i, j) = (grid.weights[j] / grid.weights[i]) / (grid.nodes[i] - grid.nodes[j]);
      row_sum += d(i, j);
    }
    d(i, i) = -row_sum;
  }
  return d;
}

}  // namespace roughscat::geometry
