#pragma once

#include <cstdint>
#include <vector>

#include "roughscat/common.hpp"

namespace roughscat::mlmc {

/// Pilot estimates for one degree.  `variance` is the scalar variance of the
/// level quantity; `cost` is the deterministic operation-count estimate the
/// plan is built from; `seconds` is the measured wall-clock mean, reported
/// only.
struct LevelStats {
  int degree = 0;
  double cost = 0.0;
  double variance = 0.0;
  double seconds = 0.0;
};

enum class Anchoring { kTolerance, kFinestCount };

struct MLMCPlan {
  Anchoring anchoring = Anchoring::kTolerance;
  std::vector<double> costs;
  std::vector<double> variances;
  std::vector<std::int64_t> samples;  // N_0..N_P
  std::vector<double> continuous;     // real-valued optimum before rounding
  std::vector<double> gamma;          // gamma_1..gamma_P
  double epsilon = 0.0;               // tolerance mode only
  double lambda = 0.0;                // tolerance mode only
  std::int64_t finest = 0;            // finest-count mode only

  [[nodiscard]] int max_degree() const { return static_cast<int>(samples.size()) - 1; }
  /// sum_p v_p / N_p
  [[nodiscard]] double predicted_variance() const;
  /// sum_p c_p N_p
  [[nodiscard]] double total_cost() const;
};

/// gamma_p = sqrt(v_{p-1} / v_p) sqrt(c_p / c_{p-1}) for p = 1..P; +inf when
/// v_p = 0 (the level can be dropped).  Requires positive costs and
/// nonnegative variances.
std::vector<double> gamma_factors(const std::vector<double>& costs, const std::vector<double>& variances);

/// Cheapest plan with sum_p v_p / N_p <= eps^2.  The Lagrange solution
/// N_p = sqrt(lambda v_p / c_p), lambda = (sum_p sqrt(c_p v_p) / eps^2)^2, is
/// rounded up and then improved to the integer optimum by branch and bound
/// (the rounded-up plan is kept when no cheaper feasible plan exists).
/// Levels with zero variance get one sample; all variances zero gives a plan
/// of ones.
MLMCPlan optimal_allocation(const std::vector<double>& costs, const std::vector<double>& variances, double epsilon);

/// N_P = finest and N_{p-1} = ceil-rounded N_P gamma_P ... gamma_p, i.e.
/// N_p proportional to sqrt(v_p / c_p).  Throws InvalidArgument if v_P = 0
/// while some other variance is positive.
MLMCPlan anchored_allocation(const std::vector<double>& costs, const std::vector<double>& variances,
                             std::int64_t finest);

}  // namespace roughscat::mlmc
