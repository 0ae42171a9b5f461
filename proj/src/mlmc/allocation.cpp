#include "roughscat/mlmc/allocation.hpp"

#include <cmath>
#include <limits>

namespace roughscat::mlmc {

namespace {

// Relative slack on the variance constraint so that exactly representable
// optima such as V = eps^2 are not lost to rounding.
constexpr double kFeasibilitySlack = 1e-12;
constexpr std::int64_t kNodeLimit = 20'000'000;

void check_inputs(const std::vector<double>& costs, const std::vector<double>& variances) {
  if (costs.empty() || costs.size() != variances.size()) {
    throw InvalidArgument("allocation: need matching, nonempty cost and variance lists");
  }
  for (std::size_t p = 0; p < costs.size(); ++p) {
    if (!(costs[p] > 0.0) || !std::isfinite(costs[p])) throw InvalidArgument("allocation: costs must be positive");
    if (!(variances[p] >= 0.0) || !std::isfinite(variances[p])) {
      throw InvalidArgument("allocation: variances must be nonnegative");
    }
  }
}

std::int64_t round_up(double x) {
  // Guards against x = 200.00000000000003 from an exact optimum.
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(x * (1.0 - 1e-12))));
}

// Branch and bound over the integer counts of the levels with positive
// variance.  The bound is the continuous optimum of the unassigned levels
// with the remaining variance budget, which is convex in each count.
class IntegerSearch {
 public:
  IntegerSearch(const std::vector<double>& c, const std::vector<double>& v, double budget)
      : c_(c), v_(v), budget_(budget), current_(c.size()), root_(c.size() + 1, 0.0) {
    for (int k = static_cast<int>(c.size()) - 1; k >= 0; --k) root_[k] = root_[k + 1] + std::sqrt(c[k] * v[k]);
  }

  void improve(std::vector<std::int64_t>& best, double& best_cost) {
    best_ = &best;
    best_cost_ = &best_cost;
    recurse(0, budget_, 0.0);
  }

 private:
  double bound(int k, double budget, double cost, double n) const {
    const double rest = budget - v_[k] / n;
    if (!(rest > 0.0)) return std::numeric_limits<double>::infinity();
    return cost + c_[k] * n + root_[k + 1] * root_[k + 1] / rest;
  }

  void recurse(int k, double budget, double cost) {
    if (++nodes_ > kNodeLimit) return;
    const int last = static_cast<int>(c_.size()) - 1;
    if (k == last) {
      std::int64_t n = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(v_[k] / budget)));
      while (v_[k] / static_cast<double>(n) > budget) ++n;
      const double total = cost + c_[k] * static_cast<double>(n);
      if (total < *best_cost_) {
        current_[k] = n;
        *best_ = current_;
        *best_cost_ = total;
      }
      return;
    }
    const double center = root_[k] / budget * std::sqrt(v_[k] / c_[k]);
    const std::int64_t start = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::llround(center)));
    const std::int64_t lowest = static_cast<std::int64_t>(std::floor(v_[k] / budget)) + 1;
    // The bound is convex with its minimum at `center`, so each walk stops at
    // the first count past the minimum whose bound cannot win.
    for (std::int64_t n = start; n >= std::max<std::int64_t>(1, lowest); --n) {
      if (bound(k, budget, cost, static_cast<double>(n)) >= *best_cost_) {
        if (static_cast<double>(n) <= center) break;
        continue;
      }
      current_[k] = n;
      recurse(k + 1, budget - v_[k] / static_cast<double>(n), cost + c_[k] * static_cast<double>(n));
    }
    for (std::int64_t n = std::max(start + 1, lowest);; ++n) {
      if (nodes_ > kNodeLimit) break;
      if (bound(k, budget, cost, static_cast<double>(n)) >= *best_cost_) {
        if (static_cast<double>(n) >= center) break;
        continue;
      }
      current_[k] = n;
      recurse(k + 1, budget - v_[k] / static_cast<double>(n), cost + c_[k] * static_cast<double>(n));
    }
  }

  const std::vector<double>& c_;
  const std::vector<double>& v_;
  double budget_;
  std::vector<std::int64_t> current_;
  std::vector<double> root_;  // root_[k] = sum_{j >= k} sqrt(c_j v_j)
  std::vector<std::int64_t>* best_ = nullptr;
  double* best_cost_ = nullptr;
  std::int64_t nodes_ = 0;
};

}  // namespace

double MLMCPlan::predicted_variance() const {
  double s = 0.0;
  for (std::size_t p = 0; p < samples.size(); ++p) s += variances[p] / static_cast<double>(samples[p]);
  return s;
}

double MLMCPlan::total_cost() const {
  double s = 0.0;
  for (std::size_t p = 0; p < samples.size(); ++p) s += costs[p] * static_cast<double>(samples[p]);
  return s;
}

std::vector<double> gamma_factors(const std::vector<double>& costs, const std::vector<double>& variances) {
  check_inputs(costs, variances);
  std::vector<double> g;
  for (std::size_t p = 1; p < costs.size(); ++p) {
    if (variances[p] == 0.0) {
      g.push_back(std::numeric_limits<double>::infinity());
    } else {
      g.push_back(std::sqrt(variances[p - 1] / variances[p]) * std::sqrt(costs[p] / costs[p - 1]));
    }
  }
  return g;
}

MLMCPlan optimal_allocation(const std::vector<double>& costs, const std::vector<double>& variances, double epsilon) {
  check_inputs(costs, variances);
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw InvalidArgument("optimal_allocation: epsilon must be positive");
  MLMCPlan plan;
  plan.anchoring = Anchoring::kTolerance;
  plan.costs = costs;
  plan.variances = variances;
  plan.epsilon = epsilon;
  plan.gamma = gamma_factors(costs, variances);
  const int levels = static_cast<int>(costs.size());
  double root = 0.0;
  for (int p = 0; p < levels; ++p) root += std::sqrt(costs[p] * variances[p]);
  const double eps2 = epsilon * epsilon;
  plan.lambda = (root / eps2) * (root / eps2);
  plan.samples.assign(levels, 1);
  plan.continuous.assign(levels, 1.0);
  if (root == 0.0) return plan;

  std::vector<int> active;
  for (int p = 0; p < levels; ++p) {
    if (variances[p] == 0.0) continue;
    active.push_back(p);
    plan.continuous[p] = std::sqrt(plan.lambda * variances[p] / costs[p]);
    plan.samples[p] = round_up(plan.continuous[p]);
  }

  std::vector<double> c, v;
  std::vector<std::int64_t> best;
  double best_cost = 0.0;
  for (int p : active) {
    c.push_back(costs[p]);
    v.push_back(variances[p]);
    best.push_back(plan.samples[p]);
    best_cost += costs[p] * static_cast<double>(plan.samples[p]);
  }
  IntegerSearch(c, v, eps2 * (1.0 + kFeasibilitySlack)).improve(best, best_cost);
  for (std::size_t k = 0; k < active.size(); ++k) plan.samples[active[k]] = best[k];
  return plan;
}

MLMCPlan anchored_allocation(const std::vector<double>& costs, const std::vector<double>& variances,
                             std::int64_t finest) {
  check_inputs(costs, variances);
  if (finest < 1) throw InvalidArgument("anchored_allocation: finest sample count must be >= 1");
  MLMCPlan plan;
  plan.anchoring = Anchoring::kFinestCount;
  plan.costs = costs;
  plan.variances = variances;
  plan.finest = finest;
  plan.gamma = gamma_factors(costs, variances);
  const int levels = static_cast<int>(costs.size());
  plan.samples.assign(levels, 1);
  plan.continuous.assign(levels, 1.0);
  bool any = false;
  for (double v : variances) any = any || v > 0.0;
  if (!any) return plan;
  const int top = levels - 1;
  if (variances[top] == 0.0) {
    throw InvalidArgument("anchored_allocation: the finest degree has zero variance; drop it or use a tolerance");
  }
  const double anchor = std::sqrt(variances[top] / costs[top]);
  for (int p = 0; p < levels; ++p) {
    plan.continuous[p] = static_cast<double>(finest) * std::sqrt(variances[p] / costs[p]) / anchor;
    plan.samples[p] = p == top ? finest : round_up(plan.continuous[p]);
  }
  return plan;
}

}  // namespace roughscat::mlmc
