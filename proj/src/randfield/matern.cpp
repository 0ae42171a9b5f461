#include "roughscat/randfield/matern.hpp"

#include <cmath>

#include "roughscat/common.hpp"

namespace roughscat::randfield {

double matern_eval(const MaternKernel& kernel, double r) {
  if (!(r >= 0.0)) throw InvalidArgument("matern_eval: distance must be nonnegative");
  if (!(kernel.nu > 0.0) || !(kernel.length > 0.0) || !std::isfinite(kernel.length)) {
    throw InvalidArgument("matern_eval: need nu > 0 and 0 < l < inf");
  }
  if (r == 0.0) return 1.0;
  const double x = r / kernel.length;
  const double nu = kernel.nu;
  if (std::isinf(nu)) return std::exp(-0.5 * x * x);
  if (nu == 0.5) return std::exp(-x);
  if (nu == 1.5) {
    const double z = std::sqrt(3.0) * x;
    return (1.0 + z) * std::exp(-z);
  }
  if (nu == 2.5) {
    const double z = std::sqrt(5.0) * x;
    return (1.0 + z + z * z / 3.0) * std::exp(-z);
  }
  const double z = std::sqrt(2.0 * nu) * x;
  if (z > 700.0) return 0.0;
  // log form avoids overflow of z^nu and Gamma(nu) for large nu.
  const double log_k = (1.0 - nu) * std::log(2.0) - std::lgamma(nu) + nu * std::log(z);
  return std::min(1.0, std::exp(log_k) * std::cyl_bessel_k(nu, z));
}

}  // namespace roughscat::randfield
