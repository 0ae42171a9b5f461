#include "roughscat/bem/potential.hpp"

#include <array>

#include "roughscat/bem/local_rules.hpp"
#include "roughscat/simd/kernels.hpp"

namespace roughscat::bem {

PotentialEvaluator::PotentialEvaluator(const BoundaryDiscretization& disc, const Eigen::VectorXcd& coefficients,
                                       double kappa, int eval_order)
    : kappa_(kappa) {
  if (coefficients.size() != disc.num_dofs()) throw InvalidArgument("PotentialEvaluator: trace size mismatch");
  if (eval_order < 0) throw InvalidArgument("PotentialEvaluator: negative evaluation order");
  const int order = eval_order == 0 ? disc.degree() + 2 : eval_order;
  const LocalRule rule = tensor_gauss(order);
  const auto clouds = map_rule_all(disc, rule);
  const int nb = disc.dofs_per_element();
  const int q = rule.size();
  Eigen::MatrixXd basis(nb, q);
  for (int k = 0; k < q; ++k) disc.basis(rule.u[k], rule.v[k], std::span<double>(basis.col(k).data(), nb));

  const int total = q * disc.num_elements();
  sources_.resize(total);
  rho_re_.resize(total);
  rho_im_.resize(total);
  for (int e = 0; e < disc.num_elements(); ++e) {
    const Eigen::VectorXcd vals = basis.transpose() * coefficients.segment(e * nb, nb);
    for (int k = 0; k < q; ++k) {
      const int g = e * q + k;
      const PointCloud& c = clouds[e];
      sources_.set(g, c.point(k), {c.nx[k], c.ny[k], c.nz[k]}, c.w[k]);
      rho_re_[g] = c.w[k] * vals[k].real();
      rho_im_[g] = c.w[k] * vals[k].imag();
    }
  }
}

void PotentialEvaluator::value_and_gradient(const Vec3& x, cplx& value, Vec3c& gradient) const {
  std::array<double, 8> acc{};
  simd::kernels().single_layer_sum(x.data(), kappa_, sources_.sources(), rho_re_.data(), rho_im_.data(), acc.data());
  value = -cplx(acc[0], acc[1]);
  gradient = -Vec3c(cplx(acc[2], acc[3]), cplx(acc[4], acc[5]), cplx(acc[6], acc[7]));
}

cplx PotentialEvaluator::value(const Vec3& x) const {
  cplx v;
  Vec3c g;
  value_and_gradient(x, v, g);
  return v;
}

Vec3c PotentialEvaluator::gradient(const Vec3& x) const {
  cplx v;
  Vec3c g;
  value_and_gradient(x, v, g);
  return g;
}

cplx eval_scattered(const BoundaryDiscretization& disc, const NeumannTrace& trace, double kappa, const Vec3& x,
                    int eval_order) {
  return PotentialEvaluator(disc, trace.coefficients, kappa, eval_order).value(x);
}

Vec3c eval_scattered_gradient(const BoundaryDiscretization& disc, const NeumannTrace& trace, double kappa,
                              const Vec3& x, int eval_order) {
  return PotentialEvaluator(disc, trace.coefficients, kappa, eval_order).gradient(x);
}

}  // namespace roughscat::bem
