#include "roughscat/mlmc/samplers.hpp"

#include <chrono>
#include <cmath>

#include "roughscat/bem/potential.hpp"

namespace roughscat::mlmc {

AffineSampler::AffineSampler(Eigen::VectorXcd a, Eigen::VectorXcd b, Eigen::VectorXcd c)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)) {
  if (a_.size() < 1 || b_.size() != a_.size() || c_.size() != a_.size()) {
    throw InvalidArgument("AffineSampler: vectors must be nonempty and of equal length");
  }
}

std::vector<Eigen::VectorXcd> AffineSampler::evaluate(const randfield::StreamId& id, std::span<const int> degrees,
                                                      SampleCost& cost) const {
  randfield::Stream s(id);
  const double g = std::sqrt(3.0) * s.next_symmetric();
  const double h = std::sqrt(3.0) * s.next_symmetric();
  std::vector<Eigen::VectorXcd> out;
  cost = {};
  for (int p : degrees) {
    out.push_back(a_ + g * b_ + std::ldexp(h, -p) * c_);
    cost.operations += std::ldexp(1.0, p);
  }
  return out;
}

Eigen::MatrixXcd AffineSampler::exact_second_moment(int p) const {
  return a_ * a_.adjoint() + b_ * b_.adjoint() + std::ldexp(1.0, -2 * p) * (c_ * c_.adjoint());
}

double AffineSampler::level_variance(int p) const {
  if (p == 0) return (b_.cwiseAbs2() + c_.cwiseAbs2()).maxCoeff();
  return std::ldexp(1.0, -2 * p) * c_.cwiseAbs2().maxCoeff();
}

BemSampler::BemSampler(std::shared_ptr<const randfield::KLBasis> basis,
                       std::shared_ptr<const geometry::LandmarkSet> landmarks,
                       std::shared_ptr<const interface::ArtificialInterface> iface, BemSamplerOptions options)
    : basis_(std::move(basis)), landmarks_(std::move(landmarks)), iface_(std::move(iface)), options_(options) {
  if (!basis_ || !landmarks_ || !iface_) throw InvalidArgument("BemSampler: null input");
  if (basis_->dim() != 3 * landmarks_->count()) throw InvalidArgument("BemSampler: KL basis does not match landmarks");
  if (!(options_.alpha >= 0.0)) throw InvalidArgument("BemSampler: alpha must be nonnegative");
}

std::shared_ptr<const geometry::InterpolatedSurface> BemSampler::realization(const Eigen::VectorXd& y) const {
  const randfield::DeformationSample d = randfield::kl_sample(*basis_, *landmarks_, options_.alpha, y);
  double sup = 0.0;
  for (const Vec3& x : d.displaced) sup = std::max(sup, x.cwiseAbs().maxCoeff());
  iface_->check_enclosure(sup);
  return std::make_shared<const geometry::InterpolatedSurface>(geometry::surface_from_global(*landmarks_, d.displaced));
}

std::shared_ptr<const geometry::InterpolatedSurface> BemSampler::realization(const randfield::StreamId& id) const {
  return realization(randfield::draw_parameters(id, basis_->rank()));
}

BemSolution BemSampler::solve(std::shared_ptr<const geometry::InterpolatedSurface> surface, int degree) const {
  BemSolution s;
  s.disc = std::make_unique<bem::BoundaryDiscretization>(std::move(surface), degree);
  bem::AssemblyOptions opt = options_.assembly;
  opt.workers = options_.workers;
  bem::AssemblyStats stats;
  const Eigen::MatrixXcd a = bem::assemble_cfie(*s.disc, options_.wave, opt, &stats);
  s.trace = bem::solve_density(a, bem::rhs_incident(*s.disc, options_.wave), options_.solve);
  const double n = s.disc->num_dofs();
  s.operations = static_cast<double>(stats.kernel_evaluations) + n * n * n / 1000.0;
  return s;
}

interface::CauchyData BemSampler::cauchy(const BemSolution& solution, double* operations) const {
  interface::CauchyData c = interface::cauchy_from_trace(*solution.disc, solution.trace, options_.wave.kappa, *iface_,
                                                         options_.workers, options_.eval_order);
  if (operations) {
    const int order = options_.eval_order == 0 ? solution.disc->degree() + 2 : options_.eval_order;
    *operations = static_cast<double>(iface_->size()) * solution.disc->num_elements() * order * order;
  }
  return c;
}

std::vector<Eigen::VectorXcd> BemSampler::evaluate(const randfield::StreamId& id, std::span<const int> degrees,
                                                   SampleCost& cost) const {
  const auto t0 = std::chrono::steady_clock::now();
  cost = {};
  const auto surface = realization(id);
  std::vector<Eigen::VectorXcd> out;
  for (int p : degrees) {
    const BemSolution s = solve(surface, p);
    double ops = 0.0;
    out.push_back(cauchy(s, &ops).stacked());
    cost.operations += s.operations + ops;
  }
  cost.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace roughscat::mlmc
