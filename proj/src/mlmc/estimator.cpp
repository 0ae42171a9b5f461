#include "roughscat/mlmc/estimator.hpp"

#include <algorithm>
#include <sstream>

#include "roughscat/mlmc/accumulator.hpp"
#include "roughscat/parallel.hpp"

namespace roughscat::mlmc {

namespace {

std::string describe(const randfield::StreamId& id) {
  std::ostringstream s;
  s << "(seed " << id.seed << ", domain " << id.domain << ", level " << id.level << ", index " << id.index << ")";
  return s.str();
}

// Evaluates the level quantity inputs of one stream; rethrows library errors
// with the stream id attached.
void level_sample(const Sampler& sampler, const randfield::StreamId& id, int p, Eigen::VectorXcd& fine,
                  Eigen::VectorXcd& coarse, SampleCost& cost) {
  const std::vector<int> degrees = level_degrees(p);
  std::vector<Eigen::VectorXcd> v;
  try {
    v = sampler.evaluate(id, degrees, cost);
  } catch (const Error& e) {
    throw Error("sampler failed for stream " + describe(id) + ": " + e.what());
  }
  if (v.size() != degrees.size()) throw Error("sampler returned the wrong number of degrees for " + describe(id));
  for (const auto& x : v) {
    if (x.size() != sampler.dim()) throw Error("sampler returned a sample of the wrong length for " + describe(id));
  }
  fine = std::move(v[0]);
  if (p > 0) coarse = std::move(v[1]);
}

}  // namespace

std::vector<int> level_degrees(int p) {
  if (p < 0) throw InvalidArgument("level_degrees: negative degree");
  if (p == 0) return {0};
  return {p, p - 1};
}

std::vector<LevelStats> pilot_estimate(const Sampler& sampler, int max_degree, int n_pilot, std::uint64_t seed,
                                       int workers) {
  if (max_degree < 0) throw InvalidArgument("pilot_estimate: negative maximum degree");
  if (n_pilot < 2) throw InvalidArgument("pilot_estimate: need at least two pilot samples");
  const int dim = sampler.dim();
  std::vector<LevelStats> stats;
  for (int p = 0; p <= max_degree; ++p) {
    Eigen::MatrixXcd diff(dim, n_pilot);
    std::vector<SampleCost> costs(n_pilot);
    parallel_for(n_pilot, workers, [&](int n) {
      Eigen::VectorXcd fine, coarse;
      level_sample(sampler, {seed, kPilotDomain, static_cast<std::uint64_t>(p), static_cast<std::uint64_t>(n)}, p,
                   fine, coarse, costs[n]);
      diff.col(n) = p == 0 ? fine : Eigen::VectorXcd(fine - coarse);
    });
    // Shifting by the first sample keeps constant components exactly zero.
    const Eigen::MatrixXcd shifted = diff.colwise() - Eigen::VectorXcd(diff.col(0));
    const Eigen::VectorXcd mean = shifted.rowwise().mean();
    double var = 0.0;
    for (int k = 0; k < dim; ++k) {
      const double v = (shifted.row(k).array() - mean[k]).abs2().sum() / (n_pilot - 1);
      var = std::max(var, v);
    }
    LevelStats s;
    s.degree = p;
    s.variance = var;
    for (const auto& c : costs) {
      s.cost += c.operations;
      s.seconds += c.seconds;
    }
    s.cost /= n_pilot;
    s.seconds /= n_pilot;
    stats.push_back(s);
  }
  return stats;
}

MLMCResult mlmc_run(const Sampler& sampler, const MLMCPlan& plan, std::uint64_t seed, const RunOptions& options,
                    const LevelCallback& on_level) {
  if (plan.samples.empty()) throw InvalidArgument("mlmc_run: empty plan");
  if (options.block < 1) throw InvalidArgument("mlmc_run: block size must be positive");
  const int dim = sampler.dim();
  if (dim % 2 != 0) throw InvalidArgument("mlmc_run: sampler dimension must be even");
  MLMCResult result;
  result.moments = interface::InterfaceMoments(dim / 2);
  for (int p = 0; p <= plan.max_degree(); ++p) {
    const std::int64_t n_p = plan.samples[p];
    if (n_p < 1) throw InvalidArgument("mlmc_run: every level needs at least one sample");
    MomentAccumulator acc(dim);
    LevelResult level;
    level.degree = p;
    for (std::int64_t begin = 0; begin < n_p; begin += options.block) {
      const int count = static_cast<int>(std::min<std::int64_t>(options.block, n_p - begin));
      Eigen::MatrixXcd fine(dim, count), coarse(dim, p > 0 ? count : 0);
      std::vector<SampleCost> costs(count);
      parallel_for(count, options.workers, [&](int k) {
        Eigen::VectorXcd f, c;
        const randfield::StreamId id{seed, options.domain, static_cast<std::uint64_t>(p),
                                     static_cast<std::uint64_t>(begin + k)};
        level_sample(sampler, id, p, f, c, costs[k]);
        fine.col(k) = f;
        if (p > 0) coarse.col(k) = c;
      });
      acc.add_block(fine, coarse);
      for (const auto& c : costs) {
        level.operations += c.operations;
        level.seconds += c.seconds;
      }
    }
    level.samples = n_p;
    level.operations /= static_cast<double>(n_p);
    level.seconds /= static_cast<double>(n_p);
    result.levels.push_back(level);

    interface::InterfaceMoments contribution;
    contribution.points = dim / 2;
    contribution.mean = acc.mean();
    contribution.second = acc.second_moment();
    if (on_level) on_level(p, contribution);
    result.moments.mean += contribution.mean;
    result.moments.second += contribution.second;
  }
  return result;
}

ReferenceError compare_propagated(const interface::PropagatedMoments& run, const interface::PropagatedMoments& ref) {
  if (run.mean.size() != ref.mean.size() || run.correlation.rows() != ref.correlation.rows()) {
    throw InvalidArgument("compare_propagated: point sets differ");
  }
  ReferenceError e;
  if (run.mean.size() == 0) return e;
  e.mean = (run.mean - ref.mean).cwiseAbs().maxCoeff();
  e.correlation = (run.correlation - ref.correlation).cwiseAbs().maxCoeff();
  return e;
}

ReferenceError error_vs_reference(const interface::ArtificialInterface& iface, double kappa,
                                  const interface::InterfaceMoments& run, const interface::InterfaceMoments& ref,
                                  const std::vector<Vec3>& points, int workers) {
  if (run.points != ref.points) throw InvalidArgument("error_vs_reference: interface grids differ");
  return compare_propagated(interface::propagate(iface, run, kappa, points, workers),
                            interface::propagate(iface, ref, kappa, points, workers));
}

}  // namespace roughscat::mlmc
