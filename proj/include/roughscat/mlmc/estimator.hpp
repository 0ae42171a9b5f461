#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "roughscat/interface/moments.hpp"
#include "roughscat/mlmc/allocation.hpp"
#include "roughscat/randfield/rng.hpp"

namespace roughscat::mlmc {

/// Stream domains keeping pilot, campaign and reference samples independent.
inline constexpr std::uint64_t kPilotDomain = 1;
inline constexpr std::uint64_t kRunDomain = 2;
inline constexpr std::uint64_t kReferenceDomain = 3;

/// Work reported by a sampler for one call.
struct SampleCost {
  double operations = 0.0;  // deterministic cost model
  double seconds = 0.0;     // measured, informational
};

/// Produces the stacked Cauchy data [u_s; du_s/dn] of the realization drawn
/// from a stream at several discretization degrees.  `evaluate` must be a
/// pure function of its arguments and safe to call concurrently.
class Sampler {
 public:
  virtual ~Sampler() = default;
  /// Length of one stacked sample (twice the interface point count).
  [[nodiscard]] virtual int dim() const = 0;
  [[nodiscard]] virtual std::vector<Eigen::VectorXcd> evaluate(const randfield::StreamId& id,
                                                               std::span<const int> degrees,
                                                               SampleCost& cost) const = 0;
};

/// Degrees entering the level-p quantity: {0} for p = 0, {p, p-1} otherwise.
std::vector<int> level_degrees(int p);

struct RunOptions {
  int workers = 1;
  std::uint64_t domain = kRunDomain;
  /// Samples per exact accumulation block.  Blocks are keyed by sample index,
  /// so results do not depend on the worker count.
  int block = 32;
};

/// n_pilot coupled samples per level from streams (seed, kPilotDomain, p, n).
/// variance = max over components k of Var Re(d_k) + Var Im(d_k) of the level
/// difference d, with the unbiased sample variance.
std::vector<LevelStats> pilot_estimate(const Sampler& sampler, int max_degree, int n_pilot, std::uint64_t seed,
                                       int workers = 1);

struct LevelResult {
  int degree = 0;
  std::int64_t samples = 0;
  double operations = 0.0;  // mean per sample
  double seconds = 0.0;     // mean per sample
};

struct MLMCResult {
  interface::InterfaceMoments moments;
  std::vector<LevelResult> levels;
};

/// Called once per level with that level's telescoping contribution to the
/// moments (mean of d and of fine fine^H - coarse coarse^H).
using LevelCallback = std::function<void(int degree, const interface::InterfaceMoments& contribution)>;

/// Telescoping estimator.  Sample n of level p uses stream
/// (seed, options.domain, p, n), shared by both degrees of the correction.
/// A sampler error is rethrown with the offending stream id.
MLMCResult mlmc_run(const Sampler& sampler, const MLMCPlan& plan, std::uint64_t seed, const RunOptions& options = {},
                    const LevelCallback& on_level = {});

struct ReferenceError {
  double mean = 0.0;         // max_x |E_run(x) - E_ref(x)|
  double correlation = 0.0;  // max_{x, x'} |Cor_run(x, x') - Cor_ref(x, x')|
};

/// Propagates both moment sets to `points` and compares them.  Throws
/// InvalidArgument when the moments do not belong to `iface`.
ReferenceError error_vs_reference(const interface::ArtificialInterface& iface, double kappa,
                                  const interface::InterfaceMoments& run, const interface::InterfaceMoments& ref,
                                  const std::vector<Vec3>& points, int workers = 1);

/// Same comparison for moments already propagated to the same points.
ReferenceError compare_propagated(const interface::PropagatedMoments& run, const interface::PropagatedMoments& ref);

}  // namespace roughscat::mlmc
