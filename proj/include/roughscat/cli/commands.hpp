#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "roughscat/cli/config.hpp"
#include "roughscat/interface/interface.hpp"
#include "roughscat/mlmc/estimator.hpp"
#include "roughscat/mlmc/samplers.hpp"
#include "roughscat/randfield/kl.hpp"

namespace roughscat::cli {

inline constexpr const char* kVersion = "0.1.0";

struct CommandOptions {
  std::string out = "out";
  int workers = 1;
  /// Progress lines (timings included); never written to the CSVs.
  std::function<void(const std::string&)> log;
};

/// Landmarks, KL basis, interface and evaluation points shared by the
/// commands.  The KL basis is loaded from the cache when present.
struct Pipeline {
  std::shared_ptr<const geometry::LandmarkSet> landmarks;
  std::shared_ptr<const randfield::KLBasis> kl;
  std::shared_ptr<const interface::ArtificialInterface> iface;
  std::vector<Vec3> eval_points;
  bool kl_from_cache = false;

  [[nodiscard]] mlmc::BemSampler sampler(const RunConfig& config, int workers) const;
};

/// Cache path of the KL basis of `config`.
std::string kl_cache_path(const RunConfig& config, const CommandOptions& options);

/// Builds the pipeline.  With need_kl = false the KL basis is skipped
/// (alpha = 0 needs none).
Pipeline build_pipeline(const RunConfig& config, const CommandOptions& options, bool need_kl = true);

struct KLReport {
  int landmarks = 0;
  int rank = 0;
  double covariance_trace = 0.0;
  double eigenvalue_sum = 0.0;
  double residual_trace = 0.0;
  double slope = 0.0;
  bool converged = false;
  Eigen::VectorXd eigenvalues;
};

/// kl_spectrum.csv (k, lambda_k) and kl_summary.csv; refreshes the cache.
KLReport cmd_kl(const RunConfig& config, const CommandOptions& options);

struct SolveReport {
  std::vector<Vec3> points;
  Eigen::VectorXcd direct;     // u_s at the evaluation points from the BEM potential
  Eigen::VectorXcd interface;  // the same points through the interface Cauchy data
  interface::CauchyData cauchy;
  int dofs = 0;
};

/// Solves sample `config.sample` at `config.degree` (sample -1 means y = 0)
/// and writes solve_points.csv and solve_interface.csv.
SolveReport cmd_solve(const RunConfig& config, const CommandOptions& options);

struct ConvergenceRow {
  int degree = 0;
  int dofs = 0;
  double error_direct = 0.0;     // max over points against the reference degree
  double error_interface = 0.0;
};

/// Solves one realization for p = 0..p_max + 1 and reports each degree
/// against p_max + 1 (bem_convergence.csv).
std::vector<ConvergenceRow> cmd_bem_convergence(const RunConfig& config, const CommandOptions& options);

struct CampaignLevel {
  int degree = 0;
  std::int64_t samples = 0;
  double cost = 0.0;
  double variance = 0.0;
  double gamma = 0.0;  // NaN at p = 0
};

struct TruncationError {
  int degree = 0;  // estimator truncated after level `degree`
  mlmc::ReferenceError error;
};

struct MLMCReport {
  std::vector<mlmc::LevelStats> pilot;
  std::vector<CampaignLevel> run, reference;
  std::vector<TruncationError> errors;  // empty without a reference
  interface::PropagatedMoments propagated;
  double seconds_pilot = 0.0, seconds_run = 0.0, seconds_reference = 0.0;
};

/// Pilot, N_P- or epsilon-anchored plan, run, moment export and (when
/// config.reference) the comparison of every truncated estimator against a
/// reference run with one more level drawn from independent streams.
MLMCReport cmd_mlmc(const RunConfig& config, const CommandOptions& options);

/// manifest.json: command, canonical config, its hash, seed, versions, SIMD
/// variant and the SHA-256 of every listed output file.
void write_manifest(const std::string& command, const RunConfig& config, const CommandOptions& options,
                    const std::vector<std::string>& files);

/// Entry point of the command-line tool; returns the exit code.
int run_cli(int argc, char** argv);

}  // namespace roughscat::cli
