#include "roughscat/cli/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <Eigen/Core>
#include <json.hpp>

#include "roughscat/bem/potential.hpp"
#include "roughscat/geometry/landmarks.hpp"
#include "roughscat/parallel.hpp"
#include "roughscat/randfield/covariance.hpp"
#include "roughscat/randfield/pivoted_cholesky.hpp"
#include "roughscat/simd/kernels.hpp"

namespace roughscat::cli {

namespace fs = std::filesystem;

namespace {

// Realizations drawn by solve and bem-convergence.
constexpr std::uint64_t kSolveDomain = 4;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void log(const CommandOptions& options, const std::string& line) {
  if (options.log) options.log(line);
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Progress lines only.
std::string brief(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

/// Writes rows as they come; the file is complete once the writer is closed.
class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const std::string& header) : out_(path, std::ios::binary) {
    if (!out_) throw Error("cannot write '" + path.string() + "'");
    out_ << header << '\n';
  }
  template <class... Ts>
  void row(const Ts&... cells) {
    bool first = true;
    ((out_ << (first ? "" : ",") << text(cells), first = false), ...);
    out_ << '\n';
  }

 private:
  static std::string text(double x) { return num(x); }
  static std::string text(int x) { return std::to_string(x); }
  static std::string text(std::int64_t x) { return std::to_string(x); }
  std::ofstream out_;
};

fs::path output_dir(const CommandOptions& options) {
  fs::path dir(options.out);
  fs::create_directories(dir);
  return dir;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

randfield::PivotedCholeskyResult factor_covariance(const RunConfig& config, const geometry::LandmarkSet& landmarks,
                                                   double* trace) {
  const randfield::LandmarkCovariance cov(config.covariance(), landmarks.points);
  if (trace) *trace = cov.trace();
  return randfield::pivoted_cholesky(cov, config.cholesky_tol);
}

std::shared_ptr<const geometry::InterpolatedSurface> draw_surface(const RunConfig& config, const mlmc::BemSampler& s) {
  if (config.sample < 0) return s.realization(Eigen::VectorXd::Zero(s.parameters()));
  return s.realization(randfield::StreamId{config.seed, kSolveDomain, 0, static_cast<std::uint64_t>(config.sample)});
}

Eigen::VectorXcd direct_values(const mlmc::BemSolution& sol, double kappa, const std::vector<Vec3>& points,
                               int workers) {
  const bem::PotentialEvaluator pot(*sol.disc, sol.trace.coefficients, kappa);
  Eigen::VectorXcd out(static_cast<Eigen::Index>(points.size()));
  parallel_for(static_cast<int>(points.size()), workers, [&](int i) { out[i] = pot.value(points[i]); });
  return out;
}

Eigen::VectorXcd interface_values(const interface::ArtificialInterface& iface, const interface::CauchyData& cauchy,
                                  double kappa, const std::vector<Vec3>& points, int workers) {
  Eigen::VectorXcd out(static_cast<Eigen::Index>(points.size()));
  parallel_for(static_cast<int>(points.size()), workers,
               [&](int i) { out[i] = interface::represent_exterior(iface, cauchy, kappa, points[i]); });
  return out;
}

std::vector<CampaignLevel> campaign_levels(const mlmc::MLMCPlan& plan) {
  std::vector<CampaignLevel> out;
  for (int p = 0; p <= plan.max_degree(); ++p) {
    out.push_back({p, plan.samples[p], plan.costs[p], plan.variances[p],
                   p == 0 ? std::nan("") : plan.gamma[p - 1]});
  }
  return out;
}

void write_levels(const fs::path& path, const std::vector<CampaignLevel>& levels) {
  CsvWriter csv(path, "p,N_p,cost,variance,gamma");
  for (const CampaignLevel& l : levels) csv.row(l.degree, l.samples, l.cost, l.variance, l.gamma);
}

mlmc::MLMCPlan make_plan(const RunConfig& config, const std::vector<mlmc::LevelStats>& pilot, int levels) {
  std::vector<double> c, v;
  for (int p = 0; p < levels; ++p) {
    c.push_back(pilot[p].cost);
    v.push_back(pilot[p].variance);
  }
  return config.epsilon > 0.0 ? mlmc::optimal_allocation(c, v, config.epsilon)
                              : mlmc::anchored_allocation(c, v, config.finest_samples);
}

interface::PropagatedMoments zero_propagated(int points) {
  return {Eigen::VectorXcd::Zero(points), Eigen::MatrixXcd::Zero(points, points)};
}

void add_to(interface::PropagatedMoments& a, const interface::PropagatedMoments& b) {
  a.mean += b.mean;
  a.correlation += b.correlation;
}

void write_points(const fs::path& path, const std::vector<Vec3>& points, const interface::PropagatedMoments& m) {
  CsvWriter csv(path, "index,x,y,z,mean_re,mean_im,second_re,second_im");
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    csv.row(static_cast<int>(i), points[i].x(), points[i].y(), points[i].z(), m.mean[k].real(), m.mean[k].imag(),
            m.correlation(k, k).real(), m.correlation(k, k).imag());
  }
}

void write_correlation(const fs::path& path, const interface::PropagatedMoments& m) {
  CsvWriter csv(path, "i,j,re,im");
  for (Eigen::Index j = 0; j < m.correlation.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.correlation.rows(); ++i) {
      csv.row(static_cast<int>(i), static_cast<int>(j), m.correlation(i, j).real(), m.correlation(i, j).imag());
    }
  }
}

}  // namespace

mlmc::BemSampler Pipeline::sampler(const RunConfig& config, int workers) const {
  mlmc::BemSamplerOptions opt;
  opt.alpha = config.alpha;
  opt.wave = bem::make_wave(config.kappa, config.direction);
  opt.workers = workers;
  return mlmc::BemSampler(kl, landmarks, iface, opt);
}

std::string kl_cache_path(const RunConfig& config, const CommandOptions& options) {
  const fs::path dir = config.kl_cache.empty() ? fs::path(options.out) : fs::path(config.kl_cache);
  return (dir / ("kl-" + config.kl_hash().substr(0, 16) + ".bin")).string();
}

Pipeline build_pipeline(const RunConfig& config, const CommandOptions& options, bool need_kl) {
  Pipeline p;
  const auto t0 = Clock::now();
  auto landmarks = std::make_shared<geometry::LandmarkSet>(geometry::build_landmarks(config.surface(), config.q));
  p.landmarks = landmarks;
  const int dim = 3 * landmarks->count();
  if (!need_kl) {
    auto kl = std::make_shared<randfield::KLBasis>();
    kl->eigenvalues = Eigen::VectorXd(0);
    kl->modes = Eigen::MatrixXd(dim, 0);
    p.kl = kl;
  } else {
    const std::string path = kl_cache_path(config, options);
    if (fs::exists(path)) {
      auto kl = std::make_shared<randfield::KLBasis>(randfield::load_kl(path));
      if (kl->dim() != dim) throw Error("KL cache '" + path + "' does not match the landmarks");
      p.kl = kl;
      p.kl_from_cache = true;
      log(options, "kl: loaded " + path);
    } else {
      auto kl = std::make_shared<randfield::KLBasis>(
          randfield::kl_from_cholesky(factor_covariance(config, *landmarks, nullptr)));
      fs::create_directories(fs::path(path).parent_path());
      randfield::save_kl(*kl, path);
      p.kl = kl;
      log(options, "kl: computed rank " + std::to_string(kl->rank()) + ", cached at " + path);
    }
  }
  p.iface = std::make_shared<interface::ArtificialInterface>(config.interface_half_width, config.interface_grid);
  p.eval_points = interface::fibonacci_sphere(config.eval_points, config.eval_radius);
  log(options, "pipeline: " + brief(seconds_since(t0)) + " s");
  return p;
}

KLReport cmd_kl(const RunConfig& config, const CommandOptions& options) {
  const fs::path dir = output_dir(options);
  const geometry::LandmarkSet landmarks = geometry::build_landmarks(config.surface(), config.q);
  KLReport r;
  r.landmarks = landmarks.count();
  const randfield::PivotedCholeskyResult chol = factor_covariance(config, landmarks, &r.covariance_trace);
  const randfield::KLBasis kl = randfield::kl_from_cholesky(chol);
  r.rank = kl.rank();
  r.eigenvalue_sum = kl.eigenvalues.sum();
  r.residual_trace = chol.final_trace();
  r.converged = chol.converged;
  r.slope = kl.rank() >= 4 ? randfield::singular_value_decay(kl) : std::nan("");
  r.eigenvalues = kl.eigenvalues;

  const std::string cache = kl_cache_path(config, options);
  fs::create_directories(fs::path(cache).parent_path());
  randfield::save_kl(kl, cache);
  {
    CsvWriter csv(dir / "kl_spectrum.csv", "k,lambda");
    for (int k = 0; k < kl.rank(); ++k) csv.row(k + 1, kl.eigenvalues[k]);
    CsvWriter sum(dir / "kl_summary.csv",
                  "landmarks,rank,covariance_trace,eigenvalue_sum,residual_trace,converged,slope");
    sum.row(r.landmarks, r.rank, r.covariance_trace, r.eigenvalue_sum, r.residual_trace, r.converged ? 1 : 0,
            r.slope);
  }
  write_manifest("kl", config, options, {"kl_spectrum.csv", "kl_summary.csv"});
  log(options, "kl: " + std::to_string(r.landmarks) + " landmarks, rank " + std::to_string(r.rank) + ", slope " +
                   brief(r.slope));
  return r;
}

SolveReport cmd_solve(const RunConfig& config, const CommandOptions& options) {
  const fs::path dir = output_dir(options);
  const Pipeline pipe = build_pipeline(config, options, config.alpha > 0.0 && config.sample >= 0);
  const mlmc::BemSampler sampler = pipe.sampler(config, options.workers);
  const auto t0 = Clock::now();
  const mlmc::BemSolution sol = sampler.solve(draw_surface(config, sampler), config.degree);
  SolveReport r;
  r.points = pipe.eval_points;
  r.dofs = sol.disc->num_dofs();
  r.direct = direct_values(sol, config.kappa, r.points, options.workers);
  r.cauchy = sampler.cauchy(sol);
  r.interface = interface_values(*pipe.iface, r.cauchy, config.kappa, r.points, options.workers);
  log(options, "solve: p = " + std::to_string(config.degree) + ", " + std::to_string(r.dofs) + " dofs, " +
                   brief(seconds_since(t0)) + " s");
  {
    CsvWriter csv(dir / "solve_points.csv", "index,x,y,z,direct_re,direct_im,interface_re,interface_im");
    for (std::size_t i = 0; i < r.points.size(); ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      csv.row(static_cast<int>(i), r.points[i].x(), r.points[i].y(), r.points[i].z(), r.direct[k].real(),
              r.direct[k].imag(), r.interface[k].real(), r.interface[k].imag());
    }
    const interface::ArtificialInterface& iface = *pipe.iface;
    const int g = iface.grid();
    CsvWriter ic(dir / "solve_interface.csv", "patch,i,j,x,y,z,u_re,u_im,dudn_re,dudn_im");
    for (int k = 0; k < iface.size(); ++k) {
      const Vec3 x = iface.point(k);
      const int local = k % (g * g);
      ic.row(iface.patch_of(k), local % g, local / g, x.x(), x.y(), x.z(), r.cauchy.value[k].real(),
             r.cauchy.value[k].imag(), r.cauchy.normal_derivative[k].real(), r.cauchy.normal_derivative[k].imag());
    }
  }
  write_manifest("solve", config, options, {"solve_points.csv", "solve_interface.csv"});
  return r;
}

std::vector<ConvergenceRow> cmd_bem_convergence(const RunConfig& config, const CommandOptions& options) {
  const fs::path dir = output_dir(options);
  const Pipeline pipe = build_pipeline(config, options, config.alpha > 0.0 && config.sample >= 0);
  const mlmc::BemSampler sampler = pipe.sampler(config, options.workers);
  const auto surface = draw_surface(config, sampler);
  const int top = config.p_max + 1;
  std::vector<Eigen::VectorXcd> direct(top + 1), via(top + 1);
  std::vector<int> dofs(top + 1);
  for (int p = 0; p <= top; ++p) {
    const auto t0 = Clock::now();
    const mlmc::BemSolution sol = sampler.solve(surface, p);
    dofs[p] = sol.disc->num_dofs();
    direct[p] = direct_values(sol, config.kappa, pipe.eval_points, options.workers);
    via[p] = interface_values(*pipe.iface, sampler.cauchy(sol), config.kappa, pipe.eval_points, options.workers);
    log(options, "bem-convergence: p = " + std::to_string(p) + ", " + std::to_string(dofs[p]) + " dofs, " +
                     brief(seconds_since(t0)) + " s");
  }
  std::vector<ConvergenceRow> rows;
  for (int p = 0; p <= top; ++p) {
    rows.push_back({p, dofs[p], (direct[p] - direct[top]).cwiseAbs().maxCoeff(),
                    (via[p] - via[top]).cwiseAbs().maxCoeff()});
  }
  {
    CsvWriter csv(dir / "bem_convergence.csv", "p,dofs,error_direct,error_interface");
    for (const ConvergenceRow& r : rows) csv.row(r.degree, r.dofs, r.error_direct, r.error_interface);
  }
  write_manifest("bem-convergence", config, options, {"bem_convergence.csv"});
  return rows;
}

MLMCReport cmd_mlmc(const RunConfig& config, const CommandOptions& options) {
  const fs::path dir = output_dir(options);
  const Pipeline pipe = build_pipeline(config, options, config.alpha > 0.0);
  // Parallelism goes across samples; a single evaluation stays serial.
  const mlmc::BemSampler sampler = pipe.sampler(config, 1);
  const int P = config.max_degree;
  const int pilot_top = config.reference ? P + 1 : P;
  const int n_points = static_cast<int>(pipe.eval_points.size());
  MLMCReport r;

  auto t0 = Clock::now();
  r.pilot = mlmc::pilot_estimate(sampler, pilot_top, config.pilot, config.seed, options.workers);
  r.seconds_pilot = seconds_since(t0);
  for (const mlmc::LevelStats& s : r.pilot) {
    log(options, "pilot: p = " + std::to_string(s.degree) + ", cost " + brief(s.cost) + ", variance " +
                     brief(s.variance) + ", " + brief(s.seconds) + " s per sample");
  }

  const mlmc::MLMCPlan plan = make_plan(config, r.pilot, P + 1);
  r.run = campaign_levels(plan);

  // Prefix sums of the propagated level contributions give every truncated
  // estimator without storing the interface moments per level.
  std::vector<interface::PropagatedMoments> prefix;
  auto collect = [&](std::vector<interface::PropagatedMoments>& sums) {
    return [&](int degree, const interface::InterfaceMoments& contribution) {
      interface::PropagatedMoments m =
          interface::propagate(*pipe.iface, contribution, config.kappa, pipe.eval_points, options.workers);
      if (!sums.empty()) add_to(m, sums.back());
      sums.push_back(std::move(m));
      log(options, "level " + std::to_string(degree) + " done");
    };
  };
  t0 = Clock::now();
  const mlmc::MLMCResult run =
      mlmc::mlmc_run(sampler, plan, config.seed, {options.workers, mlmc::kRunDomain}, collect(prefix));
  r.seconds_run = seconds_since(t0);
  r.propagated = prefix.empty() ? zero_propagated(n_points) : prefix.back();
  log(options, "run: " + brief(r.seconds_run) + " s");

  std::vector<std::string> files = {"mlmc_pilot.csv", "mlmc_levels.csv", "moments.bin", "mlmc_mean_interface.csv",
                                    "mlmc_points.csv", "mlmc_correlation.csv"};
  {
    CsvWriter csv(dir / "mlmc_pilot.csv", "p,cost,variance");
    for (const mlmc::LevelStats& s : r.pilot) csv.row(s.degree, s.cost, s.variance);
  }
  write_levels(dir / "mlmc_levels.csv", r.run);
  interface::save_moments(run.moments, (dir / "moments.bin").string());
  interface::write_interface_csv(*pipe.iface, run.moments.mean_value(), (dir / "mlmc_mean_interface.csv").string());
  write_points(dir / "mlmc_points.csv", pipe.eval_points, r.propagated);
  write_correlation(dir / "mlmc_correlation.csv", r.propagated);

  if (config.reference) {
    const mlmc::MLMCPlan ref_plan = make_plan(config, r.pilot, P + 2);
    r.reference = campaign_levels(ref_plan);
    std::vector<interface::PropagatedMoments> ref_prefix;
    t0 = Clock::now();
    mlmc::mlmc_run(sampler, ref_plan, config.seed, {options.workers, mlmc::kReferenceDomain}, collect(ref_prefix));
    r.seconds_reference = seconds_since(t0);
    log(options, "reference: " + brief(r.seconds_reference) + " s");
    const interface::PropagatedMoments& ref = ref_prefix.back();
    for (int p = 0; p <= P; ++p) r.errors.push_back({p, mlmc::compare_propagated(prefix[p], ref)});

    write_levels(dir / "mlmc_reference_levels.csv", r.reference);
    write_points(dir / "mlmc_reference_points.csv", pipe.eval_points, ref);
    CsvWriter csv(dir / "mlmc_errors.csv", "P,error_mean,error_correlation");
    for (const TruncationError& e : r.errors) csv.row(e.degree, e.error.mean, e.error.correlation);
    files.insert(files.end(), {"mlmc_reference_levels.csv", "mlmc_reference_points.csv", "mlmc_errors.csv"});
  }
  {
    // Timings vary between runs, so they stay out of the manifest.
    nlohmann::ordered_json t;
    t["pilot_seconds"] = r.seconds_pilot;
    t["run_seconds"] = r.seconds_run;
    t["reference_seconds"] = r.seconds_reference;
    t["workers"] = options.workers;
    std::ofstream(dir / "timing.json") << t.dump(2) << '\n';
  }
  write_manifest("mlmc", config, options, files);
  return r;
}

void write_manifest(const std::string& command, const RunConfig& config, const CommandOptions& options,
                    const std::vector<std::string>& files) {
  const fs::path dir = output_dir(options);
  nlohmann::ordered_json m;
  m["command"] = command;
  m["version"] = kVersion;
  m["config_hash"] = config.hash();
  m["seed"] = config.seed;
  nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
  std::stringstream ss(config.canonical());
  for (std::string line; std::getline(ss, line);) {
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) continue;
    std::string value = line.substr(eq + 3);
    if (value.size() >= 2 && value.front() == '"') value = value.substr(1, value.size() - 2);
    cfg[line.substr(0, eq)] = value;
  }
  m["config"] = cfg;
  m["compiler"] = __VERSION__;
  m["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
               std::to_string(EIGEN_MINOR_VERSION);
  m["simd"] = simd::isa_name(simd::active_isa());
  nlohmann::ordered_json hashes = nlohmann::ordered_json::object();
  for (const std::string& f : files) hashes[f] = sha256_hex(read_file(dir / f));
  m["files"] = hashes;
  std::ofstream out(dir / "manifest.json", std::ios::binary);
  if (!out) throw Error("cannot write manifest in '" + dir.string() + "'");
  out << m.dump(2) << '\n';
}

}  // namespace roughscat::cli
