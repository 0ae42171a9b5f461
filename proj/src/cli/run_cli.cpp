#include <cstdio>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "roughscat/cli/commands.hpp"

namespace roughscat::cli {

namespace {

struct Flags {
  std::string config;
  std::vector<std::string> set;
  std::optional<std::uint64_t> seed;
  int workers = 1;
  std::string out = "out";
  bool quiet = false;
};

void add_common(CLI::App& app, Flags& f) {
  app.add_option("--config", f.config, "Configuration file (key = value lines)");
  app.add_option("--set", f.set, "Override one key: --set key=value (repeatable)");
  app.add_option("--seed", f.seed, "Base seed (overrides the config)");
  app.add_option("--workers", f.workers, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", f.out, "Output directory");
  app.add_flag("--quiet", f.quiet, "No progress or summary lines");
}

RunConfig resolve(const Flags& f) {
  RunConfig c = f.config.empty() ? RunConfig{} : load_config(f.config);
  apply_overrides(c, f.set);
  if (f.seed) c.seed = *f.seed;
  c.validate();
  return c;
}

CommandOptions command_options(const Flags& f) {
  CommandOptions o;
  o.out = f.out;
  o.workers = f.workers;
  if (!f.quiet) o.log = [](const std::string& line) { std::cerr << line << '\n'; };
  return o;
}

bool g_quiet = false;

void print_kv(const char* key, double value) {
  if (!g_quiet) std::printf("%s %.6g\n", key, value);
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Uncertainty quantification for acoustic scattering from random rough obstacles"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  Flags f;
  std::optional<std::int64_t> sample;
  std::optional<int> degree, p_max, max_degree;

  CLI::App* kl = app.add_subcommand("kl", "KL spectrum of the landmark covariance; caches the basis");
  add_common(*kl, f);
  CLI::App* solve = app.add_subcommand("solve", "Scattered field of one realization");
  add_common(*solve, f);
  solve->add_option("--sample", sample, "Realization index (-1: undeformed)");
  solve->add_option("--degree", degree, "Polynomial degree p");
  CLI::App* conv = app.add_subcommand("bem-convergence", "Potential error against degree for one realization");
  add_common(*conv, f);
  conv->add_option("--sample", sample, "Realization index (-1: undeformed)");
  conv->add_option("--p-max", p_max, "Largest reported degree; the reference uses p_max + 1");
  CLI::App* mlmc = app.add_subcommand("mlmc", "Multilevel campaign with reference comparison");
  add_common(*mlmc, f);
  mlmc->add_option("--max-degree", max_degree, "Finest degree P");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    RunConfig c = resolve(f);
    if (sample) c.sample = *sample;
    if (degree) c.degree = *degree;
    if (p_max) c.p_max = *p_max;
    if (max_degree) c.max_degree = *max_degree;
    c.validate();
    const CommandOptions o = command_options(f);
    g_quiet = f.quiet;
    if (kl->parsed()) {
      const KLReport r = cmd_kl(c, o);
      if (!g_quiet) std::printf("rank %d\n", r.rank);
      print_kv("slope", r.slope);
    } else if (solve->parsed()) {
      const SolveReport r = cmd_solve(c, o);
      print_kv("max_direct_interface_difference", (r.direct - r.interface).cwiseAbs().maxCoeff());
    } else if (conv->parsed()) {
      for (const ConvergenceRow& r : cmd_bem_convergence(c, o)) {
        if (!g_quiet) std::printf("p %d error_direct %.6g error_interface %.6g\n", r.degree, r.error_direct, r.error_interface);
      }
    } else if (mlmc->parsed()) {
      const MLMCReport r = cmd_mlmc(c, o);
      for (const CampaignLevel& l : r.run) {
        if (!g_quiet) std::printf("p %d N %lld\n", l.degree, static_cast<long long>(l.samples));
      }
      for (const TruncationError& e : r.errors) {
        if (!g_quiet) std::printf("P %d error_mean %.6g error_correlation %.6g\n", e.degree, e.error.mean, e.error.correlation);
      }
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

}  // namespace roughscat::cli
