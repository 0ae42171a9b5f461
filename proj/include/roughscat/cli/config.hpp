#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "roughscat/common.hpp"
#include "roughscat/geometry/multipatch.hpp"
#include "roughscat/randfield/covariance.hpp"

namespace roughscat::cli {

/// Everything a command needs besides worker count and output directory.
/// Defaults reproduce the torus experiment at desk scale.
struct RunConfig {
  // Geometry: "torus", "sphere", "cuboid" or a multipatch file path.
  std::string geometry = "torus";
  double radius = 1.0;          // sphere
  double major_radius = 0.75;   // torus
  double minor_radius = 0.25;   // torus
  double half_width = 0.5;      // cuboid
  int q = 10;                   // landmark interpolation degree

  // Covariance: diagonal entries amplitude * k_nu(scale r), off-diagonal
  // entries likewise with their own parameters.
  double diag_nu = 1.5, diag_scale = 20.0, diag_amplitude = 1.0;
  double offdiag_nu = kInf, offdiag_scale = 4.0, offdiag_amplitude = 1e-4;
  double cholesky_tol = 1e-3;

  double alpha = 0.07;
  double kappa = 5.0;
  Vec3 direction = Vec3::UnitX();

  double interface_half_width = 2.0;
  int interface_grid = 9;

  int eval_points = 100;
  double eval_radius = 5.0;

  // solve / bem-convergence
  std::int64_t sample = 0;  // -1: the undeformed surface (y = 0)
  int degree = 2;
  int p_max = 4;

  // mlmc
  int max_degree = 3;
  int pilot = 64;
  std::int64_t finest_samples = 128;  // N_P anchoring when epsilon == 0
  double epsilon = 0.0;               // tolerance anchoring when > 0
  bool reference = true;              // run the (P+1)-anchored reference

  std::uint64_t seed = 1;
  std::string kl_cache;  // directory for cached KL bases; empty: output directory

  static constexpr double kInf = std::numeric_limits<double>::infinity();

  /// Throws InvalidArgument unless every physical parameter is positive and
  /// the counts are usable.  Normalizes `direction`.
  void validate();

  [[nodiscard]] geometry::MultiPatchSurface surface() const;
  [[nodiscard]] randfield::CovarianceModel covariance() const;

  /// Canonical "key = value" listing of every field, one per line, in a
  /// fixed order with round-trip precision.  Equal configs give equal text.
  [[nodiscard]] std::string canonical() const;
  /// Hex SHA-256 of canonical().
  [[nodiscard]] std::string hash() const;
  /// Hex SHA-256 of the fields that determine the KL basis.
  [[nodiscard]] std::string kl_hash() const;
};

/// Sets one field from its textual key and value.  Unknown keys and
/// malformed values raise InvalidArgument naming the key.
void set_field(RunConfig& config, const std::string& key, const std::string& value);

/// TOML-style subset: "key = value" lines, "# comments", "[section]"
/// headers prefixing keys with "section.", optional double quotes around
/// strings and "[x, y, z]" for vectors.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Applies "key=value" overrides in order.
void apply_overrides(RunConfig& config, const std::vector<std::string>& assignments);

/// Hex SHA-256 digest of a byte string.
std::string sha256_hex(const std::string& bytes);

}  // namespace roughscat::cli
