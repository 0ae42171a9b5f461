#pragma once

#include <string>
#include <vector>

#include "roughscat/geometry/patch.hpp"

namespace roughscat::geometry {

/// Edges of the unit square, each traversed by a parameter tau in [0,1]:
/// 0: (tau, 0), 1: (1, tau), 2: (tau, 1), 3: (0, tau).
enum class Edge : int { kBottom = 0, kRight = 1, kTop = 2, kLeft = 3 };

/// Parameter point on `edge` at position tau.
std::pair<double, double> edge_point(int edge, double tau);

/// Patch `patch` edge `edge` coincides with `other_patch` edge `other_edge`;
/// if `reversed`, tau on one side maps to 1 - tau on the other.
struct EdgeLink {
  int patch = 0;
  int edge = 0;
  int other_patch = 0;
  int other_edge = 0;
  bool reversed = false;

  bool operator==(const EdgeLink&) const = default;
};

struct MultiPatchSurface {
  std::vector<PatchMap> patches;
  std::vector<EdgeLink> adjacency;
  /// +1 if ds x dt points outward on patch i, -1 otherwise.
  std::vector<int> orientation;

  [[nodiscard]] int size() const { return static_cast<int>(patches.size()); }

  /// Checks immersion of every patch and that every declared shared edge
  /// matches within 1e-10 at 10 uniformly spaced parameters.
  void validate() const;
};

/// Finds all pairs of coinciding edges by sampling (tolerance `tol`).
std::vector<EdgeLink> detect_adjacency(const std::vector<PatchMap>& patches, double tol = 1e-10);

/// Orientation flags making ds x dt point away from `anchors[i]` at each patch centre.
std::vector<int> orient_from_anchors(const std::vector<PatchMap>& patches, const std::vector<Vec3>& anchors);

/// Torus with major radius R and minor radius r (R > r > 0), exact rational
/// quadratic patches: four arcs in each angle, 16 patches.
MultiPatchSurface make_torus(double major_radius, double minor_radius);

/// Sphere as six projected cube faces.
MultiPatchSurface make_sphere(double radius, const Vec3& center = Vec3::Zero());

/// Axis-aligned cube [-h,h]^3 with every face split 2x2: 24 bilinear patches.
MultiPatchSurface make_cuboid(double half_width);

/// Builds "torus", "sphere" or "cuboid" from a parameter list
/// (torus: R r; sphere: R; cuboid: half-width).  Empty params take defaults.
MultiPatchSurface builtin_surface(const std::string& name, const std::vector<double>& params = {});

/// Plain-text multipatch geometry (see README for the format).
MultiPatchSurface read_multipatch(const std::string& path);
MultiPatchSurface parse_multipatch(const std::string& text);
std::string format_multipatch(const MultiPatchSurface& surface);

}  // namespace roughscat::geometry
