#pragma once

#include <vector>

#include "roughscat/geometry/chebyshev.hpp"
#include "roughscat/geometry/multipatch.hpp"

namespace roughscat::geometry {

/// Absolute distance under which two mapped nodes are the same landmark.
inline constexpr double kLandmarkMergeTolerance = 1e-9;

/// Per-patch tensor grids of mapped Chebyshev nodes and their deduplicated
/// global numbering.  Local node (k, k'), k along s, is stored at k + (q+1) k'.
struct LandmarkSet {
  ChebyshevGrid grid;
  std::vector<std::vector<Vec3>> local_points;
  std::vector<std::vector<int>> global_id;
  std::vector<Vec3> points;  // one entry per global id
  std::vector<int> orientation;

  [[nodiscard]] int num_patches() const { return static_cast<int>(local_points.size()); }
  [[nodiscard]] int count() const { return static_cast<int>(points.size()); }
  [[nodiscard]] int nodes_per_patch() const { return grid.size() * grid.size(); }
};

LandmarkSet build_landmarks(const MultiPatchSurface& surface, int q);

/// Assigns global ids to `local` points, merging points closer than `tol`.
/// Returns per-patch ids and fills the representative point list.
std::vector<std::vector<int>> deduplicate_points(const std::vector<std::vector<Vec3>>& local, double tol,
                                                 std::vector<Vec3>& representatives);

}  // namespace roughscat::geometry
