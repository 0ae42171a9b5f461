#include "roughscat/geometry/landmarks.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <unordered_map>

namespace roughscat::geometry {

namespace {

struct CellKey {
  std::int64_t x, y, z;
  bool operator==(const CellKey&) const = default;
};

struct CellHash {
  std::size_t operator()(const CellKey& k) const noexcept {
    std::uint64_t h = static_cast<std::uint64_t>(k.x) * 0x9E3779B97F4A7C15ULL;
    h ^= static_cast<std::uint64_t>(k.y) * 0xC2B2AE3D27D4EB4FULL + (h << 6) + (h >> 2);
    h ^= static_cast<std::uint64_t>(k.z) * 0x165667B19E3779F9ULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

}  // namespace

std::vector<std::vector<int>> deduplicate_points(const std::vector<std::vector<Vec3>>& local, double tol,
                                                 std::vector<Vec3>& representatives) {
  // Cells are much larger than tol, so any match lies in a neighbouring cell.
  const double cell = std::max(1e3 * tol, 1e-12);
  std::unordered_map<CellKey, std::vector<int>, CellHash> buckets;
  representatives.clear();
  std::vector<std::vector<int>> ids(local.size());
  auto key_of = [&](const Vec3& p) {
    return CellKey{static_cast<std::int64_t>(std::floor(p.x() / cell)),
                   static_cast<std::int64_t>(std::floor(p.y() / cell)),
                   static_cast<std::int64_t>(std::floor(p.z() / cell))};
  };
  for (std::size_t patch = 0; patch < local.size(); ++patch) {
    ids[patch].reserve(local[patch].size());
    for (const Vec3& p : local[patch]) {
      const CellKey key = key_of(p);
      int found = -1;
      for (std::int64_t dx = -1; dx <= 1 && found < 0; ++dx) {
        for (std::int64_t dy = -1; dy <= 1 && found < 0; ++dy) {
          for (std::int64_t dz = -1; dz <= 1 && found < 0; ++dz) {
            auto it = buckets.find({key.x + dx, key.y + dy, key.z + dz});
            if (it == buckets.end()) continue;
            for (int id : it->second) {
              if ((representatives[id] - p).norm() < tol) {
                found = id;
                break;
              }
            }
          }
        }
      }
      if (found < 0) {
        found = static_cast<int>(representatives.size());
        representatives.push_back(p);
        buckets[key].push_back(found);
      }
      ids[patch].push_back(found);
    }
  }
  return ids;
}

LandmarkSet build_landmarks(const MultiPatchSurface& surface, int q) {
  LandmarkSet set;
  set.grid = chebyshev_grid(q);
  set.orientation = surface.orientation;
  const int n1 = set.grid.size();
  set.local_points.resize(surface.size());
  for (int i = 0; i < surface.size(); ++i) {
    auto& pts = set.local_points[i];
    pts.reserve(n1 * n1);
    for (int kt = 0; kt < n1; ++kt) {
      for (int ks = 0; ks < n1; ++ks) {
        pts.push_back(surface.patches[i].eval(set.grid.nodes[ks], set.grid.nodes[kt]));
      }
    }
  }
  set.global_id = deduplicate_points(set.local_points, kLandmarkMergeTolerance, set.points);
  return set;
}

}  // namespace roughscat::geometry
