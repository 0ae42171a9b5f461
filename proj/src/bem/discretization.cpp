#include "roughscat/bem/discretization.hpp"

#include <algorithm>
#include <array>
#include <numeric>

namespace roughscat::bem {

namespace {

// Collocation points closer than this are treated as coincident.
constexpr double kDistinctTolerance = 1e-12;

void check_distinct(const std::vector<Vec3>& points) {
  std::vector<int> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return points[a].x() < points[b].x(); });
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      if (points[order[j]].x() - points[order[i]].x() > kDistinctTolerance) break;
      if ((points[order[j]] - points[order[i]]).norm() <= kDistinctTolerance) {
        throw NumericalError("BoundaryDiscretization: collocation points " + std::to_string(order[i]) + " and " +
                             std::to_string(order[j]) + " coincide");
      }
    }
  }
}

}  // namespace

BoundaryDiscretization::BoundaryDiscretization(std::shared_ptr<const geometry::InterpolatedSurface> surface,
                                               int degree)
    : surface_(std::move(surface)), degree_(degree) {
  if (!surface_) throw InvalidArgument("BoundaryDiscretization: null surface");
  if (degree_ < 0 || degree_ > kMaxDegree) {
    throw InvalidArgument("BoundaryDiscretization: degree must lie in [0, " + std::to_string(kMaxDegree) + "]");
  }
  nodes_ = geometry::chebyshev_first_kind_grid(degree_);
  for (int p = 0; p < surface_->num_patches(); ++p) {
    for (int iy = 0; iy < kElementsPerDirection; ++iy) {
      for (int ix = 0; ix < kElementsPerDirection; ++ix) elements_.push_back({p, ix, iy});
    }
  }
  const int n1 = degree_ + 1;
  frames_.reserve(num_dofs());
  for (int e = 0; e < num_elements(); ++e) {
    for (int b = 0; b < n1; ++b) {
      for (int a = 0; a < n1; ++a) frames_.push_back(local_frame(e, nodes_.nodes[a], nodes_.nodes[b]));
    }
  }
  points_.reserve(frames_.size());
  normals_.reserve(frames_.size());
  for (const auto& f : frames_) {
    points_.push_back(f.point);
    normals_.push_back(f.normal);
  }
  check_distinct(points_);
}

LocalFrame BoundaryDiscretization::local_frame(int e, double u, double v) const {
  const Element& el = elements_[e];
  const auto f = surface_->frame(el.patch, el.s0() + kElementWidth * u, el.t0() + kElementWidth * v);
  return {f.point, kElementWidth * f.ds, kElementWidth * f.dt, f.normal, kElementWidth * kElementWidth * f.area};
}

std::vector<LocalFrame> BoundaryDiscretization::local_frames(int e, std::span<const double> u,
                                                             std::span<const double> v) const {
  const Element& el = elements_[e];
  std::vector<double> s(u.size()), t(v.size());
  for (std::size_t k = 0; k < u.size(); ++k) s[k] = el.s0() + kElementWidth * u[k];
  for (std::size_t k = 0; k < v.size(); ++k) t[k] = el.t0() + kElementWidth * v[k];
  const auto f = surface_->frames(el.patch, s, t);
  std::vector<LocalFrame> out;
  out.reserve(f.size());
  for (const auto& g : f) {
    out.push_back({g.point, kElementWidth * g.ds, kElementWidth * g.dt, g.normal, kElementWidth * kElementWidth * g.area});
  }
  return out;
}

void BoundaryDiscretization::basis(double u, double v, std::span<double> out) const {
  const int n1 = degree_ + 1;
  std::array<double, 64> lu{}, lv{};
  geometry::bary_basis(nodes_, u, std::span<double>(lu.data(), n1));
  geometry::bary_basis(nodes_, v, std::span<double>(lv.data(), n1));
  for (int b = 0; b < n1; ++b) {
    for (int a = 0; a < n1; ++a) out[a + n1 * b] = lu[a] * lv[b];
  }
}

}  // namespace roughscat::bem
