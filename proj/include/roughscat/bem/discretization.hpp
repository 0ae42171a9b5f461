#pragma once

#include <memory>
#include <span>
#include <vector>

#include "roughscat/geometry/chebyshev.hpp"
#include "roughscat/geometry/interpolated_surface.hpp"

namespace roughscat::bem {

/// Every patch is split into 2 x 2 elements of parameter width 1/2.
inline constexpr int kElementsPerDirection = 2;
inline constexpr double kElementWidth = 1.0 / kElementsPerDirection;
inline constexpr int kMaxDegree = 32;

/// An element is the sub-square [s0, s0 + 1/2] x [t0, t0 + 1/2] of a patch.
/// Local coordinates (u, v) in [0,1]^2 map to s = s0 + u / 2, t = t0 + v / 2.
struct Element {
  int patch = 0;
  int ix = 0;  // position within the patch, 0 or 1
  int iy = 0;
  [[nodiscard]] double s0() const { return ix * kElementWidth; }
  [[nodiscard]] double t0() const { return iy * kElementWidth; }
};

/// Frame in local element coordinates: du, dv are derivatives with respect
/// to (u, v) and `jacobian` is |du x dv|.
struct LocalFrame {
  Vec3 point;
  Vec3 du;
  Vec3 dv;
  Vec3 normal;
  double jacobian;
};

/// Discontinuous per-element tensor Lagrange basis of degree p on
/// first-kind Chebyshev nodes, collocated at the nodes.
///
/// Degree-of-freedom layout: dof(e, a, b) = e (p+1)^2 + a + (p+1) b, where a
/// indexes the u direction.
class BoundaryDiscretization {
 public:
  /// Throws InvalidArgument for p < 0 and NumericalError when two
  /// collocation points coincide or an element is degenerate.
  BoundaryDiscretization(std::shared_ptr<const geometry::InterpolatedSurface> surface, int degree);

  [[nodiscard]] const geometry::InterpolatedSurface& surface() const { return *surface_; }
  [[nodiscard]] std::shared_ptr<const geometry::InterpolatedSurface> surface_ptr() const { return surface_; }
  [[nodiscard]] int degree() const { return degree_; }
  [[nodiscard]] const geometry::ChebyshevGrid& nodes() const { return nodes_; }

  [[nodiscard]] int num_elements() const { return static_cast<int>(elements_.size()); }
  [[nodiscard]] const Element& element(int e) const { return elements_[e]; }
  [[nodiscard]] int dofs_per_element() const { return (degree_ + 1) * (degree_ + 1); }
  [[nodiscard]] int num_dofs() const { return num_elements() * dofs_per_element(); }
  [[nodiscard]] int dof(int e, int a, int b) const { return e * dofs_per_element() + a + (degree_ + 1) * b; }

  [[nodiscard]] int element_of(int dof) const { return dof / dofs_per_element(); }
  /// Local coordinates of the collocation node of `dof`.
  [[nodiscard]] double node_u(int dof) const { return nodes_.nodes[(dof % dofs_per_element()) % (degree_ + 1)]; }
  [[nodiscard]] double node_v(int dof) const { return nodes_.nodes[(dof % dofs_per_element()) / (degree_ + 1)]; }

  [[nodiscard]] const Vec3& point(int dof) const { return points_[dof]; }
  [[nodiscard]] const Vec3& normal(int dof) const { return normals_[dof]; }
  [[nodiscard]] const LocalFrame& collocation_frame(int dof) const { return frames_[dof]; }

  /// Frame of element e at local coordinates (u, v).
  [[nodiscard]] LocalFrame local_frame(int e, double u, double v) const;
  /// local_frame() at many local parameters of element e.
  [[nodiscard]] std::vector<LocalFrame> local_frames(int e, std::span<const double> u, std::span<const double> v) const;

  /// Basis values at local coordinates: out[a + (p+1) b] = l_a(u) l_b(v).
  void basis(double u, double v, std::span<double> out) const;

 private:
  std::shared_ptr<const geometry::InterpolatedSurface> surface_;
  int degree_;
  geometry::ChebyshevGrid nodes_;
  std::vector<Element> elements_;
  std::vector<LocalFrame> frames_;
  std::vector<Vec3> points_;
  std::vector<Vec3> normals_;
};

}  // namespace roughscat::bem
