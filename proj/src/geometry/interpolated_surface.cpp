#include "roughscat/geometry/interpolated_surface.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace roughscat::geometry {

namespace {

// Cardinal weights are small; a fixed stack buffer avoids allocation in the
// hot evaluation path.
constexpr int kMaxNodes = 64;

// The nodal values of a patch, read column-major as a (3 n1) x n1 matrix W,
// satisfy W(3 ks + c, kt) = x_c(s_ks, t_kt).  Contracting with the t basis
// first leaves a 3 x n1 matrix that is then contracted with the s basis.  The
// products are tiny, so plain loops beat a BLAS call.
void contract_t(const double* w, int n1, const double* l, double* out) {
  const int rows = 3 * n1;
  std::fill(out, out + rows, 0.0);
  for (int kt = 0; kt < n1; ++kt) {
    const double c = l[kt];
    const double* col = w + rows * kt;
    for (int r = 0; r < rows; ++r) out[r] += c * col[r];
  }
}

Vec3 contract_s(const double* a, int n1, const double* l) {
  double x = 0.0, y = 0.0, z = 0.0;
  for (int ks = 0; ks < n1; ++ks) {
    x += l[ks] * a[3 * ks];
    y += l[ks] * a[3 * ks + 1];
    z += l[ks] * a[3 * ks + 2];
  }
  return {x, y, z};
}

}  // namespace

InterpolatedSurface::InterpolatedSurface(ChebyshevGrid grid, std::vector<std::vector<Vec3>> nodal,
                                         std::vector<int> orientation)
    : grid_(std::move(grid)), orientation_(std::move(orientation)) {
  const int n1 = grid_.size();
  if (n1 > kMaxNodes) throw InvalidArgument("InterpolatedSurface: interpolation degree too large");
  if (orientation_.size() != nodal.size()) {
    throw InvalidArgument("InterpolatedSurface: orientation flags do not match patch count");
  }
  diff_ = differentiation_matrix(grid_);
  // diff_t_[k + n1 i] = D(i, k): row i of D contiguous.
  diff_t_.resize(n1 * n1);
  for (int i = 0; i < n1; ++i) {
    for (int k = 0; k < n1; ++k) diff_t_[k + n1 * i] = diff_(i, k);
  }
  nodal_.reserve(nodal.size());
  for (const auto& patch : nodal) {
    if (static_cast<int>(patch.size()) != n1 * n1) {
      throw InvalidArgument("InterpolatedSurface: nodal grid does not match the Chebyshev grid");
    }
    Eigen::Matrix3Xd m(3, n1 * n1);
    for (int k = 0; k < n1 * n1; ++k) {
      if (!patch[k].allFinite()) throw InvalidArgument("InterpolatedSurface: non-finite nodal value");
      m.col(k) = patch[k];
    }
    nodal_.push_back(std::move(m));
  }
}


Vec3 InterpolatedSurface::eval(int patch, double s, double t) const {
  const int n1 = grid_.size();
  std::array<double, kMaxNodes> ls, lt;
  std::array<double, 3 * kMaxNodes> a;
  bary_basis(grid_, s, std::span<double>(ls.data(), n1));
  bary_basis(grid_, t, std::span<double>(lt.data(), n1));
  contract_t(nodal_[patch].data(), n1, lt.data(), a.data());
  return contract_s(a.data(), n1, ls.data());
}

SurfaceFrame InterpolatedSurface::frame(int patch, double s, double t) const {
  const int n1 = grid_.size();
  std::array<double, kMaxNodes> ls, lt, dls, dlt;
  std::array<double, 3 * kMaxNodes> a, b;
  bary_basis(grid_, s, std::span<double>(ls.data(), n1));
  bary_basis(grid_, t, std::span<double>(lt.data(), n1));
  // Derivative of the interpolant: evaluate D f barycentrically, i.e. use D^T l.
  std::fill(dls.begin(), dls.begin() + n1, 0.0);
  std::fill(dlt.begin(), dlt.begin() + n1, 0.0);
  for (int i = 0; i < n1; ++i) {
    for (int k = 0; k < n1; ++k) {
      dls[k] += ls[i] * diff_t_[k + n1 * i];
      dlt[k] += lt[i] * diff_t_[k + n1 * i];
    }
  }
  const double* w = nodal_[patch].data();
  contract_t(w, n1, lt.data(), a.data());
  contract_t(w, n1, dlt.data(), b.data());
  const Vec3 x = contract_s(a.data(), n1, ls.data());
  const Vec3 xs = contract_s(a.data(), n1, dls.data());
  const Vec3 xt = contract_s(b.data(), n1, ls.data());
  const Vec3 cross = xs.cross(xt);
  const double area = cross.norm();
  if (!(area >= 1e-12)) {
    throw NumericalError("degenerate surface tangents on patch " + std::to_string(patch));
  }
  return {x, xs, xt, (orientation_[patch] / area) * cross, area};
}

std::vector<SurfaceFrame> InterpolatedSurface::frames(int patch, std::span<const double> s,
                                                     std::span<const double> t) const {
  if (s.size() != t.size()) throw InvalidArgument("InterpolatedSurface::frames: parameter lists differ in length");
  const int n1 = grid_.size();
  const int np = static_cast<int>(s.size());
  Eigen::MatrixXd ls(n1, np), lt(n1, np);
  for (int k = 0; k < np; ++k) {
    bary_basis(grid_, s[k], std::span<double>(ls.col(k).data(), n1));
    bary_basis(grid_, t[k], std::span<double>(lt.col(k).data(), n1));
  }
  const Eigen::MatrixXd dls = diff_.transpose() * ls;
  const Eigen::MatrixXd dlt = diff_.transpose() * lt;
  const Eigen::Map<const Eigen::MatrixXd> w(nodal_[patch].data(), 3 * n1, n1);
  const Eigen::MatrixXd a = w * lt, b = w * dlt;
  std::vector<SurfaceFrame> out(np);
  for (int k = 0; k < np; ++k) {
    const Vec3 x = contract_s(a.col(k).data(), n1, ls.col(k).data());
    const Vec3 xs = contract_s(a.col(k).data(), n1, dls.col(k).data());
    const Vec3 xt = contract_s(b.col(k).data(), n1, ls.col(k).data());
    const Vec3 cross = xs.cross(xt);
    const double area = cross.norm();
    if (!(area >= 1e-12)) {
      throw NumericalError("degenerate surface tangents on patch " + std::to_string(patch));
    }
    out[k] = {x, xs, xt, (orientation_[patch] / area) * cross, area};
  }
  return out;
}

double InterpolatedSurface::max_abs_coordinate() const {
  double m = 0.0;
  for (const auto& v : nodal_) m = std::max(m, v.cwiseAbs().maxCoeff());
  return m;
}

InterpolatedSurface surface_from_nodal(const LandmarkSet& landmarks, const std::vector<std::vector<Vec3>>& nodal) {
  if (static_cast<int>(nodal.size()) != landmarks.num_patches()) {
    throw InvalidArgument("surface_from_nodal: patch count mismatch");
  }
  std::vector<Vec3> first(landmarks.count());
  std::vector<bool> seen(landmarks.count(), false);
  for (int p = 0; p < landmarks.num_patches(); ++p) {
    if (static_cast<int>(nodal[p].size()) != landmarks.nodes_per_patch()) {
      throw InvalidArgument("surface_from_nodal: nodal grid does not conform to the landmark grid");
    }
    for (int k = 0; k < landmarks.nodes_per_patch(); ++k) {
      const int id = landmarks.global_id[p][k];
      if (!seen[id]) {
        seen[id] = true;
        first[id] = nodal[p][k];
      } else if ((first[id] - nodal[p][k]).norm() > kLandmarkMergeTolerance) {
        throw InvalidArgument("surface_from_nodal: shared landmark " + std::to_string(id) +
                              " has mismatching values (surface would be discontinuous)");
      }
    }
  }
  return InterpolatedSurface(landmarks.grid, nodal, landmarks.orientation);
}

InterpolatedSurface surface_from_global(const LandmarkSet& landmarks, const std::vector<Vec3>& global_points) {
  if (static_cast<int>(global_points.size()) != landmarks.count()) {
    throw InvalidArgument("surface_from_global: expected one point per landmark");
  }
  std::vector<std::vector<Vec3>> nodal(landmarks.num_patches());
  for (int p = 0; p < landmarks.num_patches(); ++p) {
    nodal[p].reserve(landmarks.nodes_per_patch());
    for (int id : landmarks.global_id[p]) nodal[p].push_back(global_points[id]);
  }
  return InterpolatedSurface(landmarks.grid, std::move(nodal), landmarks.orientation);
}

}  // namespace roughscat::geometry
