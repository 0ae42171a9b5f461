#include "roughscat/geometry/patch.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace roughscat::geometry {

namespace {

void validate_knots(const std::vector<double>& knots, int degree, const char* which) {
  const std::string name(which);
  if (degree < 0) throw InvalidArgument("NURBS: negative degree in " + name);
  if (static_cast<int>(knots.size()) < 2 * (degree + 1)) {
    throw InvalidArgument("NURBS: too few knots in " + name);
  }
  for (std::size_t i = 1; i < knots.size(); ++i) {
    if (knots[i] < knots[i - 1]) throw InvalidArgument("NURBS: knots not nondecreasing in " + name);
  }
  if (knots.front() != 0.0 || knots.back() != 1.0) {
    throw InvalidArgument("NURBS: knots must start at 0 and end at 1 in " + name);
  }
  for (int i = 0; i <= degree; ++i) {
    if (knots[i] != 0.0 || knots[knots.size() - 1 - i] != 1.0) {
      throw InvalidArgument("NURBS: knot vector is not open (end multiplicity degree+1) in " + name);
    }
  }
}

}  // namespace

int bspline_basis(const std::vector<double>& knots, int degree, double x, std::vector<double>& basis) {
  const int n_ctrl = static_cast<int>(knots.size()) - degree - 1;
  // Last nonempty span for x == 1.
  int span = degree;
  if (x >= knots[n_ctrl]) {
    span = n_ctrl - 1;
  } else {
    span = static_cast<int>(std::upper_bound(knots.begin(), knots.end(), x) - knots.begin()) - 1;
    span = std::clamp(span, degree, n_ctrl - 1);
  }
  basis.assign(degree + 1, 0.0);
  std::vector<double> left(degree + 1), right(degree + 1);
  basis[0] = 1.0;
  for (int j = 1; j <= degree; ++j) {
    left[j] = x - knots[span + 1 - j];
    right[j] = knots[span + j] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double denom = right[r + 1] + left[j - r];
      const double temp = denom == 0.0 ? 0.0 : basis[r] / denom;
      basis[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    basis[j] = saved;
  }
  return span;
}

void NurbsPatch::validate() const {
  validate_knots(knots_u, degree_u, "knots_u");
  validate_knots(knots_v, degree_v, "knots_v");
  const auto expected = static_cast<std::size_t>(rows()) * static_cast<std::size_t>(cols());
  if (control.size() != expected || weights.size() != expected) {
    throw InvalidArgument("NURBS: control net has " + std::to_string(control.size()) +
                          " points, expected " + std::to_string(expected));
  }
  for (double w : weights) {
    if (!(w > 0.0)) throw InvalidArgument("NURBS: weights must be strictly positive");
  }
}

Vec3 NurbsPatch::eval(double s, double t) const {
  std::vector<double> bu, bv;
  const int su = bspline_basis(knots_u, degree_u, s, bu);
  const int sv = bspline_basis(knots_v, degree_v, t, bv);
  const int nr = rows();
  Vec3 num = Vec3::Zero();
  double den = 0.0;
  for (int b = 0; b <= degree_v; ++b) {
    const int j = sv - degree_v + b;
    for (int a = 0; a <= degree_u; ++a) {
      const int i = su - degree_u + a;
      const double c = bu[a] * bv[b] * weights[i + nr * j];
      num += c * control[i + nr * j];
      den += c;
    }
  }
  return num / den;
}

Vec3 CubeSphereFace::eval(double s, double t) const {
  const double a = std::tan((s - 0.5) * 0.5 * kPi);
  const double b = std::tan((t - 0.5) * 0.5 * kPi);
  Vec3 d;
  switch (face) {
    case 0: d = Vec3(1.0, a, b); break;
    case 1: d = Vec3(-1.0, b, a); break;
    case 2: d = Vec3(b, 1.0, a); break;
    case 3: d = Vec3(a, -1.0, b); break;
    case 4: d = Vec3(a, b, 1.0); break;
    default: d = Vec3(b, a, -1.0); break;
  }
  return center + radius * d.normalized();
}

Vec3 PatchMap::eval(double s, double t) const {
  if (!(s >= 0.0 && s <= 1.0 && t >= 0.0 && t <= 1.0)) {
    throw InvalidArgument("patch_eval: parameter outside the unit square");
  }
  return std::visit([&](const auto& m) { return m.eval(s, t); }, map_);
}

Vec3 PatchMap::approximate_normal(double s, double t) const {
  const double h = 1e-6;
  const double s0 = std::max(0.0, s - h), s1 = std::min(1.0, s + h);
  const double t0 = std::max(0.0, t - h), t1 = std::min(1.0, t + h);
  const Vec3 ds = (eval(s1, t) - eval(s0, t)) / (s1 - s0);
  const Vec3 dt = (eval(s, t1) - eval(s, t0)) / (t1 - t0);
  return ds.cross(dt);
}

void PatchMap::check_immersion() const {
  constexpr int kSamples = 7;
  for (int i = 0; i < kSamples; ++i) {
    for (int j = 0; j < kSamples; ++j) {
      const double s = (i + 0.5) / kSamples;
      const double t = (j + 0.5) / kSamples;
      if (approximate_normal(s, t).norm() <= 1e-12) {
        throw InvalidArgument("patch map is not an immersion (degenerate tangents)");
      }
    }
  }
}

Vec3 patch_eval(const PatchMap& patch, double s, double t) { return patch.eval(s, t); }

}  // namespace roughscat::geometry
