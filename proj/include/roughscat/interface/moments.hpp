#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "roughscat/interface/interface.hpp"

namespace roughscat::interface {

/// First and second moments of the Cauchy data.  With the stacked layout
/// c = [u_s; du_s/dn] of length 2N, `mean` estimates E[c] and `second`
/// estimates E[c c^H], so second(i, j) = E[c_i conj(c_j)].  The four
/// correlation blocks are views into `second`.
struct InterfaceMoments {
  int points = 0;
  Eigen::VectorXcd mean;
  Eigen::MatrixXcd second;

  InterfaceMoments() = default;
  explicit InterfaceMoments(int n);

  /// Moments of a single deterministic sample: mean c, second c c^H.
  static InterfaceMoments from_sample(const CauchyData& sample);

  [[nodiscard]] auto mean_value() const { return mean.head(points); }
  [[nodiscard]] auto mean_normal_derivative() const { return mean.tail(points); }
  [[nodiscard]] auto cor_u_u() const { return second.topLeftCorner(points, points); }
  [[nodiscard]] auto cor_u_du() const { return second.topRightCorner(points, points); }
  [[nodiscard]] auto cor_du_u() const { return second.bottomLeftCorner(points, points); }
  [[nodiscard]] auto cor_du_du() const { return second.bottomRightCorner(points, points); }

  /// Replaces `second` by its Hermitian part.
  void symmetrize();
};

/// second - mean mean^H.
Eigen::MatrixXcd centered_covariance(const InterfaceMoments& moments);

/// E[u_s](x) through the representation formula.
cplx propagate_mean(const ArtificialInterface& iface, const InterfaceMoments& moments, double kappa, const Vec3& x);

/// E[u_s(x) conj(u_s(x'))] through the double representation integral.
cplx propagate_correlation(const ArtificialInterface& iface, const InterfaceMoments& moments, double kappa,
                           const Vec3& x, const Vec3& xp);

/// Means at all points and the full correlation matrix between them.
struct PropagatedMoments {
  Eigen::VectorXcd mean;
  Eigen::MatrixXcd correlation;
};
PropagatedMoments propagate(const ArtificialInterface& iface, const InterfaceMoments& moments, double kappa,
                            const std::vector<Vec3>& points, int workers = 1);

/// CSV with header patch,i,j,x,y,z,re,im; one row per interface point.
void write_interface_csv(const ArtificialInterface& iface, const Eigen::VectorXcd& values, const std::string& path);

/// Binary blob: magic "RSCM", format version, N, the mean vector and the
/// four N x N correlation blocks (uu, u du, du u, du du), column-major
/// (re, im) doubles.
void save_moments(const InterfaceMoments& moments, const std::string& path);
InterfaceMoments load_moments(const std::string& path);

}  // namespace roughscat::interface
