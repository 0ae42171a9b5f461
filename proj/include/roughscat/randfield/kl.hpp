#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "roughscat/geometry/landmarks.hpp"
#include "roughscat/randfield/pivoted_cholesky.hpp"

namespace roughscat::randfield {

/// Truncated Karhunen-Loeve basis: column k of `modes` is L v_k with
/// Euclidean norm sqrt(lambda_k).
struct KLBasis {
  Eigen::VectorXd eigenvalues;  // descending
  Eigen::MatrixXd modes;        // 3n x m, component-major rows

  [[nodiscard]] int rank() const { return static_cast<int>(eigenvalues.size()); }
  [[nodiscard]] int dim() const { return static_cast<int>(modes.rows()); }
};

/// Eigendecomposition of the small Gram matrix L^T L.  Eigenvalues below
/// 1e-14 * lambda_1 are dropped.
KLBasis kl_from_cholesky(const PivotedCholeskyResult& chol);

struct DeformationSample {
  Eigen::VectorXd y;
  double alpha = 0.0;
  std::vector<Vec3> displaced;  // one point per global landmark
};

/// displaced_i = landmark_i + alpha * (modes y) at point i.
DeformationSample kl_sample(const KLBasis& basis, const geometry::LandmarkSet& landmarks, double alpha,
                            const Eigen::VectorXd& y);

/// Least-squares slope of log lambda_k against log k over k in [m/4, m].
double singular_value_decay(const Eigen::VectorXd& eigenvalues);
inline double singular_value_decay(const KLBasis& basis) { return singular_value_decay(basis.eigenvalues); }

/// Binary cache: magic "RSKL", format version, n, m, eigenvalues, modes.
void save_kl(const KLBasis& basis, const std::string& path);
KLBasis load_kl(const std::string& path);

}  // namespace roughscat::randfield
