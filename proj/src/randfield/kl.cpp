#include "roughscat/randfield/kl.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include <Eigen/Dense>

namespace roughscat::randfield {

KLBasis kl_from_cholesky(const PivotedCholeskyResult& chol) {
  const Eigen::MatrixXd& L = chol.factor;
  const int m = static_cast<int>(L.cols());
  if (m < 1) throw InvalidArgument("kl_from_cholesky: rank must be >= 1");

  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(m, m);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(L.transpose());
  Eigen::VectorXd w(m);
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', m, gram.data(), m, w.data());
  if (info != 0) throw NumericalError("kl_from_cholesky: symmetric eigensolver failed (info " + std::to_string(info) + ")");

  // LAPACK returns ascending order.
  const double top = w[m - 1];
  int keep = 0;
  while (keep < m && w[m - 1 - keep] > 1e-14 * top) ++keep;
  Eigen::MatrixXd v(m, keep);
  KLBasis basis;
  basis.eigenvalues.resize(keep);
  for (int k = 0; k < keep; ++k) {
    basis.eigenvalues[k] = w[m - 1 - k];
    v.col(k) = gram.col(m - 1 - k);
  }
  basis.modes.noalias() = L * v;
  // Fix the sign so the largest-magnitude entry of every mode is positive.
  for (int k = 0; k < keep; ++k) {
    Eigen::Index i = 0;
    basis.modes.col(k).cwiseAbs().maxCoeff(&i);
    if (basis.modes(i, k) < 0.0) basis.modes.col(k) *= -1.0;
  }
  return basis;
}

DeformationSample kl_sample(const KLBasis& basis, const geometry::LandmarkSet& landmarks, double alpha,
                            const Eigen::VectorXd& y) {
  if (y.size() != basis.rank()) {
    throw InvalidArgument("kl_sample: expected " + std::to_string(basis.rank()) + " parameters, got " +
                          std::to_string(y.size()));
  }
  const int n = landmarks.count();
  if (basis.dim() != 3 * n) throw InvalidArgument("kl_sample: basis does not match the landmark set");
  for (Eigen::Index k = 0; k < y.size(); ++k) {
    if (!(std::abs(y[k]) <= 1.0)) throw InvalidArgument("kl_sample: parameters must lie in [-1, 1]");
  }
  DeformationSample sample;
  sample.y = y;
  sample.alpha = alpha;
  sample.displaced = landmarks.points;
  if (alpha == 0.0) return sample;
  const Eigen::VectorXd field = basis.modes * y;
  for (int i = 0; i < n; ++i) {
    sample.displaced[i] += alpha * Vec3(field[i], field[n + i], field[2 * n + i]);
  }
  return sample;
}

double singular_value_decay(const Eigen::VectorXd& eigenvalues) {
  const int m = static_cast<int>(eigenvalues.size());
  if (m < 20) throw InvalidArgument("singular_value_decay: need at least 20 eigenvalues");
  const int first = std::max(1, m / 4);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (int k = first; k <= m; ++k) {
    const double lambda = eigenvalues[k - 1];
    if (!(lambda > 0.0)) throw InvalidArgument("singular_value_decay: eigenvalues must be positive");
    const double x = std::log(static_cast<double>(k));
    const double yv = std::log(lambda);
    sx += x;
    sy += yv;
    sxx += x * x;
    sxy += x * yv;
    ++count;
  }
  return (count * sxy - sx * sy) / (count * sxx - sx * sx);
}

namespace {

constexpr char kMagic[4] = {'R', 'S', 'K', 'L'};
constexpr std::uint32_t kVersion = 1;

}  // namespace

void save_kl(const KLBasis& basis, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("save_kl: cannot open " + path);
  const std::int64_t n = basis.dim() / 3;
  const std::int64_t m = basis.rank();
  out.write(kMagic, 4);
  out.write(reinterpret_cast<const char*>(&kVersion), sizeof kVersion);
  out.write(reinterpret_cast<const char*>(&n), sizeof n);
  out.write(reinterpret_cast<const char*>(&m), sizeof m);
  out.write(reinterpret_cast<const char*>(basis.eigenvalues.data()), sizeof(double) * m);
  out.write(reinterpret_cast<const char*>(basis.modes.data()), sizeof(double) * 3 * n * m);
  if (!out) throw Error("save_kl: write failed for " + path);
}

KLBasis load_kl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("load_kl: cannot open " + path);
  char magic[4];
  std::uint32_t version = 0;
  std::int64_t n = 0, m = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&version), sizeof version);
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  in.read(reinterpret_cast<char*>(&m), sizeof m);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) throw Error("load_kl: " + path + " is not a KL basis file");
  if (version != kVersion) throw Error("load_kl: unsupported format version " + std::to_string(version));
  if (n < 1 || m < 1 || m > 3 * n) throw Error("load_kl: corrupt header in " + path);
  KLBasis basis;
  basis.eigenvalues.resize(m);
  basis.modes.resize(3 * n, m);
  in.read(reinterpret_cast<char*>(basis.eigenvalues.data()), sizeof(double) * m);
  in.read(reinterpret_cast<char*>(basis.modes.data()), sizeof(double) * 3 * n * m);
  if (!in) throw Error("load_kl: truncated file " + path);
  return basis;
}

}  // namespace roughscat::randfield
