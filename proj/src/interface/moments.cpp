#include "roughscat/interface/moments.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

namespace roughscat::interface {

namespace {

constexpr char kMagic[4] = {'R', 'S', 'C', 'M'};
constexpr std::uint32_t kVersion = 1;

void check_grid(const ArtificialInterface& iface, const InterfaceMoments& moments) {
  if (moments.points != iface.size() || moments.mean.size() != 2 * iface.size() ||
      moments.second.rows() != 2 * iface.size() || moments.second.cols() != 2 * iface.size()) {
    throw InvalidArgument("interface moments do not match the interface grid");
  }
}

}  // namespace

InterfaceMoments::InterfaceMoments(int n)
    : points(n), mean(Eigen::VectorXcd::Zero(2 * n)), second(Eigen::MatrixXcd::Zero(2 * n, 2 * n)) {}

InterfaceMoments InterfaceMoments::from_sample(const CauchyData& sample) {
  InterfaceMoments m;
  m.points = sample.size();
  m.mean = sample.stacked();
  m.second = m.mean * m.mean.adjoint();
  return m;
}

void InterfaceMoments::symmetrize() {
  const Eigen::MatrixXcd h = 0.5 * (second + second.adjoint());
  second = h;
}

Eigen::MatrixXcd centered_covariance(const InterfaceMoments& moments) {
  return moments.second - moments.mean * moments.mean.adjoint();
}

cplx propagate_mean(const ArtificialInterface& iface, const InterfaceMoments& moments, double kappa, const Vec3& x) {
  check_grid(iface, moments);
  return (representation_row(iface, kappa, x).array() * moments.mean.array()).sum();
}

cplx propagate_correlation(const ArtificialInterface& iface, const InterfaceMoments& moments, double kappa,
                           const Vec3& x, const Vec3& xp) {
  check_grid(iface, moments);
  const Eigen::VectorXcd a = representation_row(iface, kappa, x);
  const Eigen::VectorXcd b = representation_row(iface, kappa, xp).conjugate();
  const Eigen::VectorXcd cb = moments.second * b;
  return (a.array() * cb.array()).sum();
}

PropagatedMoments propagate(const ArtificialInterface& iface, const InterfaceMoments& moments, double kappa,
                            const std::vector<Vec3>& points, int workers) {
  check_grid(iface, moments);
  const Eigen::MatrixXcd a = representation_matrix(iface, kappa, points, workers);
  PropagatedMoments out;
  out.mean = a * moments.mean;
  const Eigen::MatrixXcd ac = a * moments.second;
  out.correlation = ac * a.adjoint();
  return out;
}

void write_interface_csv(const ArtificialInterface& iface, const Eigen::VectorXcd& values, const std::string& path) {
  if (values.size() != iface.size()) throw InvalidArgument("write_interface_csv: value count mismatch");
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path);
  out.precision(17);
  out << "patch,i,j,x,y,z,re,im\n";
  for (int k = 0; k < iface.size(); ++k) {
    const Vec3 p = iface.point(k);
    out << iface.patch_of(k) << ',' << iface.i_of(k) << ',' << iface.j_of(k) << ',' << p.x() << ',' << p.y() << ','
        << p.z() << ',' << values[k].real() << ',' << values[k].imag() << '\n';
  }
  if (!out) throw Error("write failed for " + path);
}

void save_moments(const InterfaceMoments& moments, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("save_moments: cannot open " + path);
  const std::int64_t n = moments.points;
  out.write(kMagic, 4);
  out.write(reinterpret_cast<const char*>(&kVersion), sizeof kVersion);
  out.write(reinterpret_cast<const char*>(&n), sizeof n);
  out.write(reinterpret_cast<const char*>(moments.mean.data()), sizeof(cplx) * 2 * n);
  const Eigen::MatrixXcd blocks[4] = {moments.cor_u_u(), moments.cor_u_du(), moments.cor_du_u(), moments.cor_du_du()};
  for (const auto& b : blocks) out.write(reinterpret_cast<const char*>(b.data()), sizeof(cplx) * n * n);
  if (!out) throw Error("save_moments: write failed for " + path);
}

InterfaceMoments load_moments(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("load_moments: cannot open " + path);
  char magic[4];
  std::uint32_t version = 0;
  std::int64_t n = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&version), sizeof version);
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) throw Error("load_moments: " + path + " is not a moments file");
  if (version != kVersion) throw Error("load_moments: unsupported format version " + std::to_string(version));
  if (n < 1 || n > (1 << 20)) throw Error("load_moments: corrupt header in " + path);
  InterfaceMoments m(static_cast<int>(n));
  in.read(reinterpret_cast<char*>(m.mean.data()), sizeof(cplx) * 2 * n);
  Eigen::MatrixXcd b(n, n);
  for (int k = 0; k < 4; ++k) {
    in.read(reinterpret_cast<char*>(b.data()), sizeof(cplx) * n * n);
    m.second.block((k / 2) * n, (k % 2) * n, n, n) = b;
  }
  if (!in) throw Error("load_moments: truncated file " + path);
  return m;
}

}  // namespace roughscat::interface
