#include "roughscat/bem/assembly.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "roughscat/bem/element_geometry.hpp"
#include "roughscat/bem/local_rules.hpp"
#include "roughscat/parallel.hpp"
#include "roughscat/simd/kernels.hpp"

namespace roughscat::bem {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Cell radii are measured from nine points of a curved cell; the slack keeps
// them bounding.
constexpr double kRadiusSlack = 1.1;
constexpr int kMaxBasis = (kMaxDegree + 1) * (kMaxDegree + 1);

RowMatrix basis_matrix(const BoundaryDiscretization& disc, const LocalRule& rule) {
  RowMatrix b(rule.size(), disc.dofs_per_element());
  for (int k = 0; k < rule.size(); ++k) disc.basis(rule.u[k], rule.v[k], std::span<double>(b.row(k).data(), b.cols()));
  return b;
}

struct Cell {
  int offset;  // first point in the merged cell rule
  Vec3 center;
  double radius;
};

// Geometry of one element shared by all near-field rows.
struct ElementNearField {
  PointCloud cells;                       // all subdivision cells, depth 1..D
  std::vector<std::vector<Cell>> levels;  // levels[k][ci + 2^k cj], k = 0..D
  std::vector<Vec3> lattice;              // points of the depth D+1 lattice
  double polar_threshold = 0.0;           // targets closer than this use the polar rule
};

class Assembler {
 public:
  Assembler(const BoundaryDiscretization& disc, double kappa, const OperatorTerms& terms, const AssemblyOptions& opt)
      : disc_(disc), kappa_(kappa), terms_(terms), opt_(opt), kernels_(simd::kernels()) {
    const int p = disc.degree();
    nq_ = opt.quad_order == 0 ? p + 3 : opt.quad_order;
    npolar_ = opt.polar_order == 0 ? p + 3 : opt.polar_order;
    if (nq_ < p + 2) throw InvalidArgument("assemble_operator: quad_order must be at least p + 2");
    nradial_ = opt.polar_radial_order == 0 ? 2 * (p + 2) : opt.polar_radial_order;
    if (npolar_ < 1 || nradial_ < 1) throw InvalidArgument("assemble_operator: polar_order must be positive");
    if (opt.max_depth < 1 || opt.max_depth > 8) throw InvalidArgument("assemble_operator: max_depth must lie in [1, 8]");
    if (!(opt.admissibility > 1.0)) throw InvalidArgument("assemble_operator: admissibility must exceed 1");
    if (!(kappa >= 0.0)) throw InvalidArgument("assemble_operator: wavenumber must be nonnegative");
    depth_ = opt.max_depth;
    nb_ = disc.dofs_per_element();
  }

  Eigen::MatrixXcd run(AssemblyStats* stats) {
    const int n = disc_.num_dofs();
    Eigen::MatrixXcd a(n, n);
    prepare();
    far_field(a);
    std::vector<std::int64_t> near_count(n, 0);
    parallel_for(n, opt_.workers, [&](int i) { near_count[i] = near_field_row(a, i); });
    for (int i = 0; i < n; ++i) a(i, i) += terms_.identity;
    if (stats) {
      stats->kernel_evaluations = static_cast<std::int64_t>(n) * nq_ * nq_ * disc_.num_elements();
      for (auto c : near_count) stats->kernel_evaluations += c;
    }
    return a;
  }

 private:
  void prepare() {
    const LocalRule regular = tensor_gauss(nq_);
    regular_basis_ = basis_matrix(disc_, regular);
    regular_ = map_rule_all(disc_, regular);

    LocalRule cells;
    for (int k = 1; k <= depth_; ++k) {
      const int m = 1 << k;
      for (int cj = 0; cj < m; ++cj) {
        for (int ci = 0; ci < m; ++ci) {
          const LocalRule c = tensor_gauss_cell(nq_, k, ci, cj);
          for (int q = 0; q < c.size(); ++q) cells.push(c.u[q], c.v[q], c.w[q]);
        }
      }
    }
    cell_basis_ = basis_matrix(disc_, cells);
    auto cell_clouds = map_rule_all(disc_, cells);

    const int lat = (1 << (depth_ + 1)) + 1;
    LocalRule lattice;
    for (int j = 0; j < lat; ++j) {
      for (int i = 0; i < lat; ++i) lattice.push(double(i) / (lat - 1), double(j) / (lat - 1), 0.0);
    }
    lattice_rule_ = lattice;
    auto lattice_clouds = map_rule_all(disc_, lattice);

    near_.resize(disc_.num_elements());
    for (int e = 0; e < disc_.num_elements(); ++e) {
      ElementNearField& nf = near_[e];
      nf.cells = std::move(cell_clouds[e]);
      nf.lattice.resize(lattice.size());
      for (int k = 0; k < lattice.size(); ++k) nf.lattice[k] = lattice_clouds[e].point(k);
      nf.levels.resize(depth_ + 1);
      int offset = 0;
      double finest = 0.0;
      for (int k = 0; k <= depth_; ++k) {
        const int m = 1 << k;
        const int sub = (lat - 1) / m;
        nf.levels[k].resize(m * m);
        for (int cj = 0; cj < m; ++cj) {
          for (int ci = 0; ci < m; ++ci) {
            const Vec3 c = nf.lattice[(ci * sub + sub / 2) + lat * (cj * sub + sub / 2)];
            double r = 0.0;
            for (int dj = 0; dj <= 2; ++dj) {
              for (int di = 0; di <= 2; ++di) {
                r = std::max(r, (nf.lattice[(ci * sub + di * sub / 2) + lat * (cj * sub + dj * sub / 2)] - c).norm());
              }
            }
            nf.levels[k][ci + m * cj] = {k == 0 ? -1 : offset, c, kRadiusSlack * r};
            if (k > 0) offset += nq_ * nq_;
            if (k == depth_) finest = std::max(finest, kRadiusSlack * r);
          }
        }
      }
      nf.polar_threshold = opt_.admissibility * finest;
    }
  }

  // Every row against every element with the regular rule.
  void far_field(Eigen::MatrixXcd& a) const {
    const int n = disc_.num_dofs();
    const int q = nq_ * nq_;
    parallel_for(disc_.num_elements(), opt_.workers, [&](int e) {
      RowMatrix kre(n, q), kim(n, q);
      const simd::Sources src = regular_[e].sources();
      for (int i = 0; i < n; ++i) {
        kernels_.layer_combination(disc_.point(i).data(), disc_.normal(i).data(), kappa_, terms_.adjoint_double_layer,
                                   terms_.single_layer.real(), terms_.single_layer.imag(), src, kre.row(i).data(),
                                   kim.row(i).data());
      }
      const Eigen::MatrixXd re = kre * regular_basis_;
      const Eigen::MatrixXd im = kim * regular_basis_;
      a.middleCols(e * nb_, nb_).real() = re;
      a.middleCols(e * nb_, nb_).imag() = im;
    });
  }

  // Accumulates kernel(x_i, .) against `basis` rows over the given sources.
  std::int64_t accumulate(int i, const simd::Sources& src, const double* basis, cplx* out) const {
    std::array<double, 512> re, im;
    for (int begin = 0; begin < src.count; begin += 512) {
      simd::Sources chunk = src;
      const int count = std::min(512, src.count - begin);
      chunk.x += begin;
      chunk.y += begin;
      chunk.z += begin;
      chunk.nx += begin;
      chunk.ny += begin;
      chunk.nz += begin;
      chunk.w += begin;
      chunk.count = count;
      kernels_.layer_combination(disc_.point(i).data(), disc_.normal(i).data(), kappa_, terms_.adjoint_double_layer,
                                 terms_.single_layer.real(), terms_.single_layer.imag(), chunk, re.data(), im.data());
      for (int k = 0; k < count; ++k) {
        const cplx z(re[k], im[k]);
        const double* b = basis + static_cast<std::ptrdiff_t>(begin + k) * nb_;
        for (int j = 0; j < nb_; ++j) out[j] += z * b[j];
      }
    }
    return src.count;
  }

  std::int64_t polar(int i, int e, double au, double av, const Eigen::Matrix2d& metric, double distance,
                     cplx* out) const {
    const LocalRule rule = polar_rule(au, av, metric, distance, nradial_, npolar_);
    const PointCloud cloud = map_rule(disc_, e, rule);
    const RowMatrix basis = basis_matrix(disc_, rule);
    return accumulate(i, cloud.sources(), basis.data(), out);
  }

  std::int64_t subdivide(int i, const ElementNearField& nf, int k, int ci, int cj, cplx* out) const {
    const int m = 1 << k;
    const Cell& cell = nf.levels[k][ci + m * cj];
    const Vec3& x = disc_.point(i);
    if (k == depth_ || (x - cell.center).norm() > opt_.admissibility * cell.radius) {
      const int q = nq_ * nq_;
      return accumulate(i, nf.cells.sources(cell.offset, q), cell_basis_.row(cell.offset).data(), out);
    }
    std::int64_t count = 0;
    for (int dj = 0; dj < 2; ++dj) {
      for (int di = 0; di < 2; ++di) count += subdivide(i, nf, k + 1, 2 * ci + di, 2 * cj + dj, out);
    }
    return count;
  }

  static Eigen::Matrix2d metric(const LocalFrame& f) {
    Eigen::Matrix2d g;
    g << f.du.dot(f.du), f.du.dot(f.dv), f.du.dot(f.dv), f.dv.dot(f.dv);
    return g;
  }

  // Returns the number of kernel evaluations spent on row i.
  std::int64_t near_field_row(Eigen::MatrixXcd& a, int i) const {
    const Vec3& x = disc_.point(i);
    const int self = disc_.element_of(i);
    std::int64_t count = 0;
    std::array<cplx, kMaxBasis> row;
    for (int e = 0; e < disc_.num_elements(); ++e) {
      const ElementNearField& nf = near_[e];
      const Cell& whole = nf.levels[0][0];
      if (e != self && (x - whole.center).norm() > opt_.admissibility * whole.radius) continue;
      std::fill(row.begin(), row.begin() + nb_, cplx(0.0));
      if (e == self) {
        count += polar(i, e, disc_.node_u(i), disc_.node_v(i), metric(disc_.collocation_frame(i)), 0.0, row.data());
      } else {
        int best = 0;
        double dbest = std::numeric_limits<double>::infinity();
        for (int k = 0; k < static_cast<int>(nf.lattice.size()); ++k) {
          const double d = (nf.lattice[k] - x).squaredNorm();
          if (d < dbest) {
            dbest = d;
            best = k;
          }
        }
        bool done = false;
        if (std::sqrt(dbest) < 2.0 * nf.polar_threshold) {
          const ClosestPoint cp =
              closest_point(disc_, e, x, lattice_rule_.u[best], lattice_rule_.v[best]);
          if (cp.distance < nf.polar_threshold) {
            count += polar(i, e, cp.u, cp.v, metric(disc_.local_frame(e, cp.u, cp.v)), cp.distance, row.data());
            done = true;
          }
        }
        if (!done) {
          for (int cj = 0; cj < 2; ++cj) {
            for (int ci = 0; ci < 2; ++ci) count += subdivide(i, nf, 1, ci, cj, row.data());
          }
        }
      }
      for (int j = 0; j < nb_; ++j) a(i, e * nb_ + j) = row[j];
    }
    return count;
  }

  const BoundaryDiscretization& disc_;
  double kappa_;
  OperatorTerms terms_;
  AssemblyOptions opt_;
  const simd::KernelTable& kernels_;
  int nq_ = 0, npolar_ = 0, nradial_ = 0, depth_ = 0, nb_ = 0;
  RowMatrix regular_basis_, cell_basis_;
  std::vector<PointCloud> regular_;
  std::vector<ElementNearField> near_;
  LocalRule lattice_rule_;
};

}  // namespace

OperatorTerms cfie_terms(const WaveSetup& wave) { return {0.5, 1.0, cplx(0.0, -wave.eta)}; }

Eigen::MatrixXcd assemble_operator(const BoundaryDiscretization& disc, double kappa, const OperatorTerms& terms,
                                   const AssemblyOptions& options, AssemblyStats* stats) {
  return Assembler(disc, kappa, terms, options).run(stats);
}

Eigen::MatrixXcd assemble_cfie(const BoundaryDiscretization& disc, const WaveSetup& wave,
                               const AssemblyOptions& options, AssemblyStats* stats) {
  return assemble_operator(disc, wave.kappa, cfie_terms(wave), options, stats);
}

Eigen::VectorXcd rhs_incident(const BoundaryDiscretization& disc, const WaveSetup& wave) {
  Eigen::VectorXcd b(disc.num_dofs());
  const cplx mi_eta(0.0, -wave.eta);
  for (int i = 0; i < disc.num_dofs(); ++i) {
    const Vec3& x = disc.point(i);
    const cplx u = incident_wave(wave, x);
    const cplx dn = (incident_gradient(wave, x).array() * disc.normal(i).cast<cplx>().array()).sum();
    b[i] = dn + mi_eta * u;
  }
  return b;
}

}  // namespace roughscat::bem
