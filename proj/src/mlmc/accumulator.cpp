#include "roughscat/mlmc/accumulator.hpp"

#include <cmath>

namespace roughscat::mlmc {

namespace {

constexpr double kLimit = 4.0e18;  // below 2^62

inline std::int64_t quantize(double x, double scale) {
  const double y = x * scale;
  if (!(std::abs(y) < kLimit)) throw NumericalError("moment accumulator: block sum outside the fixed-point range");
  return std::llrint(y);
}

}  // namespace

MomentAccumulator::MomentAccumulator(int dim, int fraction_bits)
    : dim_(dim), bits_(fraction_bits), scale_(std::ldexp(1.0, fraction_bits)) {
  if (dim < 1) throw InvalidArgument("MomentAccumulator: dimension must be >= 1");
  if (fraction_bits < 8 || fraction_bits > 60) throw InvalidArgument("MomentAccumulator: fraction bits out of range");
  first_re_.assign(dim, 0);
  first_im_.assign(dim, 0);
  const std::size_t t = static_cast<std::size_t>(dim) * (dim + 1) / 2;
  second_re_.assign(t, 0);
  second_im_.assign(t, 0);
}

void MomentAccumulator::add_block(const Eigen::MatrixXcd& fine, const Eigen::MatrixXcd& coarse) {
  if (fine.rows() != dim_ || fine.cols() < 1) throw InvalidArgument("MomentAccumulator: block shape mismatch");
  const bool coupled = coarse.cols() > 0;
  if (coupled && (coarse.rows() != dim_ || coarse.cols() != fine.cols())) {
    throw InvalidArgument("MomentAccumulator: coarse block shape mismatch");
  }
  if (!fine.allFinite() || (coupled && !coarse.allFinite())) {
    throw NumericalError("MomentAccumulator: non-finite sample");
  }
  Eigen::VectorXcd s1 = fine.rowwise().sum();
  Eigen::MatrixXcd s2 = Eigen::MatrixXcd::Zero(dim_, dim_);
  s2.selfadjointView<Eigen::Upper>().rankUpdate(fine, 1.0);
  if (coupled) {
    s1 -= coarse.rowwise().sum();
    s2.selfadjointView<Eigen::Upper>().rankUpdate(coarse, -1.0);
  }
  // Quantize everything before touching the sums so a range error leaves
  // the accumulator unchanged.
  std::vector<std::int64_t> q1(2 * dim_);
  for (int i = 0; i < dim_; ++i) {
    q1[2 * i] = quantize(s1[i].real(), scale_);
    q1[2 * i + 1] = quantize(s1[i].imag(), scale_);
  }
  std::vector<std::int64_t> q2(2 * second_re_.size());
  for (int j = 0; j < dim_; ++j) {
    const cplx* col = s2.col(j).data();
    std::int64_t* out = q2.data() + 2 * tri(0, j);
    for (int i = 0; i <= j; ++i) {
      out[2 * i] = quantize(col[i].real(), scale_);
      out[2 * i + 1] = quantize(col[i].imag(), scale_);
    }
  }
  for (int i = 0; i < dim_; ++i) {
    first_re_[i] += q1[2 * i];
    first_im_[i] += q1[2 * i + 1];
  }
  for (std::size_t k = 0; k < second_re_.size(); ++k) {
    second_re_[k] += q2[2 * k];
    second_im_[k] += q2[2 * k + 1];
  }
  count_ += fine.cols();
}

void MomentAccumulator::merge(const MomentAccumulator& other) {
  if (other.dim_ != dim_ || other.bits_ != bits_) throw InvalidArgument("MomentAccumulator: merge shape mismatch");
  for (int i = 0; i < dim_; ++i) {
    first_re_[i] += other.first_re_[i];
    first_im_[i] += other.first_im_[i];
  }
  for (std::size_t k = 0; k < second_re_.size(); ++k) {
    second_re_[k] += other.second_re_[k];
    second_im_[k] += other.second_im_[k];
  }
  count_ += other.count_;
}

Eigen::VectorXcd MomentAccumulator::mean() const {
  Eigen::VectorXcd m = Eigen::VectorXcd::Zero(dim_);
  if (count_ == 0) return m;
  const double f = 1.0 / (scale_ * static_cast<double>(count_));
  for (int i = 0; i < dim_; ++i) {
    m[i] = cplx(static_cast<double>(first_re_[i]) * f, static_cast<double>(first_im_[i]) * f);
  }
  return m;
}

Eigen::MatrixXcd MomentAccumulator::second_moment() const {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim_, dim_);
  if (count_ == 0) return m;
  const double f = 1.0 / (scale_ * static_cast<double>(count_));
  for (int j = 0; j < dim_; ++j) {
    for (int i = 0; i <= j; ++i) {
      const std::size_t k = tri(i, j);
      const cplx v(static_cast<double>(second_re_[k]) * f, static_cast<double>(second_im_[k]) * f);
      m(i, j) = v;
      m(j, i) = std::conj(v);
    }
    m(j, j) = m(j, j).real();
  }
  return m;
}

bool MomentAccumulator::operator==(const MomentAccumulator& other) const {
  return dim_ == other.dim_ && bits_ == other.bits_ && count_ == other.count_ && first_re_ == other.first_re_ &&
         first_im_ == other.first_im_ && second_re_ == other.second_re_ && second_im_ == other.second_im_;
}

}  // namespace roughscat::mlmc
