#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "roughscat/common.hpp"

namespace roughscat::mlmc {

/// Exact running sums of one level quantity: sum of (fine - coarse) and sum
/// of (fine fine^H - coarse coarse^H), for vectors of length `dim`.
///
/// Each block of samples is summed in double precision and then rounded to
/// a fixed-point grid of 2^-fraction_bits; the running sums are 128-bit
/// integers.  Adding blocks and merging accumulators are therefore exact, so
/// the result is independent of the order in which blocks or accumulators
/// are combined.  Only the upper triangle of the Hermitian second sum is
/// stored.
class MomentAccumulator {
 public:
  explicit MomentAccumulator(int dim, int fraction_bits = 40);

  /// Columns of `fine` (and `coarse`, unless it has zero columns) are the
  /// samples of one block.  Throws NumericalError if a block entry exceeds
  /// the fixed-point range.
  void add_block(const Eigen::MatrixXcd& fine, const Eigen::MatrixXcd& coarse);
  void add_block(const Eigen::MatrixXcd& fine) { add_block(fine, Eigen::MatrixXcd(fine.rows(), 0)); }

  /// Exact sum of both accumulators.  Throws InvalidArgument on a shape or
  /// scale mismatch.
  void merge(const MomentAccumulator& other);

  [[nodiscard]] int dim() const { return dim_; }
  [[nodiscard]] std::int64_t count() const { return count_; }

  /// Sums divided by count (zero when empty).
  [[nodiscard]] Eigen::VectorXcd mean() const;
  [[nodiscard]] Eigen::MatrixXcd second_moment() const;

  bool operator==(const MomentAccumulator& other) const;

 private:
  [[nodiscard]] std::size_t tri(int i, int j) const {
    return static_cast<std::size_t>(j) * (j + 1) / 2 + static_cast<std::size_t>(i);
  }

  int dim_;
  int bits_;
  double scale_;
  std::int64_t count_ = 0;
  std::vector<__int128> first_re_, first_im_;
  std::vector<__int128> second_re_, second_im_;  // upper triangle, column-major
};

}  // namespace roughscat::mlmc
