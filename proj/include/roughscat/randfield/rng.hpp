#pragma once

#include <cstdint>

#include <Eigen/Core>

namespace roughscat::randfield {

/// Identifies an independent random stream.  Streams are counter based:
/// the n-th draw is a pure function of (key, n), so workers never share
/// generator state.
struct StreamId {
  std::uint64_t seed = 0;
  std::uint64_t domain = 0;  // separates pilot runs, campaigns, tests
  std::uint64_t level = 0;
  std::uint64_t index = 0;

  bool operator==(const StreamId&) const = default;
};

class Stream {
 public:
  explicit Stream(const StreamId& id);

  /// Next 64 random bits (SplitMix64 finalizer of key + counter).
  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double next_unit();
  /// Uniform on [-1, 1).
  double next_symmetric() { return 2.0 * next_unit() - 1.0; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// m independent U(-1, 1) parameters from one stream.
Eigen::VectorXd draw_parameters(Stream& stream, int m);
Eigen::VectorXd draw_parameters(const StreamId& id, int m);

}  // namespace roughscat::randfield
