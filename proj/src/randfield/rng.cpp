#include "roughscat/randfield/rng.hpp"

#include "roughscat/common.hpp"

namespace roughscat::randfield {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

Stream::Stream(const StreamId& id) {
  std::uint64_t k = mix64(id.seed + kGolden);
  k = mix64(k ^ (id.domain + 2 * kGolden));
  k = mix64(k ^ (id.level + 3 * kGolden));
  key_ = mix64(k ^ (id.index + 4 * kGolden));
}

std::uint64_t Stream::next_u64() {
  ++counter_;
  return mix64(key_ + counter_ * kGolden);
}

double Stream::next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

Eigen::VectorXd draw_parameters(Stream& stream, int m) {
  if (m < 0) throw InvalidArgument("draw_parameters: negative dimension");
  Eigen::VectorXd y(m);
  for (int k = 0; k < m; ++k) y[k] = stream.next_symmetric();
  return y;
}

Eigen::VectorXd draw_parameters(const StreamId& id, int m) {
  Stream s(id);
  return draw_parameters(s, m);
}

}  // namespace roughscat::randfield
