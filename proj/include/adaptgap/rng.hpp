#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace adaptgap {

/// Reproducible random stream identified by (seed, stream id).
///
/// Identical ids give identical draw sequences. Child streams obtained with
/// derive() are keyed by a SplitMix64 mix of the parent id, so trials,
/// stages and levels each get their own sequence without coordinating.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  /// Fresh stream with the same seed and a stream id derived from (stream_id, child).
  RngStream derive(std::uint64_t child) const;

  /// Uniform on {0, ..., n - 1}; n must be positive.
  std::size_t uniform_index(std::size_t n);
  /// +1 or -1 with probability 1/2 each.
  double sign();
  /// Uniform on [0, 1).
  double uniform01();

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace adaptgap
