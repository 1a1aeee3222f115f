#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <random>

namespace ifsm {

/// Philox4x32-10 block function (Salmon, Moraes, Dror, Shaw; SC'11): maps a
/// 128-bit counter and a 64-bit key to 128 pseudo-random bits.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

/// Counter-based random stream identified by (seed, stream id).
///
/// The seed is the Philox key; the counter's high 64 bits hold the stream id
/// and its low 64 bits the block index. Streams with different ids therefore
/// visit disjoint counter ranges and never overlap. Satisfies
/// UniformRandomBitGenerator, so it plugs into <random> distributions.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

  /// Standard normal draw.
  double normal();
  /// Uniform draw on [0, 1).
  double uniform();

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int available_ = 0;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace ifsm
