#pragma once

#include <array>
#include <cstdint>

namespace ndpc {

/// Philox4x32-10 block function. Maps a 128-bit counter and a 64-bit key to
/// 128 pseudo-random bits.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Counter-based random stream keyed by (seed, stream_id).
///
/// Draw i of a stream is a pure function of (seed, stream_id, i), so any
/// sample can be addressed without generating its predecessors. The
/// sequential `next_*` calls advance an internal position; copying a stream
/// copies its position.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id) : seed_(seed), stream_id_(stream_id) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }
  std::uint64_t position() const { return position_; }

  /// Independent child stream, e.g. one per Monte Carlo sample index.
  RngStream substream(std::uint64_t index) const;

  std::uint64_t u64_at(std::uint64_t index) const;
  /// Uniform on [0, 1) with 53 random bits.
  double uniform_at(std::uint64_t index) const;
  /// Uniform on the open interval (0, 1).
  double open_uniform_at(std::uint64_t index) const;
  /// Standard normal via inverse CDF of `open_uniform_at(index)`.
  double gaussian_at(std::uint64_t index) const;

  std::uint64_t next_u64() { return u64_at(position_++); }
  double next_uniform() { return uniform_at(position_++); }
  double next_gaussian() { return gaussian_at(position_++); }
  /// Uniform integer in [0, n) by multiply-shift on 64 bits; n >= 1.
  std::uint64_t next_below(std::uint64_t n);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t position_ = 0;
};

/// Stream ids for the subsystems fed from a single user seed.
namespace streams {
inline constexpr std::uint64_t kEncoderInit = 0x11;
inline constexpr std::uint64_t kDecoderInit = 0x12;
inline constexpr std::uint64_t kTraining = 0x20;
inline constexpr std::uint64_t kEvaluation = 0x30;
inline constexpr std::uint64_t kDither = 0x40;
}  // namespace streams

/// Added to a training seed to obtain the matching evaluation seed.
inline constexpr std::uint64_t kEvalSeedOffset = 0x9E3779B97F4A7C15ULL;

/// splitmix64 finalizer; used to derive substream ids.
std::uint64_t mix64(std::uint64_t x);

/// Inverse of the standard normal CDF on (0, 1).
double inverse_normal_cdf(double p);

}  // namespace ndpc
