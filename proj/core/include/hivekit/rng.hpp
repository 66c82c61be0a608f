#pragma once

#include <cstdint>

#include "hivekit/types.hpp"

namespace hivekit {

/// Counter-based 64-bit generator. Output k of stream (seed, stream) is
///
///   key = seed ^ finalize(stream + 0x632BE59BD9B4E019)
///   out = finalize(key + (k + 1) * 0x9E3779B97F4A7C15)
///
/// where finalize is the SplitMix64 output mix (shift 30, mul
/// 0xBF58476D1CE4E5B9, shift 27, mul 0x94D049BB133111EB, shift 31). Any
/// language with wrapping 64-bit arithmetic reproduces the stream exactly.
class CounterRng {
 public:
  CounterRng() : CounterRng(0, 0) {}
  CounterRng(std::uint64_t seed, std::uint64_t stream);
  explicit CounterRng(const RngState& state) : state_(state) {}

  std::uint64_t next_u64();

  /// (x >> 11) * 2^-53, in [0, 1).
  double uniform();
  /// lo + (hi - lo) * uniform(); exactly lo when lo == hi.
  double uniform(double lo, double hi);
  /// Box-Muller, cosine branch; consumes two outputs per call.
  double normal();
  /// next_u64() % n. The modulo bias is below 2^-50 for the small n used here.
  std::uint64_t below(std::uint64_t n);

  const RngState& state() const { return state_; }
  std::uint64_t counter() const { return state_[2]; }

  static std::uint64_t finalize(std::uint64_t z);

 private:
  RngState state_{};  // seed, stream, counter, reserved (0)
};

/// Stream ids carved out of one env seed. Each episode e uses streams
/// 4e+1 (scene layout), 4e+2 (sensor noise) and 4e+3 (goal sampling).
namespace rng_stream {
constexpr std::uint64_t scene(std::uint64_t episode) { return 4 * episode + 1; }
constexpr std::uint64_t noise(std::uint64_t episode) { return 4 * episode + 2; }
constexpr std::uint64_t goal(std::uint64_t episode) { return 4 * episode + 3; }
constexpr std::uint64_t policy(std::uint64_t episode) { return 4 * episode + 4; }
}  // namespace rng_stream

}  // namespace hivekit
