#include "hivekit/rng.hpp"

#include <cmath>
#include <numbers>

namespace hivekit {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kStreamSalt = 0x632BE59BD9B4E019ULL;
}  // namespace

std::uint64_t CounterRng::finalize(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream) : state_{seed, stream, 0, 0} {}

std::uint64_t CounterRng::next_u64() {
  const std::uint64_t key = state_[0] ^ finalize(state_[1] + kStreamSalt);
  const std::uint64_t k = ++state_[2];
  return finalize(key + k * kGolden);
}

double CounterRng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double CounterRng::uniform(double lo, double hi) {
  const double u = uniform();
  if (lo == hi) return lo;
  return lo + (hi - lo) * u;
}

double CounterRng::normal() {
  const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t CounterRng::below(std::uint64_t n) {
  return next_u64() % n;
}

}  // namespace hivekit
