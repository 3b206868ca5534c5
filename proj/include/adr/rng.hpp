#pragma once

#include <cmath>
#include <cstdint>

namespace adr {

// Named generator streams. Every random draw in the planner comes from a
// Pcg64 seeded with (run seed, stream id), so two runs with the same seed
// replay bit-identically and the consumers never share a draw sequence.
namespace rng_stream {
inline constexpr std::uint64_t kEnvironment = 1;  // per-episode risk process
inline constexpr std::uint64_t kNetworkInit = 2;  // value-network weight init
inline constexpr std::uint64_t kExploration = 3;  // epsilon-greedy draws
inline constexpr std::uint64_t kReplay = 4;       // replay-buffer sampling
inline constexpr std::uint64_t kCloud = 5;        // synthetic catalog generation
inline constexpr std::uint64_t kEvaluation = 6;   // greedy-evaluation episodes
}  // namespace rng_stream

// PCG XSL-RR 128/64 (the "pcg64" setseq member of the PCG family).
// 128-bit LCG state, 64-bit output, selectable stream. Draw discipline is
// part of the reproducibility contract:
//   - next_u64 / next_double consume exactly one output each,
//   - uniform_below consumes exactly one output (multiply-shift bound),
//   - normal consumes exactly two outputs (Box-Muller, no caching).
class Pcg64 {
 public:
  Pcg64(std::uint64_t seed, std::uint64_t stream) {
    inc_ = (static_cast<u128>(stream) << 1u) | 1u;
    state_ = 0u;
    advance();
    state_ += seed;
    advance();
  }

  std::uint64_t next_u64() {
    advance();
    const auto xored = static_cast<std::uint64_t>(state_ >> 64u) ^
                       static_cast<std::uint64_t>(state_);
    const auto rot = static_cast<unsigned>(state_ >> 122u);
    return (xored >> rot) | (xored << ((64u - rot) & 63u));
  }

  // Uniform in [0, 1) with 53 random mantissa bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11u) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound). Bias is bound/2^64, far below anything
  // observable here; chosen over rejection sampling to keep the draw count
  // fixed at one.
  std::uint64_t uniform_below(std::uint64_t bound) {
    return static_cast<std::uint64_t>(
        (static_cast<u128>(next_u64()) * bound) >> 64u);
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Standard normal via Box-Muller. The sine partner is discarded so every
  // call costs exactly two uniforms.
  double normal() {
    const double u1 = next_double();
    const double u2 = next_double();
    return std::sqrt(-2.0 * std::log1p(-u1)) *
           std::cos(6.283185307179586476925286766559 * u2);
  }

 private:
  using u128 = unsigned __int128;
  static constexpr u128 kMultiplier =
      (static_cast<u128>(2549297995355413924ull) << 64u) | 4865540595714422341ull;

  void advance() { state_ = state_ * kMultiplier + inc_; }

  u128 state_ = 0;
  u128 inc_ = 0;
};

}  // namespace adr
