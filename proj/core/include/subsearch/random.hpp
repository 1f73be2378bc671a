#pragma once

#include <cstdint>
#include <string_view>

namespace subsearch {

/// 64-bit FNV-1a over the bytes of `text`.
std::uint64_t fnv1a64(std::string_view text);

/// SplitMix64 output function (Steele et al. finalizer) applied to `x`.
std::uint64_t splitmix64_mix(std::uint64_t x);

/// Deterministic random stream keyed by (master seed, string key).
///
/// The layout is fixed so that other implementations can reproduce it
/// bit-for-bit:
///   state0  = splitmix64_mix(master_seed ^ fnv1a64(key))
///   next()  = SplitMix64 step (state += 0x9E3779B97F4A7C15, then mix)
///   uniform = (next() >> 11) * 2^-53             in [0, 1)
///   normal  = Box-Muller on (1 - uniform, uniform), cosine branch first,
///             the sine branch is cached and returned by the following call.
class SubstreamRng {
 public:
  SubstreamRng(std::uint64_t master_seed, std::string_view key);
  explicit SubstreamRng(std::uint64_t state) : state_(state) {}

  std::uint64_t next_u64();
  double uniform();
  double standard_normal();
  double normal(double mean, double stddev) {
    return mean + stddev * standard_normal();
  }

 private:
  std::uint64_t state_;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace subsearch
