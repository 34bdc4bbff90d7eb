#pragma once
#include <cmath>
#include <cstdint>
#include <numbers>

namespace rdlab {

// Counter-based pseudo-random stream. Each (key, counter) pair maps to a
// 64-bit word through a SplitMix64-style finalizer, so independent streams are
// cheap to mint (no state to carry around beyond the key and a counter) and a
// stream's output is reproducible regardless of how work is split across
// threads: lane identifiers go into the key, draws advance the counter.
class RngStream {
 public:
  explicit RngStream(std::uint64_t key) : key_(key) {}

  // Derive a stream for a labelled lane of some job, e.g. one replicate of a
  // study or one chain. Mixing twice keeps (seed, a, b) collisions out of
  // reach of anything we do here.
  static RngStream substream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    return RngStream(mix(seed ^ mix(a + 0x2545f4914f6cdd1dULL) ^ (mix(b) << 1)));
  }

  std::uint64_t next_u64() { return mix(key_ + (++ctr_) * 0x9e3779b97f4a7c15ULL); }

  // Uniform on (0,1): top 53 bits, centred so 0 and 1 are unreachable.
  double uniform01() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u = uniform01();
    double v = uniform01();
    double r = std::sqrt(-2.0 * std::log(u));
    double a = 2.0 * std::numbers::pi * v;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  std::uint64_t uniform_index(std::uint64_t n) {
    // Multiply-shift map; bias is O(n / 2^64), irrelevant at our sizes.
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_ = 0;
  std::uint64_t ctr_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace rdlab
