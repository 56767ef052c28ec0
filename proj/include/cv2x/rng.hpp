#pragma once
#include <cstdint>
#include <cmath>

namespace cv2x {

// Counter-based deterministic RNG. Each logical consumer derives its own
// stream from (seed, domain, a, b, c) so draws never depend on scheduling
// order elsewhere in the program. Core mixer is SplitMix64.
namespace rng {

enum class Domain : uint64_t {
  Placement = 1,
  Phase = 2,
  MacStream = 3,
  Shadowing = 4,
  Decode = 5,
};

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class Stream {
public:
  static Stream keyed(uint64_t seed, Domain domain, uint64_t a = 0,
                      uint64_t b = 0, uint64_t c = 0) {
    uint64_t s = splitmix64(seed ^ 0xa5a5a5a5a5a5a5a5ULL);
    s = splitmix64(s ^ static_cast<uint64_t>(domain));
    s = splitmix64(s ^ a);
    s = splitmix64(s ^ b);
    s = splitmix64(s ^ c);
    return Stream(s);
  }

  uint64_t next_u64() {
    counter_ += 1;
    return splitmix64(state_ ^ (counter_ * 0xd1342543de82ef95ULL));
  }

  // Uniform in [0, 1). 53-bit mantissa.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [lo, hi] inclusive, rejection-sampled (unbiased).
  uint64_t uniform_int(uint64_t lo, uint64_t hi) {
    uint64_t range = hi - lo + 1;  // hi >= lo required; range 0 means full span
    if (range == 0) return next_u64();
    uint64_t limit = UINT64_MAX - UINT64_MAX % range;
    uint64_t v = next_u64();
    while (v >= limit) v = next_u64();
    return lo + v % range;
  }

  // Standard normal via Box-Muller; always burns exactly two uniforms so a
  // stream keyed per event yields reproducible values regardless of history.
  double gaussian() {
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

private:
  explicit Stream(uint64_t state) : state_(state) {}
  uint64_t state_;
  uint64_t counter_ = 0;
};

}  // namespace rng
}  // namespace cv2x
