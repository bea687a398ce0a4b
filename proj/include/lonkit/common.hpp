#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace lonkit {

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct ValidationError : Error {
  using Error::Error;
};
struct MissingMeasurementError : Error {
  using Error::Error;
};
struct MeasurementFailureError : Error {
  using Error::Error;
};
struct ParseError : Error {
  using Error::Error;
};
struct TimeoutError : Error {
  using Error::Error;
};
struct InconsistentTraceError : Error {
  using Error::Error;
};
struct UndefinedMetricError : Error {
  using Error::Error;
};
struct InsufficientDataError : Error {
  using Error::Error;
};

// splitmix64; used both as a seed scrambler and as the portable PRNG
// backing all sampling. std::uniform_int_distribution is not
// reproducible across standard libraries, so bounded draws are done by
// rejection below.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {
    // warm up so that small consecutive seeds decorrelate
    splitmix64(state_);
  }

  std::uint64_t next() { return splitmix64(state_); }

  // uniform in [0, bound), bound >= 1, rejection sampling
  std::uint64_t bounded(std::uint64_t bound) {
    if (bound <= 1) return 0;
    const std::uint64_t threshold = -bound % bound;
    for (;;) {
      std::uint64_t r = next();
      if (r >= threshold) return r % bound;
    }
  }

  // uniform double in [0, 1)
  double real() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(bounded(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t state_;
};

inline std::uint64_t fnv1a64(const std::string& s,
                             std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// order-sensitive 64-bit mixer for WL label refinement
inline std::uint64_t mix64(std::uint64_t h, std::uint64_t v) {
  std::uint64_t s = h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
  return splitmix64(s);
}

}  // namespace lonkit
