#pragma once

#include <cstdint>

namespace pslab {

// Counter-based pseudo-random stream. Every draw is a pure function of
// (seed, stream, counter), so samples can be partitioned across workers in
// any way without changing the result.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed), stream_(stream) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  // 64 mixed bits at a given counter.
  std::uint64_t bits_at(std::uint64_t counter) const {
    std::uint64_t z = seed_ + 0x9e3779b97f4a7c15ULL * (stream_ + 1);
    z ^= counter + 0x9e3779b97f4a7c15ULL;
    z = mix(z + 0x9e3779b97f4a7c15ULL * counter);
    return mix(z ^ (stream_ * 0xbf58476d1ce4e5b9ULL + 0x94d049bb133111ebULL));
  }

  // Uniform double in [0,1).
  double uniform_at(std::uint64_t counter) const {
    return static_cast<double>(bits_at(counter) >> 11) * 0x1.0p-53;
  }

  // Uniform double in [lo,hi).
  double uniform_at(std::uint64_t counter, double lo, double hi) const {
    return lo + (hi - lo) * uniform_at(counter);
  }

  // Sequential convenience interface; still reproducible since the cursor is
  // just a counter.
  double next_uniform() { return uniform_at(cursor_++); }
  double next_uniform(double lo, double hi) { return uniform_at(cursor_++, lo, hi); }
  std::uint64_t next_bits() { return bits_at(cursor_++); }

  CounterRng substream(std::uint64_t stream) const { return CounterRng(seed_, stream); }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t cursor_ = 0;
};

}  // namespace pslab
