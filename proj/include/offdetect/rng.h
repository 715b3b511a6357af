#ifndef OFFDETECT_RNG_H_
#define OFFDETECT_RNG_H_

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace offdetect {

// Deterministic across standard libraries: std::mt19937_64 is fully
// specified, but std::uniform_int_distribution and std::shuffle are not, so
// bounded draws and shuffles are implemented here.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t Next() { return engine_(); }

  // Uniform in [0, bound). bound must be > 0.
  uint64_t Below(uint64_t bound) {
    const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return v % bound;
  }

  template <typename T>
  void Shuffle(std::span<T> items) {
    for (size_t i = items.size(); i > 1; --i) {
      const size_t j = static_cast<size_t>(Below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// splitmix64 finalizer; used to derive independent per-member seeds.
inline uint64_t MixSeed(uint64_t seed, uint64_t stream) {
  uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace offdetect

#endif  // OFFDETECT_RNG_H_
