#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace natalia {

// Portable seeded randomness.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard. Standard distributions and std::shuffle are implementation
// defined, so bounded draws and shuffling are done here:
//
//   uniform_below(n): draw x from the engine; reject while
//                     x >= 2^64 - (2^64 mod n); return x mod n.
//   shuffle(v):       for i = len-1 down to 1: j = uniform_below(i+1),
//                     swap(v[i], v[j]).
//
// docs/formats.md repeats this so manifests can be reproduced elsewhere.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  std::uint64_t uniform_below(std::uint64_t bound);

  template <typename T>
  void shuffle(std::span<T> items) {
    if (items.size() < 2) return;
    for (std::size_t i = items.size() - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(uniform_below(i + 1));
      std::swap(items[i], items[j]);
    }
  }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    shuffle(std::span<T>(items));
  }

 private:
  std::mt19937_64 engine_;
};

/// floor(fraction * n), tolerant of the representation error in decimal
/// fractions (0.29 * 100 is 28.999999999999996 in binary).
std::size_t fraction_floor(double fraction, std::size_t n) noexcept;

}  // namespace natalia
