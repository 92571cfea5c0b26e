#include "natalia/common/random.hpp"

#include <cmath>
#include <limits>

namespace natalia {

std::uint64_t SeededRng::uniform_below(std::uint64_t bound) {
  if (bound <= 1) return 0;
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t rem = (max % bound + 1) % bound;  // 2^64 mod bound
  std::uint64_t x = engine_();
  if (rem != 0) {
    const std::uint64_t limit = 0 - rem;  // 2^64 - rem
    while (x >= limit) x = engine_();
  }
  return x % bound;
}

std::size_t fraction_floor(double fraction, std::size_t n) noexcept {
  const double product = fraction * static_cast<double>(n);
  double k = std::floor(product);
  if ((k + 1.0) - product < 1e-9 * std::max(1.0, product)) k += 1.0;
  if (k < 0.0) return 0;
  return std::min(n, static_cast<std::size_t>(k));
}

}  // namespace natalia
