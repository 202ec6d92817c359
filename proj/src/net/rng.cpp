#include "dsim/net/rng.hpp"

#include <limits>

#include "dsim/core/error.hpp"

namespace dsim {

std::uint64_t Rng::uniform(std::uint64_t lo, std::uint64_t hi) {
  if (lo > hi) throw BadRange("uniform draw with lo > hi");
  const std::uint64_t span = hi - lo;
  if (span == std::numeric_limits<std::uint64_t>::max()) return next();
  const std::uint64_t range = span + 1;
  // largest multiple of range that fits in 2^64
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - (std::numeric_limits<std::uint64_t>::max() % range + 1) % range;
  for (;;) {
    const std::uint64_t u = next();
    if (u <= limit) return lo + u % range;
  }
}

}  // namespace dsim
