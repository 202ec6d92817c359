#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace dsim {

/// Seedable 64-bit generator with a portable output sequence. The engine is
/// std::mt19937_64 (its output is fixed by the standard); integer draws use
/// rejection sampling instead of std::uniform_int_distribution, whose
/// algorithm is implementation-defined.
class Rng {
 public:
  static constexpr std::string_view kAlgorithm = "mt19937_64/rejection-uniform";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform on the closed range [lo, hi]. Requires lo <= hi.
  std::uint64_t uniform(std::uint64_t lo, std::uint64_t hi);

 private:
  std::mt19937_64 engine_;
};

}  // namespace dsim
