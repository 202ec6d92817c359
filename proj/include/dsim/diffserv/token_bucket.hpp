#pragma once

#include <cstdint>

#include "dsim/core/sim_time.hpp"

namespace dsim {

enum class MeterResult : std::uint8_t { in_profile, out_profile };

/// Single-rate token bucket meter. Tokens are kept exactly as an integer
/// count of 1/(8e9) byte units, so refill over any whole number of
/// nanoseconds (cir_bps * dt_ns) adds an integer. Starts full at time zero.
class TokenBucket {
 public:
  static constexpr std::uint64_t kScale = 8'000'000'000ULL;  // units per byte

  TokenBucket(std::uint64_t cir_bps, std::uint64_t cbs_bytes, SimTime start = SimTime{});

  /// Refills up to `t`, then admits `size_bytes` if enough tokens are present.
  /// Out-of-profile packets leave the token count unchanged.
  /// Throws ClockRegression if `t` precedes the last update.
  MeterResult meter(std::uint32_t size_bytes, SimTime t);

  /// Refill only; same error contract as meter().
  void refill(SimTime t);

  std::uint64_t cir_bps() const { return cir_bps_; }
  std::uint64_t cbs_bytes() const { return cbs_bytes_; }
  SimTime last_update() const { return last_update_; }
  /// Exact fill in 1/kScale byte units.
  std::uint64_t tokens_scaled() const { return tokens_; }
  double tokens_bytes() const { return static_cast<double>(tokens_) / static_cast<double>(kScale); }

 private:
  std::uint64_t cir_bps_;
  std::uint64_t cbs_bytes_;
  std::uint64_t capacity_;
  std::uint64_t tokens_;
  SimTime last_update_;
};

}  // namespace dsim
