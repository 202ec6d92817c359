#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <string>

namespace dsim {

/// Simulation clock value: integer nanoseconds since the start of the run.
/// Also used for non-negative intervals (propagation delays, tx times).
class SimTime {
 public:
  constexpr SimTime() = default;
  constexpr explicit SimTime(std::uint64_t ns) : ns_(ns) {}

  static constexpr SimTime ns(std::uint64_t v) { return SimTime(v); }
  static constexpr SimTime us(std::uint64_t v) { return SimTime(v * 1'000ULL); }
  static constexpr SimTime ms(std::uint64_t v) { return SimTime(v * 1'000'000ULL); }
  static constexpr SimTime s(std::uint64_t v) { return SimTime(v * 1'000'000'000ULL); }
  static constexpr SimTime max() { return SimTime(std::numeric_limits<std::uint64_t>::max()); }

  constexpr std::uint64_t ticks() const { return ns_; }
  constexpr double seconds() const { return static_cast<double>(ns_) * 1e-9; }

  constexpr auto operator<=>(const SimTime&) const = default;

  constexpr SimTime& operator+=(SimTime d) {
    ns_ += d.ns_;
    return *this;
  }
  friend constexpr SimTime operator+(SimTime a, SimTime b) { return SimTime(a.ns_ + b.ns_); }
  /// Saturates at zero.
  friend constexpr SimTime operator-(SimTime a, SimTime b) {
    return SimTime(a.ns_ > b.ns_ ? a.ns_ - b.ns_ : 0);
  }
  friend constexpr SimTime operator*(SimTime a, std::uint64_t k) { return SimTime(a.ns_ * k); }

 private:
  std::uint64_t ns_ = 0;
};

/// Signed difference a - b in nanoseconds.
constexpr std::int64_t diff_ns(SimTime a, SimTime b) {
  return static_cast<std::int64_t>(a.ticks()) - static_cast<std::int64_t>(b.ticks());
}

/// Time to serialize `bytes` at `rate_bps`, rounded up to the next nanosecond.
constexpr SimTime transmission_time(std::uint64_t bytes, std::uint64_t rate_bps) {
  const unsigned __int128 num = static_cast<unsigned __int128>(bytes) * 8U * 1'000'000'000U;
  return SimTime(static_cast<std::uint64_t>((num + rate_bps - 1) / rate_bps));
}

/// Parses "200", "200s", "1ms", "10.24us", "5ns" exactly (no floating point).
/// A bare number is seconds. Throws std::invalid_argument on malformed input or
/// sub-nanosecond precision.
SimTime parse_duration(const std::string& text);

/// Renders nanoseconds as seconds with nine fractional digits.
std::string format_seconds(std::int64_t ns);

}  // namespace dsim
