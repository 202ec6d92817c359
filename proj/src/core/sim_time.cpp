#include "dsim/core/sim_time.hpp"

#include <cctype>
#include <cstdio>
#include <stdexcept>

namespace dsim {

SimTime parse_duration(const std::string& text) {
  std::size_t i = 0;
  while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  std::uint64_t whole = 0;
  std::uint64_t frac = 0;
  int frac_digits = 0;
  bool any_digit = false;
  for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
    whole = whole * 10 + static_cast<std::uint64_t>(text[i] - '0');
    any_digit = true;
  }
  if (i < text.size() && text[i] == '.') {
    for (++i; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
      if (frac_digits >= 18) throw std::invalid_argument("too many fractional digits: " + text);
      frac = frac * 10 + static_cast<std::uint64_t>(text[i] - '0');
      ++frac_digits;
      any_digit = true;
    }
  }
  if (!any_digit) throw std::invalid_argument("not a duration: '" + text + "'");
  std::string unit;
  for (; i < text.size(); ++i) {
    if (!std::isspace(static_cast<unsigned char>(text[i]))) unit.push_back(text[i]);
  }
  int exp10 = 0;  // ns per unit as a power of ten
  if (unit.empty() || unit == "s") {
    exp10 = 9;
  } else if (unit == "ms") {
    exp10 = 6;
  } else if (unit == "us") {
    exp10 = 3;
  } else if (unit == "ns") {
    exp10 = 0;
  } else {
    throw std::invalid_argument("unknown duration unit '" + unit + "' in '" + text + "'");
  }
  std::uint64_t scale = 1;
  for (int k = 0; k < exp10; ++k) scale *= 10;
  std::uint64_t ns = whole * scale;
  // frac / 10^frac_digits * 10^exp10 must be integral
  int shift = exp10 - frac_digits;
  if (shift >= 0) {
    std::uint64_t m = 1;
    for (int k = 0; k < shift; ++k) m *= 10;
    ns += frac * m;
  } else {
    std::uint64_t d = 1;
    for (int k = 0; k < -shift; ++k) d *= 10;
    if (frac % d != 0) throw std::invalid_argument("sub-nanosecond duration: " + text);
    ns += frac / d;
  }
  return SimTime(ns);
}

std::string format_seconds(std::int64_t ns) {
  const bool neg = ns < 0;
  const std::uint64_t mag = neg ? static_cast<std::uint64_t>(-(ns + 1)) + 1 : static_cast<std::uint64_t>(ns);
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s%llu.%09llu", neg ? "-" : "",
                static_cast<unsigned long long>(mag / 1'000'000'000ULL),
                static_cast<unsigned long long>(mag % 1'000'000'000ULL));
  return buf;
}

}  // namespace dsim
