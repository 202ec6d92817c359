#pragma once

#include <gmpxx.h>

#include <cstdint>

namespace dsim {

/// Exact rational used for virtual times and tags.
using Rational = mpq_class;

static_assert(sizeof(unsigned long) == sizeof(std::uint64_t), "LP64 required for GMP conversions");

inline Rational make_rational(std::uint64_t num, std::uint64_t den = 1) {
  Rational r(mpz_class(static_cast<unsigned long>(num)), mpz_class(static_cast<unsigned long>(den)));
  r.canonicalize();
  return r;
}

}  // namespace dsim
