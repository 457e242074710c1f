#pragma once

#include <gmpxx.h>

#include <string>

#include "scanmix/errors.hpp"

namespace scanmix {

// Exact arithmetic backend. All influence and invariance comparisons run on
// canonical mpq_class values; doubles only enter when rendering curves.
using Rational = mpq_class;

inline Rational make_ratio(long num, long den) {
  if (den == 0) fail(Errc::ParamOutOfRange, "zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

// Integer power by repeated squaring; exponents stay small (a few hundred).
inline Rational rat_pow(const Rational& base, unsigned long e) {
  Rational acc(1);
  Rational b = base;
  while (e > 0) {
    if (e & 1) acc *= b;
    b *= b;
    e >>= 1;
  }
  return acc;
}

Rational parse_rational(const std::string& text);
std::string rational_str(const Rational& r);

inline double to_double(const Rational& r) { return r.get_d(); }
inline double to_double(double x) { return x; }

inline Rational scalar_abs(const Rational& x) { return abs(x); }
inline double scalar_abs(double x) { return x < 0 ? -x : x; }

}  // namespace scanmix
