#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

namespace qdesign {

// All design-parameter arithmetic is exact. Int grows without bound;
// Rat is always kept in lowest terms by the backend.
using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Int ipow(Int base, unsigned exp) {
  Int r = 1;
  while (exp) {
    if (exp & 1) r *= base;
    base *= base;
    exp >>= 1;
  }
  return r;
}

inline bool divides(const Int& a, const Int& b) {
  // a | b, with the convention 0 | 0 only
  if (a == 0) return b == 0;
  return b % a == 0;
}

inline std::string to_string(const Int& v) { return v.str(); }

}  // namespace qdesign
