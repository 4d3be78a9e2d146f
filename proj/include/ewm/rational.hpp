#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

namespace ewm {

// Exact rational arithmetic. mpq_class canonicalizes after every arithmetic
// operation, so denominator > 0 and gcd(|num|, den) = 1 hold throughout.
using Rational = mpq_class;

using RationalVector = std::vector<Rational>;
using RationalMatrix = std::vector<std::vector<Rational>>;

inline Rational rat(long num, long den = 1) {
    Rational q(num, den);
    q.canonicalize();
    return q;
}

inline std::string to_string(const Rational& q) { return q.get_str(); }

inline double to_double(const Rational& q) { return q.get_d(); }

}  // namespace ewm
