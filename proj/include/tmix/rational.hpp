#pragma once

// Exact rational arithmetic for cylinder-set geometry.
//
// Branch cells, affine offsets and cylinder cubes are all rational when the
// map is specified with rational data, and the partition identities we test
// (sides multiply exactly, measures sum to 1) only hold exactly in exact
// arithmetic.  Word depth can push denominators past 64/128 bits (3^40
// already overflows int64), so we use an arbitrary-precision rational.

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <vector>

#include "tmix/errors.hpp"

namespace tmix {

// et_off: plain value semantics (arithmetic yields numbers, not expression
// templates), which std::min/max and our helpers rely on.
using BigInt = boost::multiprecision::number<boost::multiprecision::cpp_int_backend<>,
                                             boost::multiprecision::et_off>;
using Rat = boost::multiprecision::number<
    boost::multiprecision::backends::rational_adaptor<boost::multiprecision::cpp_int_backend<>>,
    boost::multiprecision::et_off>;

inline double to_double(const Rat& r) { return r.convert_to<double>(); }

inline bool is_integer(const Rat& r) { return denominator(r) == 1; }

// Floor of a rational, as a BigInt.
inline BigInt rat_floor(const Rat& r) {
    BigInt q = numerator(r) / denominator(r);
    if (numerator(r) < 0 && q * denominator(r) != numerator(r)) --q;
    return q;
}

// Parses "a/b", "a", or a JSON double.  Doubles are converted exactly (every
// finite double is a dyadic rational), so "0.5" and "1/2" agree bit for bit.
Rat parse_rational(const std::string& s);
Rat rational_from_double(double x);

std::string rat_to_string(const Rat& r);

using RatVec = std::vector<Rat>;

} // namespace tmix
