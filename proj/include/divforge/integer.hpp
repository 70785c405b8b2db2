#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>

namespace divforge {

/// Exact integer used for every coefficient, intersection number and dimension.
using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Base class for all engine errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when an arithmetic genus or Euler characteristic would be a half-integer.
class ParityError : public Error {
public:
    using Error::Error;
};

/// Raised when a name (generator, curve, point, torsion symbol) is not known.
class UnknownName : public Error {
public:
    using Error::Error;
};

inline std::string to_string(const Integer& v) { return v.str(); }

inline long long to_ll(const Integer& v) {
    if (v > Integer(std::numeric_limits<long long>::max()) ||
        v < Integer(std::numeric_limits<long long>::min()))
        throw Error("integer out of machine range: " + v.str());
    return static_cast<long long>(v);
}

/// n choose k, zero outside 0 <= k <= n.
inline Integer binomial(const Integer& n, const Integer& k) {
    if (k < 0 || n < 0 || k > n) return 0;
    Integer kk = k > n - k ? n - k : k;
    Integer r = 1;
    for (Integer i = 1; i <= kk; ++i) {
        r *= n - kk + i;
        r /= i;
    }
    return r;
}

/// Floor division for exact integers (cpp_int division truncates toward zero).
inline Integer floor_div(const Integer& a, const Integer& b) {
    Integer q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

inline Integer ceil_div(const Integer& a, const Integer& b) { return -floor_div(-a, b); }

/// Nonnegative remainder modulo n > 0.
inline Integer mod_positive(const Integer& a, const Integer& n) {
    Integer r = a % n;
    if (r < 0) r += n;
    return r;
}

}  // namespace divforge
