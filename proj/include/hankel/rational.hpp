#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace hankel {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Rat rat(long long n, long long d = 1) { return Rat(n, d); }

// n^e for e >= 0.
inline Int ipow(Int n, unsigned e) {
    Int r = 1;
    while (e) {
        if (e & 1) r *= n;
        n *= n;
        e >>= 1;
    }
    return r;
}

// x^e with negative exponents allowed (x != 0 then).
inline Rat rpow(const Rat& x, long long e) {
    if (e == 0) return Rat(1);
    if (x == 0) {
        if (e > 0) return Rat(0);
        throw std::domain_error("rpow: zero to negative power");
    }
    Rat base = e > 0 ? x : Rat(1) / x;
    unsigned long long k = e > 0 ? (unsigned long long)e : (unsigned long long)(-e);
    Rat r(1);
    while (k) {
        if (k & 1) r *= base;
        base *= base;
        k >>= 1;
    }
    return r;
}

inline long long to_ll(const Int& n) { return (long long)n; }

inline std::string rat_str(const Rat& x) {
    std::string s = numerator(x).str();
    if (denominator(x) != 1) s += "/" + denominator(x).str();
    return s;
}

} // namespace hankel
