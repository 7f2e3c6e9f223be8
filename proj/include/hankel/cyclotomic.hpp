#pragma once

#include "hankel/rational.hpp"

#include <map>
#include <string>

namespace hankel {

// Element of the cyclotomic tower: a polynomial in zeta_n with rational
// coefficients, kept reduced mod the n-th cyclotomic polynomial.
//
// Invariants:
//  - order_ is 1 or satisfies order_ % 4 != 2 (twice-odd orders fold at
//    construction via zeta_{2m} = -zeta_m^{(m+1)/2}).
//  - c_ holds basis coordinates: exponents < phi(order_), no zero entries.
//  - A rational value therefore always has at most the exponent-0 entry,
//    whatever order_ is; order minimization to the smallest subfield in the
//    tower is a separate pass (minimize), applied on output paths.
class Cyclo {
public:
    Cyclo() : order_(1) {}
    Cyclo(const Rat& r);
    Cyclo(long long n) : Cyclo(Rat(n)) {}
    Cyclo(int n) : Cyclo(Rat(n)) {}

    static Cyclo root_of_unity(unsigned n, long long k);

    bool is_zero() const { return c_.empty(); }
    bool is_rational() const;
    Rat rational_value() const;

    Cyclo operator-() const;
    Cyclo& operator+=(const Cyclo& o);
    Cyclo& operator-=(const Cyclo& o);
    Cyclo& operator*=(const Cyclo& o);
    Cyclo& operator/=(const Cyclo& o) { return *this *= o.inverse(); }

    friend Cyclo operator+(Cyclo a, const Cyclo& b) { return a += b; }
    friend Cyclo operator-(Cyclo a, const Cyclo& b) { return a -= b; }
    friend Cyclo operator*(Cyclo a, const Cyclo& b) { return a *= b; }
    friend Cyclo operator/(Cyclo a, const Cyclo& b) { return a /= b; }

    Cyclo inverse() const;
    Cyclo conjugate() const;
    Cyclo galois(unsigned k) const;
    Cyclo pow(long long e) const;

    bool operator==(const Cyclo& o) const;
    bool operator!=(const Cyclo& o) const { return !(*this == o); }

    // Rewrites the element in the smallest cyclotomic field of the tower
    // containing it. Canonical form for printing and serialization.
    void minimize();
    Cyclo minimized() const { Cyclo r = *this; r.minimize(); return r; }

    unsigned order() const { return order_; }
    const std::map<unsigned, Rat>& coeffs() const { return c_; }

    std::string str() const;

private:
    unsigned order_;
    std::map<unsigned, Rat> c_;

    void reduce();
    Cyclo promoted(unsigned target) const;
    bool try_descend(unsigned m);
};

unsigned euler_phi(unsigned n);

} // namespace hankel
