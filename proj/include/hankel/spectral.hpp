#pragma once

#include "hankel/laurent.hpp"

#include <stdexcept>

namespace hankel {

// Exact evaluation at a pole of a resummed series or a substituted ratio.
struct pole_error : std::domain_error {
    using std::domain_error::domain_error;
};

// Ratio of Laurent polynomials over the cyclotomic tower, tagged with the
// residue field size q it is bound to (0 = unbound). While q is bound, h is
// eagerly reduced through h^2 = q, so h-exponents stay in {0, 1}.
//
// Equality is exact cross multiplication; normalize() only produces the
// canonical form (gcd-reduced, denominator a polynomial with unit leading
// coefficient) used for output.
class Spec {
public:
    Spec() : num_(), den_(Cyclo(1)), q_(0) {}
    explicit Spec(const Rat& r, long long q = 0) : num_(Cyclo(r)), den_(Cyclo(1)), q_(q) {}
    explicit Spec(const Cyclo& c, long long q = 0) : num_(c), den_(Cyclo(1)), q_(q) {}
    explicit Spec(long long n, long long q = 0) : Spec(Rat(n), q) {}

    static Spec from_ratio(Poly num, Poly den, long long q);
    static Spec variable(Var v, long long q);
    static Spec monomial(const Cyclo& c, const Exps& e, long long q);
    // q^(halves/2) as a power of h (reduced immediately when q > 0).
    static Spec q_power_half(long long halves, long long q);

    long long q() const { return q_; }
    Spec with_q(long long q) const;

    bool is_zero() const { return num_.is_zero(); }

    Spec operator-() const;
    Spec& operator+=(const Spec& o);
    Spec& operator-=(const Spec& o) { return *this += -o; }
    Spec& operator*=(const Spec& o);
    Spec& operator/=(const Spec& o) { return *this *= o.inverse(); }
    friend Spec operator+(Spec a, const Spec& b) { return a += b; }
    friend Spec operator-(Spec a, const Spec& b) { return a -= b; }
    friend Spec operator*(Spec a, const Spec& b) { return a *= b; }
    friend Spec operator/(Spec a, const Spec& b) { return a /= b; }

    Spec inverse() const;
    Spec pow(long long e) const;

    bool operator==(const Spec& o) const;
    bool operator!=(const Spec& o) const { return !(*this == o); }

    Spec subst_monomial(Var v, const Cyclo& c, const Exps& e) const;
    Spec subst_value(Var v, const Cyclo& c) const { return subst_monomial(v, c, exps_zero()); }

    bool depends_on(Var v) const;

    // cyclotomic conjugation on all coefficients; variables are fixed
    Spec conjugated() const;

    // Requires a constant (variable-free) value; the exact rational when the
    // cyclotomic part is trivial.
    Cyclo constant_value() const;

    void normalize();
    Spec normalized() const { Spec r = *this; r.normalize(); return r; }

    const Poly& num() const { return num_; }
    const Poly& den() const { return den_; }

    std::string str() const;

private:
    Poly num_, den_;
    long long q_;

    void reduce_h();
    static long long unify_q(long long a, long long b);
    void maybe_trim();
};

} // namespace hankel
