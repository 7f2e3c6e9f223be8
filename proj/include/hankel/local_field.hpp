#pragma once

#include "hankel/cyclotomic.hpp"

#include <array>
#include <stdexcept>
#include <string>

namespace hankel {

// Raised when a value is not resolved at the precision an operation needs.
// required_exponent is the smallest precision exponent that would suffice.
struct precision_error : std::runtime_error {
    int required_exponent;
    precision_error(const std::string& msg, int required)
        : std::runtime_error(msg + " (required precision exponent " +
                             std::to_string(required) + ")"),
          required_exponent(required) {}
};

// x != 0, returns v with x = p^v * unit.
long long val_p(const Rat& x, long long p);
Rat unit_part(const Rat& x, long long p);
// x integral at p; canonical residue in [0, m) for m a power of p.
long long residue_mod(const Rat& x, long long m, long long p);
long long inv_mod(long long a, long long m);
long long pow_mod(long long b, long long e, long long m);
// Exact square-class test in Q_p (Hensel: units are squares iff square
// mod p for odd p, iff 1 mod 8 for p = 2).
bool padic_is_square(long long p, const Rat& x);

// Element of Q_p known modulo p^prec. Invariant: value == 0 or
// val_p(value) < prec (unresolvable digits are canonicalized to zero).
class Padic {
public:
    static constexpr int EXACT = 1 << 28;

    Padic(long long p, const Rat& v, int prec = EXACT);

    long long p() const { return p_; }
    const Rat& approx() const { return v_; }
    int prec() const { return prec_; }
    bool is_exact() const { return prec_ >= EXACT; }
    bool is_zero() const { return v_ == 0 && is_exact(); }

    // Throws precision_error when the element is indistinguishable from 0
    // at the stored precision; throws domain_error on exact zero.
    long long valuation() const;

    Padic operator+(const Padic& o) const;
    Padic operator-(const Padic& o) const;
    Padic operator*(const Padic& o) const;

private:
    long long p_;
    Rat v_;
    int prec_;
    int effective_val() const;
};

// Local field in scope: Q_p (degree 1) or a quadratic extension of it.
// Extension elements are a + b*omega with omega = sqrt(D) or (1+sqrt(D))/2
// (half_basis), whichever generates the maximal order.
struct LocalField {
    long long p = 0;
    int e = 1, f = 1;
    Rat D = 0;
    bool half_basis = false;
    int psi_conductor = 0;            // val of the inverse different dual to psi∘tr
    std::array<Rat, 2> pi = {Rat(0), Rat(0)}; // uniformizer coordinates

    int degree() const { return e * f; }
    long long q() const { return f == 2 ? p * p : p; }

    static LocalField base(long long prime);
};

struct ExtElt {
    Rat a = 0, b = 0; // a + b*omega
};

Rat ext_trace(const LocalField& E, const ExtElt& x);
Rat ext_norm(const LocalField& E, const ExtElt& x);
ExtElt ext_mul(const LocalField& E, const ExtElt& x, const ExtElt& y);
// Valuation normalized so val(uniformizer of E) = 1; x != 0.
long long ext_val(const LocalField& E, const ExtElt& x);
ExtElt ext_pi_pow(const LocalField& E, long long k);

// Builds the model of Q_p(sqrt(D)): ramification, integral basis, uniformizer
// and the conductor exponent of psi∘tr, each established by finite probing.
LocalField quadratic_extension(const LocalField& K, const Rat& D);

// +1 iff x is a norm from Q_p(sqrt(D)), by enumeration of the norm classes;
// D must be a non-square.
int quadratic_character(const LocalField& K, const Rat& D, const Rat& x);

// psi(x) = e^{2 pi i {x}} as a p-power root of unity; sign = -1 gives the
// inverse character. Conductor is the ring of integers.
struct AddChar {
    LocalField K;
    int sign = +1;

    Cyclo operator()(const Rat& x) const;
    Cyclo operator()(const Padic& x) const;
    // psi∘tr on a quadratic extension E of the same base.
    Cyclo on_ext(const LocalField& E, const ExtElt& x) const;
    AddChar inverse() const { return {K, -sign}; }
};

} // namespace hankel
