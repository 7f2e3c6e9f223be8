#pragma once

#include "hankel/cyclotomic.hpp"

#include <array>
#include <map>
#include <string>

namespace hankel {

// Variable slots shared by every spectral scalar. t and u are independent
// spectral parameters, z1..z3 are Satake coordinates, h is a formal square
// root of the residue size (reduced at the scalar level, where q is known).
constexpr int NVARS = 6;
enum Var { VT = 0, VU = 1, VZ1 = 2, VZ2 = 3, VZ3 = 4, VH = 5 };

using Exps = std::array<int, NVARS>;

inline Exps exps_zero() { return {0, 0, 0, 0, 0, 0}; }
inline Exps exps_of(Var v, int e) {
    Exps x = exps_zero();
    x[v] = e;
    return x;
}

const char* var_name(int v);

// Sparse multivariate Laurent polynomial over the cyclotomic tower.
// Zero coefficients are never stored.
class Poly {
public:
    Poly() = default;
    explicit Poly(const Cyclo& c);
    static Poly monomial(const Cyclo& c, const Exps& e);

    bool is_zero() const { return t_.empty(); }
    bool is_constant() const;
    Cyclo constant_value() const;

    Poly operator-() const;
    Poly& operator+=(const Poly& o);
    Poly& operator-=(const Poly& o);
    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    friend Poly operator*(const Poly& a, const Poly& b);
    Poly& operator*=(const Poly& o) { return *this = *this * o; }

    bool operator==(const Poly& o) const { return t_ == o.t_; }

    // x_v -> c * x^e applied to every term; negative powers of x_v need
    // invertible c (true in the coefficient field for c != 0).
    Poly subst_monomial(Var v, const Cyclo& c, const Exps& e) const;

    int min_exp(Var v) const; // 0 on the zero polynomial
    int max_exp(Var v) const;
    bool depends_on(Var v) const { return min_exp(v) != 0 || max_exp(v) != 0; }

    Poly shifted(const Exps& e) const; // multiply by the monomial x^e

    // h^k -> q^floor(k/2) * h^(k mod 2); q is the bound residue size.
    Poly h_reduced(long long q) const;

    // cyclotomic conjugation applied to every coefficient
    Poly conjugated() const;

    // Exact division in the polynomial ring; nullptr-like failure flag.
    bool divide_exact(const Poly& d, Poly& quot) const;

    const std::map<Exps, Cyclo>& terms() const { return t_; }
    size_t size() const { return t_.size(); }

    std::string str() const;

private:
    std::map<Exps, Cyclo> t_;
    void add_term(const Exps& e, const Cyclo& c);
    friend Poly poly_gcd(Poly a, Poly b);
};

// gcd of two polynomials (all exponents >= 0), defined up to a unit.
// Returns 1 when either input is a unit or they share no structure.
Poly poly_gcd(Poly a, Poly b);

} // namespace hankel
