#include "hankel/spectral.hpp"

#include <cassert>

namespace hankel {

long long Spec::unify_q(long long a, long long b) {
    if (a == 0) return b;
    if (b == 0) return a;
    if (a != b) throw std::invalid_argument("Spec: mixing scalars bound to different q");
    return a;
}

void Spec::reduce_h() {
    if (q_ <= 0) return;
    num_ = num_.h_reduced(q_);
    den_ = den_.h_reduced(q_);
}

Spec Spec::from_ratio(Poly num, Poly den, long long q) {
    if (den.is_zero()) throw pole_error("Spec: zero denominator");
    Spec s;
    s.num_ = std::move(num);
    s.den_ = std::move(den);
    s.q_ = q;
    s.reduce_h();
    return s;
}

Spec Spec::variable(Var v, long long q) {
    return monomial(Cyclo(1), exps_of(v, 1), q);
}

Spec Spec::monomial(const Cyclo& c, const Exps& e, long long q) {
    return from_ratio(Poly::monomial(c, e), Poly(Cyclo(1)), q);
}

Spec Spec::q_power_half(long long halves, long long q) {
    return monomial(Cyclo(1), exps_of(VH, (int)halves), q);
}

Spec Spec::with_q(long long q) const {
    Spec r = *this;
    r.q_ = unify_q(q_, q);
    r.reduce_h();
    return r;
}

Spec Spec::operator-() const {
    Spec r = *this;
    r.num_ = -r.num_;
    return r;
}

Spec& Spec::operator+=(const Spec& o) {
    q_ = unify_q(q_, o.q_);
    if (den_ == o.den_) {
        num_ += o.num_;
    } else {
        num_ = num_ * o.den_ + o.num_ * den_;
        den_ = den_ * o.den_;
    }
    reduce_h();
    maybe_trim();
    return *this;
}

Spec& Spec::operator*=(const Spec& o) {
    q_ = unify_q(q_, o.q_);
    num_ = num_ * o.num_;
    den_ = den_ * o.den_;
    reduce_h();
    maybe_trim();
    return *this;
}

// Denominator growth guard: repeated ratio arithmetic is normalized once the
// polynomials get large, so chained sums stay polynomial-sized.
void Spec::maybe_trim() {
    if (den_.size() > 48) normalize();
}

Spec Spec::inverse() const {
    if (num_.is_zero()) throw pole_error("Spec: inverse of zero");
    Spec r;
    r.num_ = den_;
    r.den_ = num_;
    r.q_ = q_;
    return r;
}

Spec Spec::pow(long long e) const {
    Spec base = e >= 0 ? *this : inverse();
    unsigned long long k = e >= 0 ? (unsigned long long)e : (unsigned long long)(-e);
    Spec r(Rat(1), q_);
    while (k) {
        if (k & 1) r *= base;
        base *= base;
        k >>= 1;
    }
    return r;
}

bool Spec::operator==(const Spec& o) const {
    long long q = unify_q(q_, o.q_);
    Poly lhs = num_ * o.den_;
    Poly rhs = o.num_ * den_;
    if (q > 0) {
        lhs = lhs.h_reduced(q);
        rhs = rhs.h_reduced(q);
    }
    return (lhs - rhs).is_zero();
}

Spec Spec::subst_monomial(Var v, const Cyclo& c, const Exps& e) const {
    Poly n = num_.subst_monomial(v, c, e);
    Poly d = den_.subst_monomial(v, c, e);
    if (d.is_zero()) throw pole_error("Spec: substitution hits a pole");
    return from_ratio(std::move(n), std::move(d), q_);
}

bool Spec::depends_on(Var v) const {
    Spec n = normalized();
    return n.num_.depends_on(v) || n.den_.depends_on(v);
}

Spec Spec::conjugated() const {
    Spec r = *this;
    r.num_ = num_.conjugated();
    r.den_ = den_.conjugated();
    return r;
}

Cyclo Spec::constant_value() const {
    Spec n = normalized();
    if (!n.num_.is_constant() || !n.den_.is_constant())
        throw std::domain_error("Spec: not a constant value");
    return n.num_.constant_value() / n.den_.constant_value();
}

void Spec::normalize() {
    reduce_h();
    if (num_.is_zero()) {
        den_ = Poly(Cyclo(1));
        return;
    }
    Exps shift_n, shift_d, net;
    for (int v = 0; v < NVARS; ++v) {
        shift_n[v] = -num_.min_exp((Var)v);
        shift_d[v] = -den_.min_exp((Var)v);
        net[v] = -shift_n[v] + shift_d[v];
    }
    Poly pn = num_.shifted(shift_n);
    Poly pd = den_.shifted(shift_d);
    Poly g = poly_gcd(pn, pd);
    if (!g.is_constant()) {
        Poly qn, qd;
        bool okn = pn.divide_exact(g, qn);
        bool okd = pd.divide_exact(g, qd);
        assert(okn && okd);
        (void)okn;
        (void)okd;
        pn = std::move(qn);
        pd = std::move(qd);
        if (q_ > 0) {
            pn = pn.h_reduced(q_);
            pd = pd.h_reduced(q_);
        }
    }
    // Scale by the lex-trailing denominator coefficient; for the generating
    // functions here that is the constant term, so (1 - t) stays (1 - t).
    const Cyclo lead = pd.terms().begin()->second;
    if (!(lead == Cyclo(1))) {
        const Cyclo inv = lead.inverse();
        Poly n2, d2;
        for (auto& [e, c] : pn.terms()) n2 += Poly::monomial(c * inv, e);
        for (auto& [e, c] : pd.terms()) d2 += Poly::monomial(c * inv, e);
        pn = std::move(n2);
        pd = std::move(d2);
    }
    num_ = pn.shifted(net);
    den_ = std::move(pd);
}

std::string Spec::str() const {
    Spec n = normalized();
    if (n.den_.is_constant() && n.den_.constant_value() == Cyclo(1)) return n.num_.str();
    std::string ns = n.num_.str(), ds = n.den_.str();
    const bool wrap_n = n.num_.size() > 1, wrap_d = n.den_.size() > 1;
    return (wrap_n ? "(" + ns + ")" : ns) + " / " + (wrap_d ? "(" + ds + ")" : ds);
}

} // namespace hankel
