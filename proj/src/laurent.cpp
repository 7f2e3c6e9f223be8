#include "hankel/laurent.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>
#include <vector>

namespace hankel {

const char* var_name(int v) {
    static const char* names[NVARS] = {"t", "u", "z1", "z2", "z3", "h"};
    return names[v];
}

Poly::Poly(const Cyclo& c) {
    if (!c.is_zero()) t_[exps_zero()] = c;
}

Poly Poly::monomial(const Cyclo& c, const Exps& e) {
    Poly p;
    if (!c.is_zero()) p.t_[e] = c;
    return p;
}

bool Poly::is_constant() const {
    return t_.empty() || (t_.size() == 1 && t_.begin()->first == exps_zero());
}

Cyclo Poly::constant_value() const {
    if (t_.empty()) return Cyclo(0);
    assert(is_constant());
    return t_.begin()->second;
}

void Poly::add_term(const Exps& e, const Cyclo& c) {
    if (c.is_zero()) return;
    auto [it, fresh] = t_.emplace(e, c);
    if (!fresh) {
        it->second += c;
        if (it->second.is_zero()) t_.erase(it);
    }
}

Poly Poly::operator-() const {
    Poly r = *this;
    for (auto& [e, c] : r.t_) c = -c;
    return r;
}

Poly& Poly::operator+=(const Poly& o) {
    for (auto& [e, c] : o.t_) add_term(e, c);
    return *this;
}

Poly& Poly::operator-=(const Poly& o) {
    for (auto& [e, c] : o.t_) add_term(e, -c);
    return *this;
}

Poly operator*(const Poly& a, const Poly& b) {
    Poly r;
    for (auto& [ea, ca] : a.t_)
        for (auto& [eb, cb] : b.t_) {
            Exps e;
            for (int i = 0; i < NVARS; ++i) e[i] = ea[i] + eb[i];
            r.add_term(e, ca * cb);
        }
    return r;
}

Poly Poly::subst_monomial(Var v, const Cyclo& c, const Exps& e) const {
    Poly r;
    for (auto& [ex, co] : t_) {
        const int k = ex[v];
        Exps ne = ex;
        ne[v] = 0;
        for (int i = 0; i < NVARS; ++i) ne[i] += k * e[i];
        r.add_term(ne, co * c.pow(k));
    }
    return r;
}

int Poly::min_exp(Var v) const {
    int m = 0;
    bool first = true;
    for (auto& [e, c] : t_) {
        if (first || e[v] < m) m = e[v];
        first = false;
    }
    return m;
}

int Poly::max_exp(Var v) const {
    int m = 0;
    bool first = true;
    for (auto& [e, c] : t_) {
        if (first || e[v] > m) m = e[v];
        first = false;
    }
    return m;
}

Poly Poly::shifted(const Exps& s) const {
    Poly r;
    for (auto& [e, c] : t_) {
        Exps ne;
        for (int i = 0; i < NVARS; ++i) ne[i] = e[i] + s[i];
        r.t_[ne] = c;
    }
    return r;
}

Poly Poly::h_reduced(long long q) const {
    assert(q > 0);
    Poly r;
    for (auto& [e, c] : t_) {
        const int k = e[VH];
        if (k == 0 || k == 1) {
            r.add_term(e, c);
            continue;
        }
        int fl = k >= 0 ? k / 2 : -((-k + 1) / 2);
        Exps ne = e;
        ne[VH] = k - 2 * fl;
        r.add_term(ne, c * Cyclo(rpow(Rat(q), fl)));
    }
    return r;
}

Poly Poly::conjugated() const {
    Poly r;
    for (auto& [e, c] : t_) r.t_[e] = c.conjugate();
    return r;
}

bool Poly::divide_exact(const Poly& d, Poly& quot) const {
    if (d.is_zero()) return false;
    quot = Poly();
    Poly rem = *this;
    const auto& dl = *d.t_.rbegin();
    const Cyclo dinv = dl.second.inverse();
    size_t guard = 0;
    while (!rem.is_zero()) {
        if (++guard > 2000000) throw std::runtime_error("divide_exact: runaway division");
        const auto& rl = *rem.t_.rbegin();
        Exps diff;
        for (int i = 0; i < NVARS; ++i) {
            diff[i] = rl.first[i] - dl.first[i];
            if (diff[i] < 0) return false;
        }
        Cyclo c = rl.second * dinv;
        quot.add_term(diff, c);
        rem -= Poly::monomial(c, diff) * d;
    }
    return true;
}

namespace {

int deg_v(const Poly& p, Var v) { return p.max_exp(v); }

// Coefficient of x_v^k, with the v slot zeroed.
Poly coeff_at(const Poly& p, Var v, int k) {
    Poly r;
    for (auto& [e, c] : p.terms()) {
        if (e[v] != k) continue;
        Exps ne = e;
        ne[v] = 0;
        r += Poly::monomial(c, ne);
    }
    return r;
}

Poly content_v(const Poly& p, Var v) {
    Poly g;
    for (int k = 0; k <= deg_v(p, v); ++k) {
        Poly c = coeff_at(p, v, k);
        if (c.is_zero()) continue;
        g = g.is_zero() ? c : poly_gcd(g, c);
        if (g.is_constant()) return Poly(Cyclo(1));
    }
    return g.is_zero() ? Poly(Cyclo(1)) : g;
}

Poly primitive_v(const Poly& p, Var v) {
    if (p.is_zero()) return p;
    Poly c = content_v(p, v);
    Poly q;
    bool ok = p.divide_exact(c, q);
    assert(ok);
    (void)ok;
    return q;
}

// Pseudo-remainder of a by b in the variable v; deg_v(b) >= 0, b != 0.
Poly prem(Poly a, const Poly& b, Var v) {
    const int db = deg_v(b, v);
    const Poly lb = coeff_at(b, v, db);
    while (!a.is_zero() && deg_v(a, v) >= db) {
        const int da = deg_v(a, v);
        const Poly la = coeff_at(a, v, da);
        Poly shift = Poly::monomial(Cyclo(1), exps_of(v, da - db));
        a = lb * a - la * shift * b;
    }
    return a;
}

Poly scale_leading(Poly p) {
    if (p.is_zero()) return p;
    const Cyclo inv = p.terms().rbegin()->second.inverse();
    Poly r;
    for (auto& [e, c] : p.terms()) r += Poly::monomial(c * inv, e);
    return r;
}

Poly gcd_stripped(Poly a, Poly b) {
    if (a.is_constant() || b.is_constant()) return Poly(Cyclo(1));
    Var main = VT;
    int best = -1;
    for (int v = 0; v < NVARS; ++v) {
        int da = deg_v(a, (Var)v), db = deg_v(b, (Var)v);
        if (da <= 0 || db <= 0) continue;
        int m = std::max(da, db);
        if (best < 0 || m < best) {
            best = m;
            main = (Var)v;
        }
    }
    if (best < 0) return Poly(Cyclo(1));

    Poly ca = content_v(a, main), cb = content_v(b, main);
    Poly A = primitive_v(a, main), B = primitive_v(b, main);
    if (deg_v(A, main) < deg_v(B, main)) std::swap(A, B);
    while (!B.is_zero()) {
        Poly R = prem(A, B, main);
        A = std::move(B);
        B = R.is_zero() ? R : primitive_v(R, main);
    }
    Poly core = deg_v(A, main) > 0 ? A : Poly(Cyclo(1));
    return scale_leading(poly_gcd(ca, cb) * core);
}

} // namespace

Poly poly_gcd(Poly a, Poly b) {
    if (a.is_zero()) return scale_leading(b);
    if (b.is_zero()) return scale_leading(a);
    Exps sa, sb, sg;
    for (int v = 0; v < NVARS; ++v) {
        sa[v] = -a.min_exp((Var)v);
        sb[v] = -b.min_exp((Var)v);
        sg[v] = std::min(-sa[v], -sb[v]);
        assert(-sa[v] >= 0 && -sb[v] >= 0);
    }
    Poly core = gcd_stripped(a.shifted(sa), b.shifted(sb));
    return core.shifted(sg);
}

std::string Poly::str() const {
    if (t_.empty()) return "0";
    std::string s;
    for (auto it = t_.rbegin(); it != t_.rend(); ++it) {
        if (!s.empty()) s += " + ";
        std::string mono;
        for (int v = 0; v < NVARS; ++v) {
            int e = it->first[v];
            if (e == 0) continue;
            if (!mono.empty()) mono += "*";
            mono += var_name(v);
            if (e != 1) mono += "^" + std::to_string(e);
        }
        std::string cs = it->second.str();
        const bool wrap = cs.find(' ') != std::string::npos;
        if (mono.empty()) {
            s += wrap ? "(" + cs + ")" : cs;
        } else if (cs == "1") {
            s += mono;
        } else if (cs == "-1") {
            s += "-" + mono;
        } else {
            s += (wrap ? "(" + cs + ")" : cs) + "*" + mono;
        }
    }
    return s;
}

} // namespace hankel
