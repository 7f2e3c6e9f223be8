#include "hankel/local_field.hpp"

#include <algorithm>
#include <cassert>
#include <set>
#include <vector>

namespace hankel {

long long val_p(const Rat& x, long long p) {
    assert(x != 0);
    Int n = numerator(x), d = denominator(x);
    long long v = 0;
    while (n % p == 0) {
        n /= p;
        ++v;
    }
    while (d % p == 0) {
        d /= p;
        --v;
    }
    return v;
}

Rat unit_part(const Rat& x, long long p) {
    return x / rpow(Rat(p), val_p(x, p));
}

long long inv_mod(long long a, long long m) {
    long long t = 0, nt = 1, r = m, nr = ((a % m) + m) % m;
    while (nr != 0) {
        long long q = r / nr;
        std::swap(t -= q * nt, nt);
        std::swap(r -= q * nr, nr);
    }
    assert(r == 1);
    return ((t % m) + m) % m;
}

static long long mul_mod(long long a, long long b, long long m) {
    return (long long)((__int128)a * b % m);
}

long long pow_mod(long long b, long long e, long long m) {
    long long r = 1 % m;
    b = ((b % m) + m) % m;
    while (e) {
        if (e & 1) r = mul_mod(r, b, m);
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    return r;
}

long long residue_mod(const Rat& x, long long m, long long p) {
    if (x == 0) return 0;
    assert(val_p(x, p) >= 0);
    (void)p;
    Int n = numerator(x), d = denominator(x);
    long long nm = (long long)(((n % m) + m) % m);
    long long dm = (long long)(((d % m) + m) % m);
    return mul_mod(nm, inv_mod(dm, m), m);
}

bool padic_is_square(long long p, const Rat& x) {
    assert(x != 0);
    long long v = val_p(x, p);
    if (v % 2 != 0) return false;
    Rat u = unit_part(x, p);
    if (p == 2) return residue_mod(u, 8, 2) == 1;
    long long r = residue_mod(u, p, p);
    return pow_mod(r, (p - 1) / 2, p) == 1;
}

Padic::Padic(long long p, const Rat& v, int prec) : p_(p), v_(v), prec_(prec) {
    if (v_ != 0 && prec_ < EXACT && val_p(v_, p_) >= prec_) v_ = 0;
}

int Padic::effective_val() const {
    if (v_ == 0) return prec_ >= EXACT ? EXACT : prec_;
    return (int)std::min<long long>(val_p(v_, p_), EXACT);
}

long long Padic::valuation() const {
    if (v_ == 0) {
        if (is_exact()) throw std::domain_error("Padic: valuation of zero");
        throw precision_error("Padic: element not resolved from zero", prec_ + 1);
    }
    return val_p(v_, p_);
}

Padic Padic::operator+(const Padic& o) const {
    assert(p_ == o.p_);
    return Padic(p_, v_ + o.v_, std::min(prec_, o.prec_));
}

Padic Padic::operator-(const Padic& o) const {
    assert(p_ == o.p_);
    return Padic(p_, v_ - o.v_, std::min(prec_, o.prec_));
}

Padic Padic::operator*(const Padic& o) const {
    assert(p_ == o.p_);
    if (is_exact() && o.is_exact()) return Padic(p_, v_ * o.v_);
    long long pa = std::min<long long>((long long)prec_ + o.effective_val(), EXACT);
    long long pb = std::min<long long>((long long)o.prec_ + effective_val(), EXACT);
    return Padic(p_, v_ * o.v_, (int)std::min(pa, pb));
}

LocalField LocalField::base(long long prime) {
    LocalField K;
    K.p = prime;
    K.pi = {Rat(prime), Rat(0)};
    return K;
}

static Rat omega_trace(const LocalField& E) { return E.half_basis ? Rat(1) : Rat(0); }
static Rat omega_norm(const LocalField& E) {
    // omega = (1+sqrt(D))/2 has minimal polynomial x^2 - x + (1-D)/4
    return E.half_basis ? (Rat(1) - E.D) / 4 : -E.D;
}

Rat ext_trace(const LocalField& E, const ExtElt& x) {
    return 2 * x.a + x.b * omega_trace(E);
}

Rat ext_norm(const LocalField& E, const ExtElt& x) {
    return x.a * x.a + x.a * x.b * omega_trace(E) + x.b * x.b * omega_norm(E);
}

ExtElt ext_mul(const LocalField& E, const ExtElt& x, const ExtElt& y) {
    // omega^2 = tr(omega)*omega - N(omega)
    Rat cross = x.a * y.b + x.b * y.a;
    Rat bb = x.b * y.b;
    return {x.a * y.a - bb * omega_norm(E), cross + bb * omega_trace(E)};
}

long long ext_val(const LocalField& E, const ExtElt& x) {
    Rat n = ext_norm(E, x);
    assert(n != 0);
    long long vn = val_p(n, E.p);
    if (E.e == 2) return vn;
    assert(vn % 2 == 0);
    return vn / 2;
}

ExtElt ext_pi_pow(const LocalField& E, long long k) {
    ExtElt pi{E.pi[0], E.pi[1]};
    ExtElt r{Rat(1), Rat(0)};
    if (k >= 0) {
        for (long long i = 0; i < k; ++i) r = ext_mul(E, r, pi);
        return r;
    }
    Rat n = ext_norm(E, pi);
    ExtElt conj{pi.a + pi.b * omega_trace(E), -pi.b};
    ExtElt inv{conj.a / n, conj.b / n};
    for (long long i = 0; i < -k; ++i) r = ext_mul(E, r, inv);
    return r;
}

namespace {

// q^2 - 1 of the q^2 residues mod p*O_E are units iff the residue field is
// F_{q^2}; a ramified quadratic has only q^2 - q.
bool probe_unramified(const LocalField& E) {
    long long p = E.p, units = 0;
    for (long long a = 0; a < p; ++a)
        for (long long b = 0; b < p; ++b) {
            if (a == 0 && b == 0) continue;
            Rat n = ext_norm(E, {Rat(a), Rat(b)});
            assert(n != 0);
            if (val_p(n, p) == 0) ++units;
        }
    if (units == p * p - 1) return true;
    assert(units == p * p - p);
    return false;
}

ExtElt probe_uniformizer(const LocalField& E) {
    if (E.e == 1) return {Rat(E.p), Rat(0)};
    for (long long a = 0; a <= 2 * E.p; ++a)
        for (long long b = 0; b <= 2 * E.p; ++b) {
            if (a == 0 && b == 0) continue;
            Rat n = ext_norm(E, {Rat(a), Rat(b)});
            if (n != 0 && val_p(n, E.p) == 1) return {Rat(a), Rat(b)};
        }
    throw std::logic_error("ramified extension without a valuation-1 norm");
}

// Largest d with tr(pi^{-d} O_E) integral; checked on the O_E generators.
int probe_psi_conductor(const LocalField& E) {
    for (int d = 0;; ++d) {
        ExtElt s = ext_pi_pow(E, -(d + 1));
        ExtElt so = ext_mul(E, s, {Rat(0), Rat(1)});
        Rat t1 = ext_trace(E, s), t2 = ext_trace(E, so);
        bool integral = (t1 == 0 || val_p(t1, E.p) >= 0) && (t2 == 0 || val_p(t2, E.p) >= 0);
        if (!integral) return d;
        assert(d < 8);
    }
}

bool is_norm(const LocalField& E, const Rat& x) {
    const long long p = E.p;
    const int m0 = (p == 2) ? 3 : 1;
    long long pm = 1;
    for (int i = 0; i < m0; ++i) pm *= p;
    const long long v = val_p(x, p);
    Rat w;
    if (E.e == 1) {
        if (v % 2 != 0) return false;
        w = unit_part(x, p);
    } else {
        Rat npi = ext_norm(E, {E.pi[0], E.pi[1]});
        w = x * rpow(npi, -v);
        assert(val_p(w, p) == 0);
    }
    std::set<long long> norms;
    for (long long a = 0; a < pm; ++a)
        for (long long b = 0; b < pm; ++b) {
            if (a % p == 0 && b % p == 0) continue;
            Rat n = ext_norm(E, {Rat(a), Rat(b)});
            if (n == 0 || val_p(n, p) != 0) continue;
            norms.insert(residue_mod(n, pm, p));
        }
    return norms.count(residue_mod(w, pm, p)) > 0;
}

} // namespace

LocalField quadratic_extension(const LocalField& K, const Rat& Din) {
    assert(K.degree() == 1);
    if (Din == 0 || padic_is_square(K.p, Din))
        throw std::domain_error("quadratic_extension: D is a square");
    LocalField E;
    E.p = K.p;
    long long v = val_p(Din, K.p);
    long long even = v - ((v % 2) + 2) % 2;
    Rat D = Din / rpow(Rat(K.p), even);
    E.D = D;
    E.half_basis = (K.p == 2) && val_p(D - 1, 2) >= 2;
    bool unram = probe_unramified(E);
    E.e = unram ? 1 : 2;
    E.f = unram ? 2 : 1;
    ExtElt piE = probe_uniformizer(E);
    E.pi = {piE.a, piE.b};
    E.psi_conductor = probe_psi_conductor(E);
    return E;
}

int quadratic_character(const LocalField& K, const Rat& D, const Rat& x) {
    assert(x != 0);
    LocalField E = quadratic_extension(K, D);
    return is_norm(E, x) ? +1 : -1;
}

Cyclo AddChar::operator()(const Rat& x) const {
    if (x == 0) return Cyclo(1);
    const long long p = K.p;
    long long v = val_p(x, p);
    if (v >= 0) return Cyclo(1);
    long long m = -v;
    long long pm = 1;
    for (long long i = 0; i < m; ++i) {
        pm *= p;
        assert(pm < (1LL << 31));
    }
    long long r = residue_mod(x * Rat(pm), pm, p);
    return Cyclo::root_of_unity((unsigned)pm, sign * r);
}

Cyclo AddChar::operator()(const Padic& x) const {
    assert(x.p() == K.p);
    if (x.prec() < 0)
        throw precision_error("additive character needs the fractional part", 0);
    return (*this)(x.approx());
}

Cyclo AddChar::on_ext(const LocalField& E, const ExtElt& x) const {
    assert(E.p == K.p);
    return (*this)(ext_trace(E, x));
}

} // namespace hankel
