#include "hankel/cyclotomic.hpp"

#include <algorithm>
#include <cassert>
#include <mutex>
#include <numeric>
#include <vector>

namespace hankel {

namespace {

// Dense rational polynomials, ascending degree, no trailing zeros.
using RPoly = std::vector<Rat>;

void trim(RPoly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

RPoly mul(const RPoly& a, const RPoly& b) {
    if (a.empty() || b.empty()) return {};
    RPoly r(a.size() + b.size() - 1, Rat(0));
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    }
    trim(r);
    return r;
}

// a = q*b + r with deg r < deg b; b != 0.
void divmod(RPoly a, const RPoly& b, RPoly& q, RPoly& r) {
    q.assign(a.size() > b.size() ? a.size() - b.size() + 1 : 1, Rat(0));
    const Rat lead = b.back();
    while (a.size() >= b.size() && !a.empty()) {
        Rat c = a.back() / lead;
        size_t shift = a.size() - b.size();
        q[shift] = c;
        for (size_t i = 0; i < b.size(); ++i) a[shift + i] -= c * b[i];
        trim(a);
        if (a.size() < b.size()) break;
    }
    trim(q);
    r = std::move(a);
}

std::mutex phi_mutex;
std::map<unsigned, RPoly>& phi_cache() {
    static std::map<unsigned, RPoly> cache;
    return cache;
}

// n-th cyclotomic polynomial, computed as (x^n - 1) / prod_{d|n, d<n} Phi_d.
const RPoly& cyclotomic_poly(unsigned n) {
    std::lock_guard<std::mutex> lock(phi_mutex);
    auto& cache = phi_cache();
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<unsigned> divs;
    for (unsigned d = 1; d <= n; ++d)
        if (n % d == 0) divs.push_back(d);
    for (unsigned d : divs) {
        if (cache.count(d)) continue;
        RPoly num(d + 1, Rat(0));
        num[0] = -1;
        num[d] = 1;
        for (unsigned e : divs) {
            if (e >= d || d % e != 0) continue;
            RPoly q, r;
            divmod(num, cache.at(e), q, r);
            assert(r.empty());
            num = std::move(q);
        }
        cache.emplace(d, std::move(num));
    }
    return cache.at(n);
}

// Extended Euclid in Q[x]: returns (g, u) with u*a == g mod b, g = gcd(a, b).
std::pair<RPoly, RPoly> ext_gcd(RPoly a, RPoly b) {
    RPoly u0 = {Rat(1)}, u1 = {};
    while (!b.empty()) {
        RPoly q, r;
        divmod(a, b, q, r);
        RPoly u2 = u0;
        RPoly qu = mul(q, u1);
        if (u2.size() < qu.size()) u2.resize(qu.size(), Rat(0));
        for (size_t i = 0; i < qu.size(); ++i) u2[i] -= qu[i];
        trim(u2);
        a = std::move(b);
        b = std::move(r);
        u0 = std::move(u1);
        u1 = std::move(u2);
    }
    return {a, u0};
}

bool solve_linear(std::vector<std::vector<Rat>> m, std::vector<Rat> rhs,
                  std::vector<Rat>& out) {
    const size_t rows = m.size(), cols = rows ? m[0].size() : 0;
    std::vector<size_t> pivot_col;
    size_t r = 0;
    for (size_t c = 0; c < cols && r < rows; ++c) {
        size_t piv = r;
        while (piv < rows && m[piv][c] == 0) ++piv;
        if (piv == rows) continue;
        std::swap(m[piv], m[r]);
        std::swap(rhs[piv], rhs[r]);
        Rat inv = Rat(1) / m[r][c];
        for (size_t j = c; j < cols; ++j) m[r][j] *= inv;
        rhs[r] *= inv;
        for (size_t i = 0; i < rows; ++i) {
            if (i == r || m[i][c] == 0) continue;
            Rat f = m[i][c];
            for (size_t j = c; j < cols; ++j) m[i][j] -= f * m[r][j];
            rhs[i] -= f * rhs[r];
        }
        pivot_col.push_back(c);
        ++r;
    }
    for (size_t i = r; i < rows; ++i)
        if (rhs[i] != 0) return false;
    out.assign(cols, Rat(0));
    for (size_t i = 0; i < pivot_col.size(); ++i) out[pivot_col[i]] = rhs[i];
    return true;
}

} // namespace

unsigned euler_phi(unsigned n) {
    unsigned result = n;
    for (unsigned p = 2; p * p <= n; ++p) {
        if (n % p) continue;
        while (n % p == 0) n /= p;
        result -= result / p;
    }
    if (n > 1) result -= result / n;
    return result;
}

Cyclo::Cyclo(const Rat& r) : order_(1) {
    if (r != 0) c_[0] = r;
}

Cyclo Cyclo::root_of_unity(unsigned n, long long k) {
    assert(n > 0);
    long long kk = ((k % (long long)n) + n) % n;
    if (n % 2 == 0 && (n / 2) % 2 == 1) {
        // zeta_{2m} = -zeta_m^{(m+1)/2} for odd m
        unsigned m = n / 2;
        Cyclo z = root_of_unity(m, (kk * (((long long)m + 1) / 2)) % m);
        return (kk % 2 == 0) ? z : -z;
    }
    unsigned g = (unsigned)std::gcd((long long)n, kk);
    n /= g;
    kk /= g;
    if (n % 2 == 0 && (n / 2) % 2 == 1) return root_of_unity(n, kk);
    Cyclo z;
    z.order_ = n;
    z.c_[(unsigned)kk] = 1;
    z.reduce();
    return z;
}

void Cyclo::reduce() {
    if (order_ == 1) {
        if (!c_.empty()) {
            Rat total(0);
            for (auto& [e, v] : c_) total += v;
            c_.clear();
            if (total != 0) c_[0] = total;
        }
        return;
    }
    const RPoly& phi = cyclotomic_poly(order_);
    const size_t deg = phi.size() - 1;
    bool high = false;
    for (auto& [e, v] : c_)
        if (e >= deg) { high = true; break; }
    if (high) {
        RPoly dense(c_.empty() ? 1 : c_.rbegin()->first + 1, Rat(0));
        for (auto& [e, v] : c_) dense[e] = v;
        trim(dense);
        RPoly q, r;
        if (dense.size() > deg) {
            divmod(dense, phi, q, r);
        } else {
            r = std::move(dense);
        }
        c_.clear();
        for (size_t i = 0; i < r.size(); ++i)
            if (r[i] != 0) c_[(unsigned)i] = r[i];
    } else {
        for (auto it = c_.begin(); it != c_.end();)
            it = (it->second == 0) ? c_.erase(it) : std::next(it);
    }
}

bool Cyclo::is_rational() const {
    return c_.empty() || (c_.size() == 1 && c_.begin()->first == 0);
}

Rat Cyclo::rational_value() const {
    if (c_.empty()) return Rat(0);
    assert(is_rational());
    return c_.begin()->second;
}

Cyclo Cyclo::promoted(unsigned target) const {
    assert(target % order_ == 0);
    if (target == order_) return *this;
    Cyclo r;
    r.order_ = target;
    const unsigned f = target / order_;
    for (auto& [e, v] : c_) r.c_[e * f] = v;
    r.reduce();
    return r;
}

Cyclo Cyclo::operator-() const {
    Cyclo r = *this;
    for (auto& [e, v] : r.c_) v = -v;
    return r;
}

Cyclo& Cyclo::operator+=(const Cyclo& o) {
    if (order_ == o.order_) {
        for (auto& [e, v] : o.c_) {
            auto [it, fresh] = c_.emplace(e, v);
            if (!fresh) {
                it->second += v;
                if (it->second == 0) c_.erase(it);
            }
        }
        return *this;
    }
    unsigned L = std::lcm(order_, o.order_);
    *this = promoted(L);
    return *this += o.promoted(L);
}

Cyclo& Cyclo::operator-=(const Cyclo& o) { return *this += -o; }

Cyclo& Cyclo::operator*=(const Cyclo& o) {
    if (c_.empty() || o.c_.empty()) {
        c_.clear();
        order_ = 1;
        return *this;
    }
    if (o.order_ == 1) {
        const Rat s = o.c_.begin()->second;
        for (auto& [e, v] : c_) v *= s;
        return *this;
    }
    if (order_ == 1) {
        const Rat s = c_.begin()->second;
        *this = o;
        for (auto& [e, v] : c_) v *= s;
        return *this;
    }
    unsigned L = std::lcm(order_, o.order_);
    Cyclo a = promoted(L), b = o.promoted(L);
    Cyclo r;
    r.order_ = L;
    for (auto& [ea, va] : a.c_)
        for (auto& [eb, vb] : b.c_) {
            unsigned e = (ea + eb) % L;
            auto [it, fresh] = r.c_.emplace(e, va * vb);
            if (!fresh) it->second += va * vb;
        }
    r.reduce();
    *this = std::move(r);
    return *this;
}

Cyclo Cyclo::inverse() const {
    if (c_.empty()) throw std::domain_error("Cyclo: inverse of zero");
    if (is_rational()) return Cyclo(Rat(1) / c_.begin()->second);
    RPoly dense(c_.rbegin()->first + 1, Rat(0));
    for (auto& [e, v] : c_) dense[e] = v;
    auto [g, u] = ext_gcd(dense, cyclotomic_poly(order_));
    assert(g.size() == 1);
    Cyclo r;
    r.order_ = order_;
    const Rat scale = Rat(1) / g[0];
    for (size_t i = 0; i < u.size(); ++i)
        if (u[i] != 0) r.c_[(unsigned)i] = u[i] * scale;
    r.reduce();
    return r;
}

Cyclo Cyclo::galois(unsigned k) const {
    if (order_ == 1) return *this;
    k %= order_;
    assert(std::gcd(k, order_) == 1);
    Cyclo r;
    r.order_ = order_;
    for (auto& [e, v] : c_) {
        unsigned e2 = (unsigned)(((unsigned long long)e * k) % order_);
        auto [it, fresh] = r.c_.emplace(e2, v);
        if (!fresh) it->second += v;
    }
    r.reduce();
    return r;
}

Cyclo Cyclo::conjugate() const {
    if (order_ == 1) return *this;
    return galois(order_ - 1);
}

Cyclo Cyclo::pow(long long e) const {
    if (e == 0) return Cyclo(1);
    Cyclo base = e > 0 ? *this : inverse();
    unsigned long long k = e > 0 ? (unsigned long long)e : (unsigned long long)(-e);
    Cyclo r(1);
    while (k) {
        if (k & 1) r *= base;
        base *= base;
        k >>= 1;
    }
    return r;
}

bool Cyclo::operator==(const Cyclo& o) const {
    if (order_ == o.order_) return c_ == o.c_;
    unsigned L = std::lcm(order_, o.order_);
    return promoted(L).c_ == o.promoted(L).c_;
}

bool Cyclo::try_descend(unsigned m) {
    const unsigned n = order_;
    for (unsigned k = 1 + m; k < n; k += m) {
        if (std::gcd(k, n) != 1) continue;
        if (galois(k) != *this) return false;
    }
    const unsigned dn = euler_phi(n), dm = euler_phi(m);
    std::vector<std::vector<Rat>> mat(dn, std::vector<Rat>(dm, Rat(0)));
    for (unsigned i = 0; i < dm; ++i) {
        Cyclo col = root_of_unity(n, (long long)i * (n / m)).promoted(n);
        for (auto& [e, v] : col.c_) mat[e][i] = v;
    }
    std::vector<Rat> rhs(dn, Rat(0));
    for (auto& [e, v] : c_) rhs[e] = v;
    std::vector<Rat> sol;
    if (!solve_linear(std::move(mat), std::move(rhs), sol)) return false;
    order_ = m;
    c_.clear();
    for (size_t i = 0; i < sol.size(); ++i)
        if (sol[i] != 0) c_[(unsigned)i] = sol[i];
    return true;
}

void Cyclo::minimize() {
    if (is_rational()) {
        order_ = 1;
        return;
    }
    bool changed = true;
    while (changed && order_ > 1) {
        changed = false;
        const unsigned n = order_;
        std::vector<unsigned> primes;
        unsigned x = n;
        for (unsigned p = 2; p * p <= x; ++p)
            if (x % p == 0) {
                primes.push_back(p);
                while (x % p == 0) x /= p;
            }
        if (x > 1) primes.push_back(x);
        for (unsigned p : primes) {
            unsigned m = n / p;
            if (m % 4 == 2) m /= 2;
            if (m < n && try_descend(m)) {
                changed = true;
                break;
            }
        }
        if (is_rational()) {
            order_ = 1;
            return;
        }
    }
}

std::string Cyclo::str() const {
    Cyclo m = minimized();
    if (m.is_rational()) return rat_str(m.rational_value());
    std::string s;
    for (auto& [e, v] : m.c_) {
        Rat av = v < 0 ? Rat(-v) : v;
        if (s.empty()) {
            if (v < 0) s += "-";
        } else {
            s += v < 0 ? " - " : " + ";
        }
        std::string base = e == 0 ? "1"
                         : (e == 1 ? "w" + std::to_string(m.order_)
                                   : "w" + std::to_string(m.order_) + "^" + std::to_string(e));
        if (e == 0) {
            s += rat_str(av);
        } else if (av == 1) {
            s += base;
        } else {
            s += rat_str(av) + "*" + base;
        }
    }
    return s;
}

} // namespace hankel
