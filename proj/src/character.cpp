#include "hankel/character.hpp"

#include <cassert>
#include <map>
#include <mutex>
#include <stdexcept>
#include <unordered_map>

namespace hankel {

namespace {

long long mul_mod_ll(long long a, long long b, long long m) {
    return (long long)((__int128)a * b % m);
}

long long primitive_root_mod_p2(long long p) {
    static std::mutex mtx;
    static std::map<long long, long long> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(p);
    if (it != cache.end()) return it->second;
    std::vector<long long> primes;
    long long m = p - 1;
    for (long long d = 2; d * d <= m; ++d)
        while (m % d == 0) {
            if (primes.empty() || primes.back() != d) primes.push_back(d);
            m /= d;
        }
    if (m > 1) primes.push_back(m);
    long long g = 2;
    for (;; ++g) {
        bool ok = true;
        for (long long r : primes)
            if (pow_mod(g, (p - 1) / r, p) == 1) ok = false;
        if (ok) break;
    }
    if (pow_mod(g, p - 1, p * p) == 1) g += p;
    cache[p] = g;
    return g;
}

long long p_power(long long p, int m) {
    long long r = 1;
    for (int i = 0; i < m; ++i) {
        r *= p;
        assert(r < (1LL << 40));
    }
    return r;
}

// Exponents of u on the generator list, modulo p^level.
struct DlogTable {
    std::vector<long long> orders;
    std::unordered_map<long long, std::array<long long, 2>> exps;
};

const DlogTable& dlog_table(long long p, int level) {
    static std::mutex mtx;
    static std::map<std::pair<long long, int>, DlogTable> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto key = std::make_pair(p, level);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    DlogTable tab;
    long long pm = p_power(p, level);
    std::vector<long long> gens = UnitChar::generators(p, level);
    if (gens.empty()) {
        tab.exps[1 % pm] = {0, 0};
    } else if (gens.size() == 1) {
        long long n = (p == 2) ? 2 : (pm / p) * (p - 1);
        tab.orders = {n};
        long long r = 1;
        for (long long i = 0; i < n; ++i) {
            tab.exps[r] = {i, 0};
            r = mul_mod_ll(r, gens[0], pm);
        }
        assert(r == 1);
    } else {
        long long n2 = pm / 4;
        tab.orders = {2, n2};
        long long r1 = 1;
        for (long long i = 0; i < 2; ++i) {
            long long r2 = r1;
            for (long long j = 0; j < n2; ++j) {
                tab.exps[r2] = {i, j};
                r2 = mul_mod_ll(r2, gens[1], pm);
            }
            r1 = mul_mod_ll(r1, gens[0], pm);
        }
    }
    assert((long long)tab.exps.size() == pm - pm / p);
    return cache.emplace(key, std::move(tab)).first->second;
}

} // namespace

std::vector<long long> UnitChar::generators(long long p, int level) {
    if (level == 0) return {};
    if (p == 2) {
        if (level == 1) return {};
        long long pm = p_power(2, level);
        if (level == 2) return {pm - 1};
        return {pm - 1, 5};
    }
    long long pm = p_power(p, level);
    return {primitive_root_mod_p2(p) % pm};
}

UnitChar UnitChar::trivial(long long p) {
    UnitChar c;
    c.p_ = p;
    c.level_ = 0;
    return c;
}

UnitChar UnitChar::from_generator_values(long long p, int level, std::vector<Cyclo> values) {
    UnitChar c;
    c.p_ = p;
    c.level_ = level;
    c.gv_ = std::move(values);
    assert(c.gv_.size() == generators(p, level).size());
    const DlogTable& tab = dlog_table(p, level);
    for (size_t i = 0; i < c.gv_.size(); ++i)
        assert(c.gv_[i].pow(tab.orders[i]) == Cyclo(1));
    return c;
}

Cyclo UnitChar::operator()(const Rat& u) const {
    assert(val_p(u, p_) == 0);
    if (gv_.empty()) return Cyclo(1);
    long long pm = p_power(p_, level_);
    const DlogTable& tab = dlog_table(p_, level_);
    auto it = tab.exps.find(residue_mod(u, pm, p_));
    assert(it != tab.exps.end());
    Cyclo r = gv_[0].pow(it->second[0]);
    if (gv_.size() > 1) r *= gv_[1].pow(it->second[1]);
    return r;
}

int UnitChar::conductor() const {
    for (int m = 0; m <= level_; ++m) {
        long long pl = p_power(p_, level_);
        long long step = p_power(p_, m);
        bool trivial_on = true;
        for (long long k = 0; k < pl / step && trivial_on; ++k) {
            long long u = (1 + step * k) % pl;
            if (u % p_ == 0) continue;
            if ((*this)(Rat(u)) != Cyclo(1)) trivial_on = false;
        }
        if (trivial_on) return m;
    }
    return level_;
}

bool UnitChar::is_trivial() const {
    for (const Cyclo& v : gv_)
        if (v != Cyclo(1)) return false;
    return true;
}

UnitChar UnitChar::at_level(int level) const {
    assert(level >= level_);
    size_t want = generators(p_, level).size();
    UnitChar c;
    c.p_ = p_;
    c.level_ = level;
    c.gv_ = gv_;
    while (c.gv_.size() < want) c.gv_.push_back(Cyclo(1));
    return c;
}

UnitChar UnitChar::times(const UnitChar& o) const {
    assert(p_ == o.p_);
    int lv = std::max(level_, o.level_);
    UnitChar a = at_level(lv), b = o.at_level(lv);
    for (size_t i = 0; i < a.gv_.size(); ++i) a.gv_[i] *= b.gv_[i];
    return a;
}

UnitChar UnitChar::inverse() const {
    UnitChar c = *this;
    for (Cyclo& v : c.gv_) v = v.inverse();
    return c;
}

UnitChar UnitChar::pow(long long k) const {
    UnitChar c = *this;
    for (Cyclo& v : c.gv_) v = v.pow(k);
    return c;
}

bool UnitChar::operator==(const UnitChar& o) const {
    assert(p_ == o.p_);
    int lv = std::max(level_, o.level_);
    return at_level(lv).gv_ == o.at_level(lv).gv_;
}

std::vector<UnitChar> UnitChar::all_of_level(long long p, int level) {
    std::vector<UnitChar> out;
    std::vector<long long> gens = generators(p, level);
    if (gens.empty()) {
        out.push_back(trivial(p).at_level(level));
        return out;
    }
    if (gens.size() == 1) {
        long long n = (p == 2) ? 2 : (p_power(p, level) / p) * (p - 1);
        for (long long k = 0; k < n; ++k)
            out.push_back(from_generator_values(p, level, {Cyclo::root_of_unity((unsigned)n, k)}));
        return out;
    }
    long long n2 = p_power(2, level - 2);
    for (long long s = 0; s < 2; ++s)
        for (long long k = 0; k < n2; ++k)
            out.push_back(from_generator_values(
                p, level,
                {Cyclo(Rat(s == 0 ? 1 : -1)), Cyclo::root_of_unity((unsigned)n2, k)}));
    return out;
}

MultChar MultChar::unramified(const LocalField& K, const Spec& at_p) {
    return {K, UnitChar::trivial(K.p), at_p};
}

MultChar MultChar::norm_class(const LocalField& K, const Rat& D) {
    const long long p = K.p;
    const int level = (p == 2) ? 3 : 1;
    std::vector<Cyclo> gv;
    for (long long g : UnitChar::generators(p, level)) {
        long long signed_g = (p == 2 && g == p_power(2, level) - 1) ? -1 : g;
        gv.push_back(Cyclo(Rat(quadratic_character(K, D, Rat(signed_g)))));
    }
    UnitChar unit = UnitChar::from_generator_values(p, level, gv);
    Spec at_p_val(Cyclo(Rat(quadratic_character(K, D, Rat(p)))), K.q());
    return {K, unit, at_p_val};
}

Spec MultChar::eval(const Rat& x) const {
    assert(x != 0);
    long long v = val_p(x, K.p);
    Spec r = at_p.pow(v);
    r *= Spec(unit(unit_part(x, K.p)), at_p.q());
    return r;
}

MultChar MultChar::times(const MultChar& o) const {
    assert(K.p == o.K.p);
    return {K, unit.times(o.unit), at_p * o.at_p};
}

MultChar MultChar::inverse() const { return {K, unit.inverse(), at_p.inverse()}; }

MultChar MultChar::pow(long long k) const { return {K, unit.pow(k), at_p.pow(k)}; }

bool MultChar::operator==(const MultChar& o) const {
    return unit == o.unit && at_p == o.at_p;
}

MultChar TorusChar::pullback(const std::vector<int>& cochar) const {
    assert(!comp.empty() && cochar.size() == comp.size());
    MultChar r = MultChar::unramified(comp[0].K, Spec(Cyclo(1), comp[0].at_p.q()));
    for (size_t i = 0; i < comp.size(); ++i) r = r.times(comp[i].pow(cochar[i]));
    return r;
}

} // namespace hankel
