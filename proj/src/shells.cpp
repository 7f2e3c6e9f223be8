#include "hankel/schwartz.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace hankel {

namespace {

long long small_pow(long long p, long long e) {
    long long r = 1;
    for (long long i = 0; i < e; ++i) {
        r *= p;
        assert(r < (1LL << 40));
    }
    return r;
}

std::vector<long long> reduce_tuple(const std::vector<long long>& u, int level, long long p) {
    std::vector<long long> r(u.size());
    if (level <= 0) {
        std::fill(r.begin(), r.end(), 1);
        return r;
    }
    long long pm = small_pow(p, level);
    for (size_t i = 0; i < u.size(); ++i) r[i] = ((u[i] % pm) + pm) % pm;
    return r;
}

Shell refine_shell(const Shell& s, int level, long long p, int rank, long long q) {
    if (level <= s.level) return s;
    Shell r;
    r.level = level;
    for (auto& u : unit_rep_tuples(p, level, rank)) {
        auto it = s.values.find(reduce_tuple(u, s.level, p));
        r.values[u] = it != s.values.end() ? it->second : Spec(Rat(0), q);
    }
    return r;
}

Shell zero_shell(int level, long long p, int rank, long long q) {
    Shell s;
    s.level = level;
    for (auto& u : unit_rep_tuples(p, level, rank)) s.values[u] = Spec(Rat(0), q);
    return s;
}

// k >= 0 with v = start + k*step, if any
bool tail_covers(const TailTerm& t, const std::vector<long long>& v, long long& k) {
    k = -1;
    for (size_t i = 0; i < v.size(); ++i) {
        long long d = v[i] - t.start[i];
        if (t.step[i] == 0) {
            if (d != 0) return false;
            continue;
        }
        if (d % t.step[i] != 0) return false;
        long long ki = d / t.step[i];
        if (ki < 0) return false;
        if (k == -1) k = ki;
        else if (k != ki) return false;
    }
    if (k == -1) k = 0; // zero step would cover a single shell; forbidden
    return true;
}

Spec tail_value(const TailTerm& t, long long k, const std::vector<long long>& u, long long p,
                long long q) {
    Spec c = t.coset.at(reduce_tuple(u, t.level, p));
    if (t.log_degree > 0) c *= Spec(rpow(Rat(k), t.log_degree), q);
    return c * t.ratio.pow(k);
}

std::string tail_label(const TailTerm& t) {
    std::ostringstream os;
    os << "tail start (";
    for (size_t i = 0; i < t.start.size(); ++i) os << (i ? "," : "") << t.start[i];
    os << ") step (";
    for (size_t i = 0; i < t.step.size(); ++i) os << (i ? "," : "") << t.step[i];
    os << ")";
    return os.str();
}

// Eulerian numbers E(j, m), row j
std::vector<Int> eulerian_row(int j) {
    std::vector<Int> row{Int(1)};
    for (int r = 1; r <= j; ++r) {
        std::vector<Int> next(r + 1, Int(0));
        for (int m = 0; m <= r; ++m) {
            if (m < r) next[m] += Int(m + 1) * row[m];
            if (m >= 1) next[m] += Int(r - m) * row[m - 1];
        }
        row = std::move(next);
    }
    return row;
}

// Re-bases a ray at k = khead: value (khead + k')^j ratio^{khead + k'} is
// split over binomials into parts of log degree 0..j.
std::vector<TailTerm> shift_tail(const TailTerm& t, long long khead, long long q) {
    if (khead == 0) return {t};
    std::vector<TailTerm> parts;
    for (int i2 = 0; i2 <= t.log_degree; ++i2) {
        TailTerm part = t;
        for (size_t i = 0; i < t.start.size(); ++i) part.start[i] += khead * t.step[i];
        part.log_degree = i2;
        Int binom = 1;
        for (int a = 0; a < i2; ++a) binom = binom * Int(t.log_degree - a) / Int(a + 1);
        Spec scale =
            t.ratio.pow(khead) * Spec(Rat(binom) * rpow(Rat(khead), t.log_degree - i2), q);
        for (auto& [u, val] : part.coset) val *= scale;
        parts.push_back(std::move(part));
    }
    return parts;
}

} // namespace

std::vector<long long> unit_reps(long long p, int level) {
    if (level <= 0) return {1};
    std::vector<long long> r;
    long long pm = small_pow(p, level);
    for (long long u = 1; u < pm; ++u)
        if (u % p != 0) r.push_back(u);
    return r;
}

std::vector<std::vector<long long>> unit_rep_tuples(long long p, int level, int rank) {
    std::vector<long long> reps = unit_reps(p, level);
    std::vector<std::vector<long long>> out{{}};
    for (int i = 0; i < rank; ++i) {
        std::vector<std::vector<long long>> next;
        next.reserve(out.size() * reps.size());
        for (auto& t : out)
            for (long long r : reps) {
                auto nt = t;
                nt.push_back(r);
                next.push_back(std::move(nt));
            }
        out = std::move(next);
    }
    return out;
}

Spec coset_volume(const LocalField& K, int level) {
    if (level <= 0) return Spec(rat(K.q() - 1, K.q()), K.q());
    return Spec(rpow(Rat(K.q()), -level), K.q());
}

ShellFunction::ShellFunction(const LocalField& K, int rank, ShellKind kind)
    : K_(K), rank_(rank), kind_(kind) {
    assert(rank >= 1);
}

void ShellFunction::set_shell(const std::vector<long long>& v, Shell s) {
    assert((int)v.size() == rank_);
    window_[v] = std::move(s);
}

void ShellFunction::add_tail(TailTerm t) {
    assert((int)t.start.size() == rank_ && (int)t.step.size() == rank_);
    bool moving = false;
    for (long long s : t.step) moving |= s != 0;
    assert(moving);
    tails_.push_back(std::move(t));
}

Spec ShellFunction::value_at(const std::vector<long long>& v,
                             const std::vector<long long>& u) const {
    auto it = window_.find(v);
    if (it != window_.end())
        return it->second.values.at(reduce_tuple(u, it->second.level, K_.p));
    Spec r(Rat(0), K_.q());
    for (const TailTerm& t : tails_) {
        long long k;
        if (tail_covers(t, v, k)) r += tail_value(t, k, u, K_.p, K_.q());
    }
    return r;
}

Shell ShellFunction::shell_at(const std::vector<long long>& v, int level) const {
    auto it = window_.find(v);
    if (it != window_.end()) return refine_shell(it->second, level, K_.p, rank_, K_.q());
    int lv = level;
    std::vector<std::pair<const TailTerm*, long long>> hit;
    for (const TailTerm& t : tails_) {
        long long k;
        if (tail_covers(t, v, k)) {
            hit.emplace_back(&t, k);
            lv = std::max(lv, t.level);
        }
    }
    Shell s = zero_shell(lv, K_.p, rank_, K_.q());
    for (auto& [t, k] : hit)
        for (auto& [u, val] : s.values) val += tail_value(*t, k, u, K_.p, K_.q());
    return s;
}

Spec ShellFunction::shell_mass(const std::vector<long long>& v) const {
    Shell s = shell_at(v);
    Spec vol = coset_volume(K_, s.level).pow(rank_);
    Spec r(Rat(0), K_.q());
    for (auto& [u, val] : s.values) r += val;
    return r * vol;
}

ShellFunction ShellFunction::operator-() const { return scaled(Spec(Rat(-1), K_.q())); }

ShellFunction& ShellFunction::operator+=(const ShellFunction& o) {
    assert(K_.p == o.K_.p && K_.e == o.K_.e && K_.f == o.K_.f && rank_ == o.rank_ &&
           kind_ == o.kind_);
    std::map<std::vector<long long>, Shell> merged;
    for (auto& [v, s] : window_) {
        Shell os = o.shell_at(v, s.level);
        Shell ms = refine_shell(s, os.level, K_.p, rank_, K_.q());
        for (auto& [u, val] : ms.values) val += os.values.at(u);
        merged[v] = std::move(ms);
    }
    for (auto& [v, s] : o.window_) {
        if (merged.count(v)) continue;
        Shell ms = shell_at(v, s.level);
        Shell os = refine_shell(s, ms.level, K_.p, rank_, K_.q());
        for (auto& [u, val] : os.values) val += ms.values.at(u);
        merged[v] = std::move(os);
    }
    window_ = std::move(merged);
    tails_.insert(tails_.end(), o.tails_.begin(), o.tails_.end());
    return *this;
}

ShellFunction ShellFunction::scaled(const Spec& c) const {
    ShellFunction r = *this;
    for (auto& [v, s] : r.window_)
        for (auto& [u, val] : s.values) val *= c;
    for (TailTerm& t : r.tails_)
        for (auto& [u, val] : t.coset) val *= c;
    return r;
}

ShellFunction ShellFunction::with_kind(ShellKind k) const {
    ShellFunction r = *this;
    r.kind_ = k;
    return r;
}

Spec geometric_power_sum(const Spec& w, int j) {
    Spec one(Rat(1), w.q());
    Spec den = one - w;
    if (den.is_zero()) throw pole_error("geometric series at ratio 1");
    if (j == 0) return den.inverse();
    std::vector<Int> row = eulerian_row(j);
    Spec num(Rat(0), w.q());
    Spec wp = w;
    for (size_t m = 0; m < row.size(); ++m) {
        num += Spec(Rat(row[m]), w.q()) * wp;
        wp *= w;
    }
    return num * den.inverse().pow(j + 1);
}

namespace {

// weight prod_i chi_i(p^{v_i} u_i) against a whole shell, with the measure
Spec pair_shell(const LocalField& K, const Shell& s, const std::vector<long long>& v,
                const TorusChar& chi, int rank) {
    int lv = s.level;
    for (const MultChar& m : chi.comp) lv = std::max(lv, m.unit.level());
    Shell fine = refine_shell(s, lv, K.p, rank, K.q());
    Spec base(Rat(1), K.q());
    for (int i = 0; i < rank; ++i) base *= chi.comp[i].at_p.pow(v[i]);
    Spec acc(Rat(0), K.q());
    for (auto& [u, val] : fine.values) {
        if (val.is_zero()) continue;
        Spec w = val;
        for (int i = 0; i < rank; ++i) w *= Spec(chi.comp[i].unit(Rat(u[i])), K.q());
        acc += w;
    }
    return acc * base * coset_volume(K, fine.level).pow(rank);
}

} // namespace

Spec mellin(const ShellFunction& f, const TorusChar& chi) {
    const LocalField& K = f.field();
    const int rank = f.rank();
    assert((int)chi.comp.size() == rank);
    Spec acc(Rat(0), K.q());
    for (auto& [v, s] : f.window()) acc += pair_shell(K, s, v, chi, rank);
    for (const TailTerm& t : f.tails()) {
        int lv = t.level;
        for (const MultChar& m : chi.comp) lv = std::max(lv, m.unit.level());
        Spec step_w = t.ratio;
        for (int i = 0; i < rank; ++i) step_w *= chi.comp[i].at_p.pow(t.step[i]);
        Spec series;
        try {
            series = geometric_power_sum(step_w, t.log_degree);
        } catch (const pole_error&) {
            throw pole_error("mellin pole: " + tail_label(t));
        }
        Spec base(Rat(1), K.q());
        for (int i = 0; i < rank; ++i) base *= chi.comp[i].at_p.pow(t.start[i]);
        Spec unit_sum(Rat(0), K.q());
        for (auto& u : unit_rep_tuples(K.p, lv, rank)) {
            Spec w = t.coset.at(reduce_tuple(u, t.level, K.p));
            if (w.is_zero()) continue;
            for (int i = 0; i < rank; ++i) w *= Spec(chi.comp[i].unit(Rat(u[i])), K.q());
            unit_sum += w;
        }
        acc += unit_sum * base * series * coset_volume(K, lv).pow(rank);
        // ray points the window overrides were counted twice; remove the ray part
        for (auto& [v, s] : f.window()) {
            long long k;
            if (!tail_covers(t, v, k)) continue;
            Shell ts = zero_shell(std::max(t.level, 0), K.p, rank, K.q());
            for (auto& [u, val] : ts.values) val = tail_value(t, k, u, K.p, K.q());
            acc -= pair_shell(K, ts, v, chi, rank);
        }
    }
    return acc;
}

ShellFunction multiply_by_char(const ShellFunction& f, const TorusChar& chi) {
    const LocalField& K = f.field();
    const int rank = f.rank();
    assert((int)chi.comp.size() == rank);
    int clv = 0;
    for (const MultChar& m : chi.comp) clv = std::max(clv, m.unit.level());
    ShellFunction r(K, rank, f.kind());
    for (auto& [v, s] : f.window()) {
        Shell fine = refine_shell(s, clv, K.p, rank, K.q());
        Spec base(Rat(1), K.q());
        for (int i = 0; i < rank; ++i) base *= chi.comp[i].at_p.pow(v[i]);
        for (auto& [u, val] : fine.values) {
            val *= base;
            for (int i = 0; i < rank; ++i) val *= Spec(chi.comp[i].unit(Rat(u[i])), K.q());
        }
        r.set_shell(v, std::move(fine));
    }
    for (const TailTerm& told : f.tails()) {
        TailTerm t = told;
        if (t.level < clv) {
            std::map<std::vector<long long>, Spec> fine;
            for (auto& u : unit_rep_tuples(K.p, clv, rank))
                fine[u] = t.coset.at(reduce_tuple(u, t.level, K.p));
            t.coset = std::move(fine);
            t.level = clv;
        }
        Spec base(Rat(1), K.q());
        for (int i = 0; i < rank; ++i) {
            base *= chi.comp[i].at_p.pow(t.start[i]);
            t.ratio *= chi.comp[i].at_p.pow(t.step[i]);
        }
        for (auto& [u, val] : t.coset) {
            val *= base;
            for (int i = 0; i < rank; ++i) val *= Spec(chi.comp[i].unit(Rat(u[i])), K.q());
        }
        r.add_tail(std::move(t));
    }
    return r;
}

namespace {

// psi(c * prod x_i^{e_i}) on the shell at v, applied at a proven-constant
// coset level
Shell psi_monomial_shell(const LocalField& K, const Shell& s, const std::vector<long long>& v,
                         const AddChar& psi, const Rat& c, const std::vector<int>& exps,
                         int rank) {
    long long ev = val_p(c, K.p);
    for (int i = 0; i < rank; ++i) ev += v[i] * exps[i];
    if (ev >= 0) return s;
    int lv = std::max<long long>(s.level, -ev);
    Shell fine = refine_shell(s, lv, K.p, rank, K.q());
    Rat ppart = c;
    for (int i = 0; i < rank; ++i) ppart *= rpow(Rat(K.p), v[i] * exps[i]);
    for (auto& [u, val] : fine.values) {
        Rat y = ppart;
        for (int i = 0; i < rank; ++i) y *= rpow(Rat(u[i]), exps[i]);
        val *= Spec(psi(y), K.q());
    }
    return fine;
}

} // namespace

ShellFunction multiply_by_psi_monomial(const ShellFunction& f, const AddChar& psi, const Rat& c,
                                       const std::vector<int>& exps) {
    const LocalField& K = f.field();
    const int rank = f.rank();
    assert((int)exps.size() == rank && c != 0);
    // ray heads whose twist has not yet stabilized become explicit shells
    std::vector<std::vector<long long>> extra;
    std::vector<TailTerm> new_tails;
    for (const TailTerm& told : f.tails()) {
        long long slope = 0, e0 = val_p(c, K.p);
        for (int i = 0; i < rank; ++i) {
            slope += told.step[i] * exps[i];
            e0 += told.start[i] * exps[i];
        }
        if (slope > 0) {
            // past k0 the twist argument is integral and the factor is 1
            long long k0 = e0 >= 0 ? 0 : (-e0 + slope - 1) / slope;
            for (long long k = 0; k < k0; ++k) {
                std::vector<long long> v(rank);
                for (int i = 0; i < rank; ++i) v[i] = told.start[i] + k * told.step[i];
                extra.push_back(std::move(v));
            }
            for (auto& part : shift_tail(told, k0, K.q())) new_tails.push_back(std::move(part));
        } else if (slope == 0) {
            if (e0 >= 0) {
                new_tails.push_back(told);
            } else {
                TailTerm t = told;
                int lv = std::max<long long>(t.level, -e0);
                if (lv > t.level) {
                    std::map<std::vector<long long>, Spec> fine;
                    for (auto& u : unit_rep_tuples(K.p, lv, rank))
                        fine[u] = t.coset.at(reduce_tuple(u, t.level, K.p));
                    t.coset = std::move(fine);
                    t.level = lv;
                }
                Rat ppart = c;
                for (int i = 0; i < rank; ++i) ppart *= rpow(Rat(K.p), t.start[i] * exps[i]);
                for (auto& [u, val] : t.coset) {
                    Rat y = ppart;
                    for (int i = 0; i < rank; ++i) y *= rpow(Rat(u[i]), exps[i]);
                    val *= Spec(psi(y), K.q());
                }
                new_tails.push_back(std::move(t));
            }
        } else {
            throw window_error("additive twist oscillates along a tail: " + tail_label(told),
                               told.start[0]);
        }
    }
    ShellFunction r(K, rank, f.kind());
    for (auto& [v, s] : f.window())
        r.set_shell(v, psi_monomial_shell(K, s, v, psi, c, exps, rank));
    for (auto& v : extra) {
        if (r.window().count(v)) continue;
        r.set_shell(v, psi_monomial_shell(K, f.shell_at(v), v, psi, c, exps, rank));
    }
    for (auto& t : new_tails) r.add_tail(std::move(t));
    return r;
}

namespace {

// Taylor coefficients P^{(d)}(x0)/d! for P = sum_j poly[j] x^j
Rat taylor_coeff(const std::vector<Rat>& poly, const Rat& x0, int d) {
    Rat r(0);
    for (int j = d; j < (int)poly.size(); ++j) {
        if (poly[j] == 0) continue;
        Int binom = 1;
        for (int a = 0; a < d; ++a) binom = binom * Int(j - a) / Int(a + 1);
        r += poly[j] * Rat(binom) * rpow(x0, j - d);
    }
    return r;
}

// smallest coset level m >= lv0 at which eta(P) is constant on every coset
// of the shell at valuation v carrying a nonzero value: P(x0(1+z)) =
// P(x0)(1+w) with val(w) >= m0 once each higher Taylor term sinks m0 below
// P(x0). Throws when the refinement stalls (a root of P sits on or too
// near a supporting coset).
int eta_constant_level(const LocalField& K, const Shell& s, const std::vector<Rat>& poly,
                       long long v, int m0) {
    for (int m = std::max(s.level, 1); m <= s.level + 24; ++m) {
        bool ok = true;
        for (long long u : unit_reps(K.p, m)) {
            if (s.values.at(reduce_tuple({u}, s.level, K.p)).is_zero()) continue;
            Rat x0 = rpow(Rat(K.p), v) * Rat(u);
            Rat y = taylor_coeff(poly, x0, 0);
            if (y == 0) throw singular_error("polynomial vanishes on a shell point");
            long long need = val_p(y, K.p) + m0;
            for (int d = 1; d < (int)poly.size(); ++d) {
                Rat td = taylor_coeff(poly, x0, d);
                if (td == 0) continue;
                if (val_p(td, K.p) + d * (v + m) < need) {
                    ok = false;
                    break;
                }
            }
            if (!ok) break;
        }
        if (ok) return m;
    }
    throw singular_error("character of polynomial values does not stabilize on a shell");
}

// On a stabilized ray P(p^v u) has the class of poly[jstar] * (p^v u)^jstar,
// so eta factors into the coset map and the ratio.
void apply_eta_stable(TailTerm& t, const MultChar& eta, const std::vector<Rat>& poly, int jstar,
                      const LocalField& K) {
    int lv = std::max(t.level, eta.unit.level());
    if (lv > t.level) {
        std::map<std::vector<long long>, Spec> fine;
        for (auto& u : unit_rep_tuples(K.p, lv, 1))
            fine[u] = t.coset.at(reduce_tuple(u, t.level, K.p));
        t.coset = std::move(fine);
        t.level = lv;
    }
    t.ratio *= eta.at_p.pow((long long)jstar * t.step[0]);
    Spec base = eta.eval(poly[jstar]) * eta.at_p.pow((long long)jstar * t.start[0]);
    for (auto& [u, val] : t.coset)
        val *= base * Spec(eta.unit(rpow(Rat(u[0]), jstar)), K.q());
}

} // namespace

ShellFunction multiply_by_eta_poly(const ShellFunction& f, const MultChar& eta,
                                   const std::vector<Rat>& poly) {
    const LocalField& K = f.field();
    assert(f.rank() == 1 && eta.K.p == K.p);
    // constancy of eta on 1 + p^m0: covers the conductor of eta's unit part
    const int m0 = std::max((K.p == 2) ? 3 : 1, eta.conductor());
    int deg = -1, low = -1;
    for (int j = 0; j < (int)poly.size(); ++j)
        if (poly[j] != 0) {
            deg = j;
            if (low < 0) low = j;
        }
    assert(deg >= 0);

    ShellFunction r(K, 1, f.kind());
    std::vector<std::vector<long long>> extra;
    std::vector<TailTerm> new_tails;
    for (const TailTerm& told : f.tails()) {
        assert(told.step[0] == 1 || told.step[0] == -1);
        // dominant monomial of P along the ray
        int jstar = told.step[0] > 0 ? low : deg;
        // stabilization threshold: every other monomial m0 deeper
        long long vstar = told.start[0];
        for (int j = 0; j < (int)poly.size(); ++j) {
            if (poly[j] == 0 || j == jstar) continue;
            // need (start + k*step)*(j - jstar) >= val(c_jstar) - val(c_j) + m0
            long long rhs = val_p(poly[jstar], K.p) - val_p(poly[j], K.p) + m0;
            long long dj = j - jstar;
            long long base = told.start[0] * dj;
            long long slope = told.step[0] * dj; // > 0 by the choice of jstar
            assert(slope > 0);
            long long k0 = base >= rhs ? 0 : (rhs - base + slope - 1) / slope;
            vstar = std::max(vstar, told.start[0] + k0 * told.step[0]);
        }
        long long khead = (vstar - told.start[0]) * told.step[0];
        for (long long k = 0; k < khead; ++k)
            extra.push_back({told.start[0] + k * told.step[0]});
        for (auto& part : shift_tail(told, khead, K.q())) {
            apply_eta_stable(part, eta, poly, jstar, K);
            new_tails.push_back(std::move(part));
        }
    }
    auto eta_shell = [&](const std::vector<long long>& v, const Shell& s) {
        int lv = eta_constant_level(K, s, poly, v[0], m0);
        Shell fine = refine_shell(s, lv, K.p, 1, K.q());
        for (auto& [u, val] : fine.values) {
            if (val.is_zero()) continue;
            Rat y = taylor_coeff(poly, rpow(Rat(K.p), v[0]) * Rat(u[0]), 0);
            val *= eta.eval(y);
        }
        return fine;
    };
    for (auto& [v, s] : f.window()) r.set_shell(v, eta_shell(v, s));
    for (auto& v : extra) {
        if (r.window().count(v)) continue;
        r.set_shell(v, eta_shell(v, f.shell_at(v)));
    }
    for (auto& t : new_tails) r.add_tail(std::move(t));
    return r;
}

ShellFunction cell_to_shell(const CellFunction& f, ShellKind kind, long long wmin,
                            long long wmax) {
    assert(f.rank() == 1);
    const LocalField& K = f.field();
    AddChar ps = f.psi();
    // validate the window against the true support
    for (auto& [cell, coeff] : f.terms()) {
        const Rat& a = cell.center[0];
        const Rat& b = cell.twist[0];
        if (a != 0) {
            long long va = val_p(a, K.p);
            if (va < wmin) throw window_error("support below the window", va);
            if (va > wmax) throw window_error("support above the window", va);
        } else {
            if (cell.level < wmin) throw window_error("support below the window", cell.level);
            long long m0 = cell.level;
            if (b != 0) m0 = std::max<long long>(m0, -val_p(b, K.p));
            if (wmax < m0 - 1)
                throw window_error("tail not stabilized inside the window", m0 - 1);
        }
    }
    ShellFunction r(K, 1, kind);
    for (long long m = wmin; m <= wmax; ++m) {
        int lv = 0;
        for (auto& [cell, coeff] : f.terms()) {
            const Rat& a = cell.center[0];
            const Rat& b = cell.twist[0];
            long long pl = 0;
            if (b != 0) pl = std::max<long long>(0, -(val_p(b, K.p) + m));
            if (a != 0) {
                if (val_p(a, K.p) != m) continue;
                lv = std::max<long long>({(long long)lv, (long long)cell.level - m, pl});
            } else {
                if (m < cell.level) continue;
                lv = std::max<long long>(lv, pl);
            }
        }
        Shell s = zero_shell(lv, K.p, 1, K.q());
        for (auto& [cell, coeff] : f.terms()) {
            const Rat& a = cell.center[0];
            const Rat& b = cell.twist[0];
            if (a != 0) {
                if (val_p(a, K.p) != m) continue;
                Rat a0 = a * rpow(Rat(K.p), -m); // unit
                long long modk = small_pow(K.p, cell.level - m);
                long long a0r = residue_mod(a0, modk, K.p);
                for (auto& [u, val] : s.values) {
                    if (((u[0] - a0r) % modk + modk) % modk != 0) continue;
                    val += coeff * Spec(ps(b * rpow(Rat(K.p), m) * Rat(u[0])), K.q());
                }
            } else {
                if (m < cell.level) continue;
                for (auto& [u, val] : s.values)
                    val += coeff * Spec(ps(b * rpow(Rat(K.p), m) * Rat(u[0])), K.q());
            }
        }
        r.set_shell({m}, std::move(s));
    }
    Spec cinf(Rat(0), K.q());
    for (auto& [cell, coeff] : f.terms())
        if (cell.center[0] == 0) cinf += coeff;
    if (!cinf.is_zero()) {
        TailTerm t;
        t.start = {wmax + 1};
        t.step = {1};
        t.ratio = Spec(Rat(1), K.q());
        t.level = 0;
        t.coset[{1}] = cinf;
        r.add_tail(std::move(t));
    }
    return r;
}

bool equal_on_box(const ShellFunction& f, const ShellFunction& g,
                  const std::vector<long long>& lo, const std::vector<long long>& hi) {
    assert(f.rank() == g.rank() && lo.size() == hi.size() &&
           (int)lo.size() == f.rank());
    std::vector<long long> v = lo;
    for (;;) {
        Shell a = f.shell_at(v);
        Shell b = g.shell_at(v, a.level);
        a = f.shell_at(v, b.level);
        for (auto& [u, val] : a.values)
            if (val != b.values.at(u)) return false;
        int i = 0;
        for (; i < (int)v.size(); ++i) {
            if (v[i] < hi[i]) {
                ++v[i];
                break;
            }
            v[i] = lo[i];
        }
        if (i == (int)v.size()) return true;
    }
}

} // namespace hankel
