#include "hankel/hecke.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>

namespace hankel {

namespace {

// phase of the diagonal-torus coordinate entering the Bessel layer sums,
// pinned against the raw Kuznetsov bridges of the unit group
constexpr int kSl2BesselSign = 1;
constexpr int kPgl2BesselSign = -1;

// ray probes: four shells solve the model, two more verify it
constexpr int kRayProbe = 6;

Rat rp(long long p, long long k) { return rpow(Rat(p), k); }

int rank_of(Group g) { return (g == Group::Sl2 || g == Group::Pgl2) ? 1 : 2; }

void check_group(Group g) {
    if (g == Group::Mat2)
        throw std::invalid_argument("hecke: the matrix monoid carries no Hecke algebra, use Gl2");
}

void check_lambda(Group g, const std::vector<long long>& l) {
    check_group(g);
    if (static_cast<int>(l.size()) != rank_of(g))
        throw std::invalid_argument("hecke: cocharacter rank mismatch");
    if (rank_of(g) == 1) {
        if (l[0] < 0) throw std::invalid_argument("hecke: dominant cocharacter required");
    } else if (l[0] < l[1]) {
        throw std::invalid_argument("hecke: dominant cocharacter required");
    }
}

// sum of psi over the valuation-m unit layer of Q_p / p^N Z_p; zero below -1,
// a full cancelling average at -1, and the usual layer count above
Rat psi_layer_sum(long long p, long long N, long long m) {
    if (m <= -2) return Rat(0);
    if (m == -1) return -rp(p, N);
    return rp(p, N - m) - rp(p, N - m - 1);
}

// cell levels of the double-coset indicator, per group
std::pair<long long, long long> coset_levels(Group g, const std::vector<long long>& l) {
    if (g == Group::Sl2) return {-l[0], 1 - l[0]};
    if (g == Group::Pgl2) return {0, 1};
    return {l[1], l[1] + 1};
}

// t_V n(u) for the constant term
std::array<Rat, 4> torus_mat(Group g, long long v1, long long v2, long long p, const Rat& u) {
    Rat a = rp(p, v1);
    Rat d = g == Group::Sl2 ? rp(p, -v1) : (g == Group::Pgl2 ? Rat(1) : rp(p, v2));
    return {a, a * u, Rat(0), d};
}

// t_{V'}^{-1} n(-u) t_V for the shell action
std::array<Rat, 4> action_mat(Group g, const std::vector<long long>& vp,
                              const std::vector<long long>& v, long long p, const Rat& u) {
    if (g == Group::Sl2)
        return {rp(p, v[0] - vp[0]), -u * rp(p, -v[0] - vp[0]), Rat(0), rp(p, vp[0] - v[0])};
    if (g == Group::Pgl2) return {rp(p, v[0] - vp[0]), -u * rp(p, -vp[0]), Rat(0), Rat(1)};
    return {rp(p, v[0] - vp[0]), -u * rp(p, v[1] - vp[0]), Rat(0), rp(p, v[1] - vp[1])};
}

long long action_modulus(Group g, const std::vector<long long>& vp) {
    if (g == Group::Sl2) return 2 * vp[0];
    if (g == Group::Pgl2) return vp[0];
    return vp[0] - vp[1];
}

// psi-weighted sum of the coset values of h over N(Q_p) / N(p^N Z_p); the
// layers below valuation -1 drop by cancellation before h is ever evaluated
Spec action_kernel(Group g, const GroupCellFunction& cells, const std::vector<long long>& vp,
                   const std::vector<long long>& v) {
    long long p = cells.field().p, q = cells.field().q();
    long long N = action_modulus(g, vp);
    Spec acc(0LL, q);
    for (long long m = -1; m < N; ++m) {
        Spec val = cells.value_at(action_mat(g, vp, v, p, rp(p, m)));
        if (!val.is_zero()) acc = acc + val * Spec(psi_layer_sum(p, N, m), q);
    }
    acc = acc + cells.value_at(action_mat(g, vp, v, p, Rat(0)));
    return acc;
}

// ---- exact ray models -------------------------------------------------

struct RayModel {
    Spec c0, c1, ratio;
    int log_degree = 0;
    bool zero = true;
};

Spec ray_value(const RayModel& m, long long k) {
    if (m.zero) return Spec();
    Spec v = m.c0 + m.c1 * Spec(Rat(k), m.c0.q());
    return v * m.ratio.pow(k);
}

// (c0 + c1 k) ratio^k solved from the first terms and verified on the rest
RayModel model_ray(const std::vector<Spec>& t) {
    if (t.size() < 5) throw std::invalid_argument("ray model needs at least five terms");
    RayModel m;
    bool allz = true;
    for (auto& x : t) allz = allz && x.is_zero();
    if (allz) return m;
    if (t[0].is_zero()) throw enumeration_cap_error("ray model head", static_cast<int>(t.size()));
    long long q = t[0].q();
    m.zero = false;
    Spec rho = t[1] / t[0];
    bool geom = true;
    for (size_t k = 0; k + 1 < t.size() && geom; ++k) geom = (t[k + 1] == rho * t[k]);
    if (geom) {
        m.c0 = t[0];
        m.c1 = Spec(0LL, q);
        m.ratio = rho;
        return m;
    }
    // linear recurrence t_{k+2} = 2 rho t_{k+1} - rho^2 t_k
    Spec det = t[1] * t[1] - t[0] * t[2];
    if (det.is_zero()) throw enumeration_cap_error("ray model rank", static_cast<int>(t.size()));
    Spec r1 = (t[2] * t[1] - t[3] * t[0]) / det;
    Spec r2 = (t[1] * t[3] - t[2] * t[2]) / det;
    rho = r1 * Spec(rat(1, 2), q);
    if (rho.is_zero() || r2 != Spec(0LL, q) - rho * rho)
        throw enumeration_cap_error("ray model degree", static_cast<int>(t.size()));
    m.c0 = t[0];
    m.c1 = t[1] / rho - t[0];
    m.ratio = rho;
    m.log_degree = 1;
    for (size_t k = 0; k < t.size(); ++k)
        if (t[k] != ray_value(m, static_cast<long long>(k)))
            throw enumeration_cap_error("ray model verify", static_cast<int>(t.size()));
    return m;
}

Spec ray_total(const RayModel& m) {
    if (m.zero) return Spec();
    Spec s = m.c0 * geometric_power_sum(m.ratio, 0);
    if (m.log_degree == 1) s = s + m.c1 * geometric_power_sum(m.ratio, 1);
    return s;
}

RayModel ray_rebased(const RayModel& m, long long shift) {
    if (m.zero) return m;
    RayModel r = m;
    Spec f = m.ratio.pow(shift);
    r.c0 = (m.c0 + m.c1 * Spec(Rat(shift), m.c0.q())) * f;
    r.c1 = m.c1 * f;
    return r;
}

void attach_ray_tails(ShellFunction& out, long long start, long long step, const RayModel& m) {
    if (m.zero || m.ratio.is_zero()) return;
    if (!m.c0.is_zero())
        out.add_tail(TailTerm{{start}, {step}, m.ratio, 0, 0, {{{1}, m.c0}}});
    if (m.log_degree == 1 && !m.c1.is_zero())
        out.add_tail(TailTerm{{start}, {step}, m.ratio, 1, 0, {{{1}, m.c1}}});
}

ShellFunction whittaker_unit(Group g, const LocalField& K) {
    int rank = rank_of(g);
    ShellFunction f(K, rank, ShellKind::Function);
    Shell s;
    s.level = 0;
    s.values[std::vector<long long>(rank, 1)] = Spec(1LL, K.q());
    f.set_shell(std::vector<long long>(rank, 0), s);
    return f;
}

void check_whittaker_input(Group g, const ShellFunction& w) {
    if (w.rank() != rank_of(g)) throw std::invalid_argument("whittaker data: rank mismatch");
    if (w.kind() != ShellKind::Function)
        throw std::invalid_argument("whittaker data: plain function values required");
    for (auto& [v, s] : w.window())
        if (s.level != 0)
            throw std::invalid_argument("whittaker data: window shells must be level 0");
}

// action of a single double coset on rank-one shell data
ShellFunction convolve_one_r1(Group g, const LocalField& K, const std::vector<long long>& l,
                              const ShellFunction& w) {
    ShellFunction out(K, 1, ShellKind::Function);
    if (w.window().empty()) return out;
    GroupCellFunction cells = as_group_cells(HeckeElement::double_coset(g, K, l));
    long long r = l[0];
    long long ilo = w.window().begin()->first[0];
    long long ihi = w.window().rbegin()->first[0];

    auto row = [&](long long V) {
        Spec acc(0LL, K.q());
        for (long long Vp = std::max<long long>(0, V - r); Vp <= V + r; ++Vp) {
            Spec wv = w.value_at({Vp}, {1});
            if (wv.is_zero()) continue;
            acc = acc + wv * action_kernel(g, cells, {Vp}, {V});
        }
        return acc;
    };

    // the psi layers cancel below the torus cone; a leak means a kernel bug
    for (long long V = -r - 1; V < 0; ++V)
        if (!row(V).is_zero()) throw std::logic_error("whittaker action leaked below the cone");

    long long hi = ihi + r;
    if (!w.tails().empty()) {
        long long tmax = ihi;
        for (auto& t : w.tails()) tmax = std::max(tmax, t.start[0]);
        long long F = tmax + r + 2;
        hi = F + kRayProbe - 1;
        for (long long V = std::max<long long>(0, ilo - r); V <= hi; ++V)
            out.set_shell({V}, Shell{0, {{{1}, row(V)}}});
        std::vector<Spec> probe;
        for (long long k = 0; k < kRayProbe; ++k) probe.push_back(out.value_at({F + k}, {1}));
        attach_ray_tails(out, hi + 1, 1, ray_rebased(model_ray(probe), kRayProbe));
        return out;
    }
    for (long long V = std::max<long long>(0, ilo - r); V <= hi; ++V)
        out.set_shell({V}, Shell{0, {{{1}, row(V)}}});
    return out;
}

ShellFunction convolve_one_r2(const LocalField& K, const std::vector<long long>& l,
                              const ShellFunction& w) {
    ShellFunction out(K, 2, ShellKind::Function);
    if (!w.tails().empty())
        throw std::invalid_argument("rank-two whittaker data cannot carry tails");
    if (w.window().empty()) return out;
    GroupCellFunction cells = as_group_cells(HeckeElement::double_coset(Group::Gl2, K, l));
    long long r = std::max(std::llabs(l[0]), std::llabs(l[1])) + 1;
    long long lo1 = w.window().begin()->first[0], hi1 = lo1;
    long long lo2 = w.window().begin()->first[1], hi2 = lo2;
    for (auto& [v, s] : w.window()) {
        lo1 = std::min(lo1, v[0]);
        hi1 = std::max(hi1, v[0]);
        lo2 = std::min(lo2, v[1]);
        hi2 = std::max(hi2, v[1]);
    }

    auto row = [&](long long v1, long long v2) {
        Spec acc(0LL, K.q());
        for (long long a = v1 - r; a <= v1 + r; ++a)
            for (long long b = v2 - r; b <= std::min(a, v2 + r); ++b) {
                Spec wv = w.value_at({a, b}, {1, 1});
                if (wv.is_zero()) continue;
                acc = acc + wv * action_kernel(Group::Gl2, cells, {a, b}, {v1, v2});
            }
        return acc;
    };

    for (long long v1 = lo1 - r; v1 <= hi1 + r; ++v1)
        for (long long v2 = lo2 - r; v2 <= hi2 + r; ++v2) {
            if (v1 < v2) {
                // dominance audit on the adjacent band
                if (v1 == v2 - 1 && !row(v1, v2).is_zero())
                    throw std::logic_error("whittaker action leaked below the cone");
                continue;
            }
            out.set_shell({v1, v2}, Shell{0, {{{1, 1}, row(v1, v2)}}});
        }
    return out;
}

// constant term of a single double coset, as a Laurent value in the Satake
// coordinates
Spec satake_term(Group g, const LocalField& K, const std::vector<long long>& l) {
    long long p = K.p, q = K.q();
    GroupCellFunction cells = as_group_cells(HeckeElement::double_coset(g, K, l));
    auto [lmin, lmax] = coset_levels(g, l);
    long long reach = rank_of(g) == 1 ? l[0] : std::llabs(l[0]) + std::llabs(l[1]);

    auto du_row = [&](long long v1, long long v2) {
        long long mlo = -(std::llabs(v1) + reach + 4);
        for (long long m = mlo; m < mlo + 2; ++m)
            if (!cells.value_at(torus_mat(g, v1, v2, p, rp(p, m))).is_zero())
                throw std::logic_error("constant term layer below the structural bound");
        long long mhi = std::max(lmax - v1 + 1, mlo + 1);
        Spec acc(0LL, q);
        for (long long m = mlo; m < mhi; ++m) {
            Spec val = cells.value_at(torus_mat(g, v1, v2, p, rp(p, m)));
            if (!val.is_zero()) acc = acc + val * Spec(rp(p, -m) - rp(p, -m - 1), q);
        }
        acc = acc + cells.value_at(torus_mat(g, v1, v2, p, Rat(0))) * Spec(rp(p, -mhi), q);
        return acc;
    };

    Spec acc(0LL, q);
    if (rank_of(g) == 1) {
        long long T = l[0] + 2;
        for (long long V = -T; V <= T; ++V) {
            Spec row = du_row(V, -V);
            if (row.is_zero()) continue;
            if (std::llabs(V) > l[0])
                throw enumeration_cap_error("constant term window", static_cast<int>(T));
            long long e = g == Group::Sl2 ? 2 * V : V;
            acc = acc + Spec::q_power_half(-e, q) *
                            Spec::monomial(Cyclo(1), exps_of(VZ1, static_cast<int>(e)), q) * row;
        }
        return acc;
    }
    long long a = l[0], b = l[1];
    for (long long v1 = b - 2; v1 <= a + 2; ++v1) {
        long long v2 = a + b - v1;
        Spec row = du_row(v1, v2);
        if (row.is_zero()) continue;
        if (v1 > a || v1 < b)
            throw enumeration_cap_error("constant term window", static_cast<int>(a - b + 2));
        Exps e = exps_zero();
        e[VZ1] = static_cast<int>(v1);
        e[VZ2] = static_cast<int>(v2);
        acc = acc + Spec::q_power_half(-(v1 - v2), q) * Spec::monomial(Cyclo(1), e, q) * row;
    }
    return acc;
}

// leading monomial of a polynomial Satake value in graded-lex order on the
// z exponents, with the q^{1/2} part of the coefficient kept intact
struct ZLead {
    bool ok = false;
    int e1 = 0, e2 = 0;
    Spec coeff;
};

ZLead leading_z(const Spec& s) {
    ZLead out;
    if (s.is_zero()) return out;
    Spec n = s.normalized();
    for (auto& [e, c] : n.den().terms())
        if (e[VZ1] != 0 || e[VZ2] != 0)
            throw std::logic_error("satake value is not polynomial in the coordinates");
    std::map<std::pair<int, int>, Poly> groups;
    for (auto& [e, c] : n.num().terms()) {
        if (e[VT] != 0 || e[VU] != 0 || e[VZ3] != 0)
            throw std::logic_error("satake value depends on a foreign variable");
        Exps rest = e;
        rest[VZ1] = 0;
        rest[VZ2] = 0;
        groups[{e[VZ1], e[VZ2]}] = groups[{e[VZ1], e[VZ2]}] + Poly::monomial(c, rest);
    }
    auto best = groups.begin();
    for (auto it = groups.begin(); it != groups.end(); ++it) {
        auto key = [](const std::pair<int, int>& z) { return std::pair<int, int>(z.first + z.second, z.first); };
        if (key(it->first) > key(best->first)) best = it;
    }
    out.ok = true;
    out.e1 = best->first.first;
    out.e2 = best->first.second;
    out.coeff = Spec::from_ratio(best->second, n.den(), s.q());
    return out;
}

// character of Sym^i of the dual representation, in the Satake coordinates
Spec sym_character(Group g, DualRep rep, int i, long long q) {
    Spec acc(0LL, q);
    if (g == Group::Sl2) {
        std::map<int, long long> cnt;
        for (int a = 0; a <= i; ++a)
            for (int b = 0; a + b <= i; ++b) cnt[2 * (a - (i - a - b))] += 1;
        for (auto& [e, c] : cnt)
            acc = acc + Spec::monomial(Cyclo(c), exps_of(VZ1, e), q);
        return acc;
    }
    if (g == Group::Pgl2) {
        for (int k = 0; k <= i; ++k)
            acc = acc + Spec::monomial(Cyclo(1), exps_of(VZ1, i - 2 * k), q);
        return acc;
    }
    for (int k = 0; k <= i; ++k) {
        Exps e = exps_zero();
        e[VZ1] = i - k;
        e[VZ2] = k;
        acc = acc + Spec::monomial(Cyclo(1), e, q);
    }
    return acc;
}

// series pass of basic_whittaker: resums sum_j x^j (sym_j * base) per shell,
// splitting the terms by parity so each subsequence is a verified ray
ShellFunction series_pass(Group g, const LocalField& K, DualRep rep, const Spec& x,
                          const ShellFunction& base, long long hi) {
    long long q = K.q();
    int jmax = static_cast<int>(hi) + 2 + 2 * kRayProbe;
    std::vector<ShellFunction> B;
    std::vector<std::map<std::vector<long long>, Spec>> E;
    std::vector<Spec> xp;
    for (int j = 0; j <= jmax; ++j) {
        B.push_back(hecke_convolve_whittaker(
            HeckeElement::double_coset(g, K, {static_cast<long long>(j)}), base));
        E.push_back(sym_power_element(g, K, rep, j).terms);
        xp.push_back(x.pow(j));
    }
    auto term = [&](int j, long long V) {
        Spec acc(0LL, q);
        for (auto& [l, c] : E[j]) {
            Spec bv = B[static_cast<int>(l[0])].value_at({V}, {1});
            if (!bv.is_zero()) acc = acc + c * bv;
        }
        return xp[j] * acc;
    };
    ShellFunction out(K, 1, ShellKind::Function);
    for (long long V = 0; V <= hi; ++V) {
        Spec total(0LL, q);
        for (int par = 0; par < 2; ++par) {
            int j0 = static_cast<int>(V) + 2;
            if (((j0 % 2) + 2) % 2 != par) ++j0;
            for (int j = par; j < j0; j += 2) total = total + term(j, V);
            std::vector<Spec> probe;
            for (int k = 0; k < kRayProbe; ++k) probe.push_back(term(j0 + 2 * k, V));
            total = total + ray_total(model_ray(probe));
        }
        out.set_shell({V}, Shell{0, {{{1}, total}}});
    }
    return out;
}

void attach_deep_tail(ShellFunction& f, long long hi) {
    std::vector<Spec> probe;
    for (long long k = 0; k < kRayProbe; ++k)
        probe.push_back(f.value_at({hi - kRayProbe + 1 + k}, {1}));
    attach_ray_tails(f, hi + 1, 1, ray_rebased(model_ray(probe), kRayProbe));
}

} // namespace

// ---- HeckeElement -----------------------------------------------------

HeckeElement HeckeElement::identity(Group g, const LocalField& K) {
    check_group(g);
    HeckeElement h{g, K, {}};
    h.terms[std::vector<long long>(rank_of(g), 0)] = Spec(1LL, K.q());
    return h;
}

HeckeElement HeckeElement::double_coset(Group g, const LocalField& K,
                                        const std::vector<long long>& lambda) {
    check_lambda(g, lambda);
    HeckeElement h{g, K, {}};
    h.terms[lambda] = Spec(1LL, K.q());
    return h;
}

HeckeElement& HeckeElement::operator+=(const HeckeElement& o) {
    if (tag != o.tag || K.p != o.K.p)
        throw std::invalid_argument("hecke: mismatched algebras");
    for (auto& [l, c] : o.terms) {
        auto it = terms.find(l);
        if (it == terms.end()) {
            if (!c.is_zero()) terms[l] = c;
            continue;
        }
        it->second = it->second + c;
        if (it->second.is_zero()) terms.erase(it);
    }
    return *this;
}

HeckeElement HeckeElement::scaled(const Spec& c) const {
    HeckeElement h{tag, K, {}};
    if (c.is_zero()) return h;
    for (auto& [l, v] : terms) {
        Spec s = v * c;
        if (!s.is_zero()) h.terms[l] = s;
    }
    return h;
}

bool HeckeElement::operator==(const HeckeElement& o) const {
    if (tag != o.tag || K.p != o.K.p) return false;
    for (auto& [l, c] : terms) {
        auto it = o.terms.find(l);
        if (it == o.terms.end() ? !c.is_zero() : c != it->second) return false;
    }
    for (auto& [l, c] : o.terms)
        if (!terms.count(l) && !c.is_zero()) return false;
    return true;
}

long long HeckeElement::reach() const {
    long long r = 0;
    for (auto& [l, c] : terms)
        for (long long x : l) r = std::max(r, std::llabs(x));
    return r + (rank_of(tag) == 2 ? 1 : 0);
}

GroupCellFunction as_group_cells(const HeckeElement& h) {
    check_group(h.tag);
    if (h.terms.empty()) {
        GroupCellFunction z = GroupCellFunction::unit_group(h.tag, h.K);
        return z.scaled(Spec(0LL, h.K.q()));
    }
    bool first = true;
    GroupCellFunction acc = GroupCellFunction::unit_group(h.tag, h.K);
    for (auto& [l, c] : h.terms) {
        GroupCellFunction part =
            h.tag == Group::Gl2
                ? GroupCellFunction{Group::Gl2, CellFunction(h.K, 4, 1), l[0] + l[1]}
                : GroupCellFunction::hecke_orbit(h.tag, h.K, static_cast<int>(l[0]));
        if (h.tag == Group::Gl2) {
            part.cells.add_indicator(Spec(1LL, h.K.q()), {Rat(0), Rat(0), Rat(0), Rat(0)},
                                     static_cast<int>(l[1]));
            part.cells.add_indicator(Spec(-1LL, h.K.q()), {Rat(0), Rat(0), Rat(0), Rat(0)},
                                     static_cast<int>(l[1]) + 1);
        }
        part = part.scaled(c);
        if (first) {
            acc = part;
            first = false;
        } else {
            acc += part;
        }
    }
    return acc;
}

// ---- Satake transform -------------------------------------------------

SatakePolynomial::SatakePolynomial(Group g, const Spec& v) : tag(g), value(v.normalized()) {
    check_group(g);
    if (value.depends_on(VT) || value.depends_on(VU))
        throw std::invalid_argument("satake: value depends on a foreign variable");
    if (rank_of(g) == 1) {
        if (value.depends_on(VZ2) || value.depends_on(VZ3))
            throw std::invalid_argument("satake: rank-one value in a single coordinate");
        Spec inv = value.subst_monomial(VZ1, Cyclo(1), exps_of(VZ1, -1));
        if (inv != value) throw std::invalid_argument("satake: not Weyl invariant");
        if (g == Group::Sl2) {
            for (auto& [e, c] : value.num().terms())
                if (e[VZ1] % 2 != 0)
                    throw std::invalid_argument("satake: Sl2 values live on even powers");
        }
    } else {
        if (value.depends_on(VZ3))
            throw std::invalid_argument("satake: value depends on a foreign variable");
        Spec s = value.subst_monomial(VZ1, Cyclo(1), exps_of(VZ3, 1));
        s = s.subst_monomial(VZ2, Cyclo(1), exps_of(VZ1, 1));
        s = s.subst_monomial(VZ3, Cyclo(1), exps_of(VZ2, 1));
        if (s != value) throw std::invalid_argument("satake: not Weyl invariant");
    }
}

SatakePolynomial operator*(const SatakePolynomial& a, const SatakePolynomial& b) {
    if (a.tag != b.tag) throw std::invalid_argument("satake: mismatched groups");
    return SatakePolynomial(a.tag, a.value * b.value);
}

SatakePolynomial operator+(const SatakePolynomial& a, const SatakePolynomial& b) {
    if (a.tag != b.tag) throw std::invalid_argument("satake: mismatched groups");
    return SatakePolynomial(a.tag, a.value + b.value);
}

bool SatakePolynomial::operator==(const SatakePolynomial& o) const {
    return tag == o.tag && value == o.value;
}

std::string SatakePolynomial::str() const { return value.str(); }

SatakePolynomial satake(const HeckeElement& h) {
    check_group(h.tag);
    Spec acc(0LL, h.K.q());
    for (auto& [l, c] : h.terms) acc = acc + c * satake_term(h.tag, h.K, l);
    return SatakePolynomial(h.tag, acc);
}

// ---- algebra product via the Whittaker action --------------------------

HeckeElement hecke_convolve(const HeckeElement& a, const HeckeElement& b) {
    if (a.tag != b.tag || a.K.p != b.K.p)
        throw std::invalid_argument("hecke: mismatched algebras");
    ShellFunction base = whittaker_unit(a.tag, a.K);
    ShellFunction act = hecke_convolve_whittaker(a, hecke_convolve_whittaker(b, base));
    int rank = rank_of(a.tag);
    std::vector<long long> ukey(rank, 1);

    std::map<std::vector<long long>, Spec> vals;
    for (auto& [v, s] : act.window()) {
        Spec x = s.values.at(ukey);
        if (!x.is_zero()) vals[v] = x;
    }
    HeckeElement out{a.tag, a.K, {}};
    std::map<std::vector<long long>, ShellFunction> basis;
    int guard = 0;
    while (!vals.empty()) {
        if (++guard > 400) throw std::logic_error("hecke product peel did not terminate");
        auto top = vals.begin();
        for (auto it = vals.begin(); it != vals.end(); ++it) {
            auto key = [&](const std::vector<long long>& v) {
                long long s = 0;
                for (long long x : v) s += x;
                return std::pair<long long, long long>(s, v[0]);
            };
            if (key(it->first) > key(top->first)) top = it;
        }
        std::vector<long long> l = top->first;
        check_lambda(a.tag, l);
        auto bit = basis.find(l);
        if (bit == basis.end())
            bit = basis
                      .emplace(l, hecke_convolve_whittaker(
                                      HeckeElement::double_coset(a.tag, a.K, l), base))
                      .first;
        Spec lead = bit->second.value_at(l, ukey);
        if (lead.is_zero()) throw std::logic_error("hecke basis lost its leading shell");
        Spec c = top->second / lead;
        out.terms[l] = c;
        for (auto& [v, s] : bit->second.window()) {
            Spec sub = c * s.values.at(ukey);
            if (sub.is_zero()) continue;
            auto it = vals.find(v);
            if (it == vals.end()) {
                vals[v] = Spec(0LL, a.K.q()) - sub;
            } else {
                it->second = it->second - sub;
            }
            if (vals[v].is_zero()) vals.erase(v);
        }
    }
    return out;
}

// ---- sym-power elements -------------------------------------------------

HeckeElement sym_power_element(Group g, const LocalField& K, DualRep rep, int i) {
    check_group(g);
    bool ok = (g == Group::Sl2 && rep == DualRep::Ad) ||
              ((g == Group::Pgl2 || g == Group::Gl2) && rep == DualRep::Std);
    if (!ok) throw std::invalid_argument("hecke: representation does not match the dual group");
    if (i < 0) throw std::invalid_argument("hecke: negative symmetric power");
    if (i > 64) throw enumeration_cap_error("sym power degree", i);

    Spec target = sym_character(g, rep, i, K.q());
    HeckeElement out{g, K, {}};
    int guard = 0;
    while (true) {
        if (++guard > 2 * i + 8) throw std::logic_error("sym power inversion did not terminate");
        ZLead lead = leading_z(target);
        if (!lead.ok) break;
        std::vector<long long> l;
        if (rank_of(g) == 1) {
            if (lead.e1 < 0 || (g == Group::Sl2 && lead.e1 % 2 != 0))
                throw std::logic_error("sym character leading term is not dominant");
            l = {g == Group::Sl2 ? lead.e1 / 2 : lead.e1};
        } else {
            if (lead.e1 < lead.e2)
                throw std::logic_error("sym character leading term is not dominant");
            l = {lead.e1, lead.e2};
        }
        Spec basis = satake_term(g, K, l);
        ZLead bl = leading_z(basis);
        if (!bl.ok || bl.e1 != lead.e1 || bl.e2 != lead.e2)
            throw std::logic_error("satake basis leading term moved");
        Spec c = lead.coeff / bl.coeff;
        out.terms[l] = c;
        target = target - c * basis;
    }
    for (auto it = out.terms.begin(); it != out.terms.end();)
        it = it->second.is_zero() ? out.terms.erase(it) : std::next(it);
    return out;
}

// ---- Whittaker shell action ---------------------------------------------

ShellFunction hecke_convolve_whittaker(const HeckeElement& h, const ShellFunction& w) {
    check_group(h.tag);
    check_whittaker_input(h.tag, w);
    if (w.field().p != h.K.p) throw std::invalid_argument("hecke: field mismatch");
    int rank = rank_of(h.tag);
    ShellFunction out(h.K, rank, ShellKind::Function);
    for (auto& [l, c] : h.terms) {
        ShellFunction part = rank == 1 ? convolve_one_r1(h.tag, h.K, l, w)
                                       : convolve_one_r2(h.K, l, w);
        out += part.scaled(c);
    }
    return out;
}

// ---- basic vectors ------------------------------------------------------

Group basic_space_group(BasicSpace s) {
    switch (s) {
    case BasicSpace::Sl2Adjoint: return Group::Sl2;
    case BasicSpace::Pgl2StdPair: return Group::Pgl2;
    default: return Group::Gl2;
    }
}

ShellFunction basic_whittaker(BasicSpace space, const LocalField& K, long long vmax) {
    Group g = basic_space_group(space);
    if (g == Group::Gl2)
        throw std::invalid_argument("basic vector: the det-graded space has no shell series");
    long long q = K.q();
    long long big = std::max<long long>(vmax, 8);
    DualRep rep = g == Group::Sl2 ? DualRep::Ad : DualRep::Std;
    Spec x = g == Group::Sl2 ? Spec(Rat(1, q), q) : Spec::q_power_half(-1, q);
    int passes = g == Group::Sl2 ? 1 : 2;

    ShellFunction data = whittaker_unit(g, K);
    for (int pass = 1; pass <= passes; ++pass) {
        long long hi = pass == passes ? big : big + kRayProbe;
        data = series_pass(g, K, rep, x, data, hi);
        attach_deep_tail(data, hi);
    }
    return data;
}

ShellFunction whittaker_pushforward(Group g, const ShellFunction& w, long long wmin,
                                    long long wmax, std::pair<int, int> signs) {
    if (g != Group::Sl2 && g != Group::Pgl2)
        throw std::invalid_argument("pushforward: rank-one groups only");
    check_whittaker_input(g, w);
    if (wmin > wmax) throw std::invalid_argument("pushforward: empty window");
    const LocalField& K = w.field();
    long long p = K.p, q = K.q();
    int sigma = g == Group::Sl2 ? kSl2BesselSign : kPgl2BesselSign;
    long long exp = g == Group::Sl2 ? 2 : 1;
    std::pair<int, int> kls{signs.second, signs.first};

    // torus shells pairing with the output shell at v: the free halfline point
    // plus the finitely many layers whose stationary set meets the units
    auto layers = [&](long long v) {
        std::vector<long long> out;
        long long cap = std::max<long long>({0, (g == Group::Sl2 ? 1 : 2) - v, -v}) + 3;
        for (long long V = 0; V <= cap; ++V) {
            if (g == Group::Pgl2 && ((V - v) % 2 + 2) % 2 != 0) continue;
            if (V == -v) {
                out.push_back(V);
                continue;
            }
            long long wv = g == Group::Sl2 ? -(V + v) : -(v + V) / 2;
            long long vb = g == Group::Sl2 ? V - v : (V - v) / 2;
            if (V < (g == Group::Sl2 ? 1 - v : 2 - v)) continue;
            if (wv == vb || std::min(wv, vb) >= -1) out.push_back(V);
        }
        return out;
    };

    auto shell_value = [&](long long v, long long u) {
        Spec acc(0LL, q);
        for (long long V : layers(v)) {
            Spec dv = w.value_at({V}, {1});
            if (dv.is_zero()) continue;
            if (V == -v) {
                acc = acc + dv;
                continue;
            }
            long long wv = g == Group::Sl2 ? -(V + v) : -(v + V) / 2;
            long long vb = g == Group::Sl2 ? V - v : (V - v) / 2;
            long long mp = std::max<long long>({0, -wv, -vb});
            Rat barg = Rat(sigma) * rp(p, vb) *
                       (g == Group::Sl2 ? Rat(1, u * u) : Rat(1, u));
            Cyclo kl = kloosterman_sum(K, rp(p, wv), barg, static_cast<int>(mp), kls);
            acc = acc + dv * Spec(kl, q) * Spec(rp(p, -wv - mp), q);
        }
        return acc * Spec(rpow(Rat(q), -exp * v), q);
    };

    auto shell_level = [&](long long v) {
        long long L = 0;
        for (long long V : layers(v)) {
            if (V == -v) continue;
            long long vb = g == Group::Sl2 ? V - v : (V - v) / 2;
            L = std::max(L, -vb);
        }
        return std::max<long long>(L, 0);
    };

    ShellFunction out(K, 1, ShellKind::Measure);
    for (long long v = wmin; v <= wmax; ++v) {
        Shell s;
        s.level = static_cast<int>(shell_level(v));
        for (long long u : unit_reps(p, s.level)) s.values[{u}] = shell_value(v, u);
        out.set_shell({v}, s);
    }
    if (wmin <= 1) {
        std::vector<Spec> probe;
        for (long long k = 0; k < kRayProbe; ++k) {
            long long v = wmin - 1 - k;
            if (shell_level(v) != 0)
                throw std::logic_error("deep shells should not depend on units");
            probe.push_back(shell_value(v, 1));
        }
        attach_ray_tails(out, wmin - 1, -1, model_ray(probe));
    }
    return out;
}

ShellFunction basic_vector(BasicSpace space, const LocalField& K, long long wmin,
                           long long wmax, std::pair<int, int> signs) {
    Group g = basic_space_group(space);
    if (wmin > wmax) throw std::invalid_argument("basic vector: empty window");
    if (g != Group::Gl2) {
        long long big = std::max<long long>({8, 8 - wmin, wmax + 2});
        return whittaker_pushforward(g, basic_whittaker(space, K, big), wmin, wmax, signs);
    }

    long long p = K.p, q = K.q();
    std::map<long long, GroupCellFunction> cells;
    ShellFunction out(K, 2, ShellKind::HalfDensity);
    for (long long v1 = std::max<long long>(0, wmin); v1 <= wmax; ++v1)
        for (long long v2 = wmin; v2 <= wmax; ++v2) {
            long long i = v1 + v2;
            if (i < 0 || i > wmax) continue;
            auto it = cells.find(i);
            if (it == cells.end())
                it = cells
                         .emplace(i, as_group_cells(sym_power_element(
                                         Group::Gl2, K, DualRep::Std, static_cast<int>(i))))
                         .first;
            Spec norm = Spec::q_power_half(-3 * i, q);
            auto value = [&](long long u1, long long u2) {
                OrbitalResult r = kuznetsov_orbital(it->second, {rp(p, v1) * Rat(u1), rp(p, v2) * Rat(u2)},
                                                    signs, ShellKind::HalfDensity);
                return norm * r.value;
            };
            bool placed = false;
            for (int L = 0; L <= 2 && !placed; ++L) {
                // verify one level deeper that the unit dependence stops at L
                std::map<std::vector<long long>, Spec> vals;
                bool constant = true;
                for (auto& u : unit_rep_tuples(p, L + 1, 2)) {
                    auto red = [&](long long x) {
                        if (L == 0) return 1LL;
                        long long pm = 1;
                        for (int k = 0; k < L; ++k) pm *= p;
                        return x % pm;
                    };
                    std::vector<long long> key{red(u[0]), red(u[1])};
                    Spec v = value(u[0], u[1]);
                    auto f = vals.find(key);
                    if (f == vals.end()) {
                        vals[key] = v;
                    } else if (f->second != v) {
                        constant = false;
                        break;
                    }
                }
                if (!constant) continue;
                out.set_shell({v1, v2}, Shell{L, vals});
                placed = true;
            }
            if (!placed) throw enumeration_cap_error("basic vector shell level", 2);
        }
    return out;
}

} // namespace hankel
