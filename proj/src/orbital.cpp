#include "hankel/orbital.hpp"

#include <algorithm>
#include <set>

namespace hankel {

namespace {

long long pw(long long p, long long e) {
    long long r = 1;
    for (long long i = 0; i < e; ++i) r *= p;
    return r;
}

Rat tw(const Cell& c, int i) {
    return i < (int)c.twist.size() ? c.twist[i] : Rat(0);
}

// c + p^k Z_p
struct Ball {
    Rat c;
    long long k;
};

bool ball_has(const Ball& b, const Rat& x, long long p) {
    Rat d = x - b.c;
    return d == 0 || val_p(d, p) >= b.k;
}

// intersection is empty or the finer ball
std::optional<Ball> ball_meet(const Ball& A, const Ball& B, long long p) {
    const Ball& lo = (A.k <= B.k) ? A : B;
    const Ball& hi = (A.k <= B.k) ? B : A;
    Rat d = hi.c - lo.c;
    if (d != 0 && val_p(d, p) < lo.k) return std::nullopt;
    return hi;
}

bool plain_cells(const CellFunction& f, bool need_ad_centered) {
    for (const auto& [cell, coeff] : f.terms()) {
        for (const Rat& t : cell.twist)
            if (t != 0) return false;
        if (cell.center[1] != 0 || cell.center[2] != 0) return false;
        if (need_ad_centered && (cell.center[0] != 0 || cell.center[3] != 0)) return false;
    }
    return true;
}

} // namespace

// ---- finite-ring oracle ----------------------------------------------------

ScanReport scan_ring(const ScanJob& job, const std::function<bool(const std::vector<long long>&)>& pred,
                     const std::function<long long(const std::vector<long long>&)>& phase) {
    if (job.p < 2 || job.level < 1 || job.arity < 1) throw std::invalid_argument("scan_ring: bad job");
    long long pN = pw(job.p, job.level);
    long long total = 1;
    for (int i = 0; i < job.arity; ++i) {
        if (total > job.cap / pN) throw enumeration_cap_error("scan_ring: grid exceeds cap", (int)job.level);
        total *= pN;
    }
    ScanReport rep;
    rep.weighted = Cyclo(Rat(0));
    std::vector<long long> x(job.arity, 0);
    for (long long step = 0; step < total; ++step) {
        if (pred(x)) {
            ++rep.solutions;
            if (phase) {
                long long k = phase(x) % pN;
                if (k < 0) k += pN;
                rep.weighted = rep.weighted + Cyclo::root_of_unity((unsigned)pN, k);
            }
        }
        for (int i = 0; i < job.arity; ++i) {
            if (++x[i] < pN) break;
            x[i] = 0;
        }
    }
    if (!phase) rep.weighted = Cyclo(Rat(rep.solutions));
    return rep;
}

long long sl2_class_count(long long p, int N) {
    if (N < 0) throw std::invalid_argument("sl2_class_count: N >= 0");
    if (N == 0) return 1;
    return pw(p, 3 * N) - pw(p, 3 * N - 2);
}

long long pair_count_mod(long long p, int L, long long r) {
    if (L < 0) throw std::invalid_argument("pair_count_mod: L >= 0");
    if (L == 0) return 1;
    long long pL = pw(p, L);
    long long x = (r % pL + pL) % pL;
    int v = L;
    if (x != 0) {
        v = 0;
        while (x % p == 0) {
            x /= p;
            ++v;
        }
    }
    long long shell = pw(p, L) - pw(p, L - 1);
    if (v < L) return (v + 1) * shell;
    return pw(p, L) + (long long)L * shell;
}

long long pair_count_balls(long long p, int L, long long r, int beta_b, int beta_c) {
    if (L < 0) throw std::invalid_argument("pair_count_balls: L >= 0");
    int bb = std::max(beta_b, 0), bc = std::max(beta_c, 0);
    long long pL = pw(p, L);
    long long x = (r % pL + pL) % pL;
    int S = bb + bc;
    if (S >= L) {
        if (x != 0) return 0;
        return pw(p, std::max(0, L - bb)) * pw(p, std::max(0, L - bc));
    }
    long long pS = pw(p, S);
    if (x % pS != 0) return 0;
    return pair_count_mod(p, L - S, (x / pS) % pw(p, L - S)) * pS;
}

Cyclo kloosterman_sum(const LocalField& K, const Rat& a, const Rat& b, int m,
                      std::pair<int, int> signs) {
    if (std::abs(signs.first) != 1 || std::abs(signs.second) != 1)
        throw std::invalid_argument("kloosterman_sum: signs must be +-1");
    if (m < 0) throw std::invalid_argument("kloosterman_sum: m >= 0");
    AddChar p1{K, signs.first}, p2{K, signs.second};
    if (m == 0) return p1(a) * p2(b);
    long long pm = pw(K.p, m);
    Cyclo acc(Rat(0));
    for (long long u : unit_reps(K.p, m)) {
        long long ui = inv_mod(u, pm);
        acc = acc + p1(a * u) * p2(b * ui);
    }
    return acc;
}

// ---- group cell functions ---------------------------------------------------

GroupCellFunction GroupCellFunction::unit_group(Group g, const LocalField& K) {
    CellFunction cells(K, 4, +1);
    cells.add_indicator(Spec(Rat(1), K.q()), {Rat(0), Rat(0), Rat(0), Rat(0)}, 0);
    std::optional<long long> dv;
    if (g == Group::Gl2 || g == Group::Pgl2) dv = 0;
    return {g, cells, dv};
}

GroupCellFunction GroupCellFunction::hecke_orbit(Group g, const LocalField& K, int r) {
    if (r < 0) throw std::invalid_argument("hecke_orbit: r >= 0");
    long long q = K.q();
    if (r == 0 && g != Group::Mat2) return unit_group(g, K);
    CellFunction cells(K, 4, +1);
    std::vector<Rat> z{Rat(0), Rat(0), Rat(0), Rat(0)};
    if (g == Group::Sl2) {
        cells.add_indicator(Spec(Rat(1), q), z, -r);
        cells.add_indicator(Spec(Rat(-1), q), z, -r + 1);
        return {g, cells, std::nullopt};
    }
    cells.add_indicator(Spec(Rat(1), q), z, 0);
    if (r > 0) cells.add_indicator(Spec(Rat(-1), q), z, 1);
    return {g, cells, (long long)r};
}

Spec GroupCellFunction::value_at(const std::array<Rat, 4>& m) const {
    const LocalField& K = field();
    long long p = K.p, q = K.q();
    std::array<Rat, 4> r = m;
    if (tag == Group::Pgl2) {
        long long mv = 0;
        bool seen = false;
        for (const Rat& e : r)
            if (e != 0) {
                long long v = val_p(e, p);
                mv = seen ? std::min(mv, v) : v;
                seen = true;
            }
        if (!seen) throw std::invalid_argument("value_at: zero matrix is not a Pgl2 point");
        Rat sc = rpow(Rat(p), -mv);
        for (Rat& e : r) e *= sc;
    }
    Rat det = r[0] * r[3] - r[1] * r[2];
    if (tag == Group::Sl2 && det != 1) throw std::invalid_argument("value_at: Sl2 point needs det 1");
    if (tag == Group::Pgl2 && det == 0) throw std::invalid_argument("value_at: Pgl2 point must be invertible");
    if (det_val) {
        if (det == 0 || val_p(det, p) != *det_val) return Spec(Rat(0), q);
    }
    return cells.value_at(std::vector<Rat>(r.begin(), r.end()));
}

GroupCellFunction GroupCellFunction::unipotent_translate(const Rat& u, const Rat& v) const {
    const LocalField& K = field();
    long long p = K.p;
    if (u == 0 && v == 0) return *this;
    long long vu = (u == 0) ? 0 : std::max(0LL, -val_p(u, p));
    long long vv = (v == 0) ? 0 : std::max(0LL, -val_p(v, p));
    long long s = vu + vv;
    CellFunction out(K, 4, cells.psi_sign());
    for (const auto& [cell, coeff] : cells.terms()) {
        int l = cell.level, l2 = (int)(l + s);
        Rat ta = tw(cell, 0), tb = tw(cell, 1), tc = tw(cell, 2), td = tw(cell, 3);
        std::vector<Rat> twist{ta + v * tb, tb, u * ta + u * v * tb + tc + v * td, u * tb + td};
        // digit depths per coordinate so the sheared class is determined
        long long Da = s + vv, Db = s, Dc = s + vu + vv, Dd = s + vu;
        Rat pl = rpow(Rat(p), l);
        std::set<std::array<Rat, 4>> seen;
        for (long long ia = 0; ia < pw(p, Da); ++ia)
            for (long long ib = 0; ib < pw(p, Db); ++ib)
                for (long long ic = 0; ic < pw(p, Dc); ++ic)
                    for (long long id = 0; id < pw(p, Dd); ++id) {
                        Rat ya = cell.center[0] + pl * ia, yb = cell.center[1] + pl * ib;
                        Rat yc = cell.center[2] + pl * ic, yd = cell.center[3] + pl * id;
                        std::array<Rat, 4> x{reduce_mod_level(ya - u * yc, l2, p),
                                             reduce_mod_level(yb - v * ya - u * yd + u * v * yc, l2, p),
                                             reduce_mod_level(yc, l2, p),
                                             reduce_mod_level(yd - v * yc, l2, p)};
                        if (seen.insert(x).second)
                            out.add_term(coeff, {x[0], x[1], x[2], x[3]}, twist, l2);
                    }
    }
    return {tag, out, det_val};
}

GroupCellFunction GroupCellFunction::scaled(const Spec& c) const {
    return {tag, cells.scaled(c), det_val};
}

GroupCellFunction& GroupCellFunction::operator+=(const GroupCellFunction& o) {
    if (tag != o.tag || det_val != o.det_val)
        throw std::invalid_argument("GroupCellFunction: mismatched tag or det stratum");
    cells += o.cells;
    return *this;
}

// ---- Kuznetsov --------------------------------------------------------------

namespace {

// orbit matrix n(x) wt n(y) as affine data: a = Fa x, b = Gco x y + Hb,
// c = Cc, d = Fd y
struct OrbitCoefs {
    Rat Fa, Fd, Cc, Gco, Hb;
};

} // namespace

OrbitalResult kuznetsov_orbital(const GroupCellFunction& phi, const std::vector<Rat>& point,
                                std::pair<int, int> signs, ShellKind kind, int cap) {
    const LocalField& K = phi.field();
    long long p = K.p, q = K.q();
    if (std::abs(signs.first) != 1 || std::abs(signs.second) != 1)
        throw std::invalid_argument("kuznetsov_orbital: signs must be +-1");
    if (kind == ShellKind::Measure)
        throw std::invalid_argument("kuznetsov_orbital: pointwise values carry Function or HalfDensity kind");
    size_t want = (phi.tag == Group::Gl2 || phi.tag == Group::Mat2) ? 2 : 1;
    if (point.size() != want) throw std::invalid_argument("kuznetsov_orbital: wrong point rank");
    for (const Rat& c : point)
        if (c == 0) throw std::invalid_argument("kuznetsov_orbital: point coordinates must be nonzero");

    auto zero = [&] { return OrbitalResult{point, Spec(Rat(0), q), true, 0}; };
    OrbitCoefs D;
    long long prefh = 0;
    if (phi.tag == Group::Sl2) {
        Rat zeta = point[0];
        if (phi.det_val && *phi.det_val != 0) return zero();
        D = {zeta, zeta, zeta, zeta, Rat(-1) / zeta};
        prefh = -2 * val_p(zeta, p);
    } else if (phi.tag == Group::Pgl2) {
        Rat xi = point[0];
        if (!phi.det_val)
            throw std::invalid_argument("kuznetsov_orbital: Pgl2 input needs a det stratum");
        long long r = *phi.det_val;
        if (r < 0) return zero();
        if (r > 1)
            throw std::invalid_argument("kuznetsov_orbital: Pgl2 strata beyond det valuation 1 unsupported");
        long long m = val_p(xi, p);
        long long d = m - r;
        if (((d % 2) + 2) % 2 != 0) return zero();
        Rat sc = rpow(Rat(p), -(d / 2));
        D = {xi * sc, xi * sc, xi * sc, xi * sc, sc};
        prefh = -m;
    } else {
        Rat b1 = point[0], b2 = point[1];
        long long v1 = val_p(b1, p), v2 = val_p(b2, p);
        if (phi.det_val && *phi.det_val != v1 + v2) return zero();
        D = {b1, b1, b1, b1, b2};
        prefh = -3 * v1 - v2;
    }
    if (kind == ShellKind::Function) prefh = 0;

    AddChar psi{K, +1};
    int sigma = phi.cells.psi_sign();
    auto value_at_n = [&](int n) -> Spec {
        Spec tot(Rat(0), q);
        for (const auto& [cell, coeff] : phi.cells.terms()) {
            if (!ball_has({cell.center[2], cell.level}, D.Cc, p)) continue;
            Ball xb{cell.center[0] / D.Fa, cell.level - val_p(D.Fa, p)};
            Ball ybd{cell.center[3] / D.Fd, cell.level - val_p(D.Fd, p)};
            Rat stepx = rpow(Rat(p), xb.k);
            for (long long j = 0; j < pw(p, n); ++j) {
                Rat xh = xb.c + stepx * j;
                Rat G = D.Gco * xh;
                std::optional<Ball> yb = ybd;
                if (G == 0) {
                    if (!ball_has({cell.center[1], cell.level}, D.Hb, p)) continue;
                } else {
                    yb = ball_meet(ybd, {(cell.center[1] - D.Hb) / G, cell.level - val_p(G, p)}, p);
                }
                if (!yb) continue;
                Rat mu = Rat(signs.second) + sigma * (tw(cell, 1) * G + tw(cell, 3) * D.Fd);
                Rat cst = Rat(signs.first) * xh +
                          sigma * (tw(cell, 0) * D.Fa * xh + tw(cell, 1) * D.Hb + tw(cell, 2) * D.Cc);
                if (mu != 0 && val_p(mu, p) < -yb->k) continue;
                tot += coeff * Spec(psi(mu * yb->c + cst), q) *
                       Spec(rpow(Rat(p), -(xb.k + n) - yb->k), q);
            }
        }
        return tot;
    };

    Spec prev = value_at_n(1);
    for (int n = 2; n <= cap; ++n) {
        Spec cur = value_at_n(n);
        if (cur == prev) return {point, cur * Spec::q_power_half(prefh, q), true, n};
        prev = cur;
    }
    throw enumeration_cap_error("kuznetsov_orbital: refinements did not settle", cap);
}

// ---- trace pushforward ------------------------------------------------------

namespace {

// mass of {g in SL2(Z_p) : g in the cell, tr g in tau0 + p^k Z_p} counted at
// modulus p^M through h = p^B g with det h = p^{2B} mod p^M; the cell has
// zero b, c centers and no twists.  The p^{2B} weight is the det-fiber
// density matching the group measure, so classes of every primitivity depth
// enter with their exact mass and no depth split is needed.
Rat trace_cell_mass_at(long long p, const Cell& cell, const Rat& tau0, int k, int M) {
    int l = cell.level;
    int B = std::max(0, -l);
    long long pM = pw(p, M);
    long long p2B = pw(p, 2 * B);
    int lvlA = l + B;
    long long stepA = pw(p, lvlA);
    Rat pB = rpow(Rat(p), B);
    long long abase = residue_mod(pB * cell.center[0], stepA, p);
    long long dbase = residue_mod(pB * cell.center[3], stepA, p);
    long long lam2 = k + B;
    long long pk = pw(p, lam2);
    long long T = residue_mod(pB * tau0, pk, p);
    long long L = std::max((long long)lvlA, lam2);
    long long stepD = pw(p, L);
    Int acc = 0;
    for (long long i = 0; i < pM / stepA; ++i) {
        long long ap = (abase + stepA * i) % pM;
        long long t2 = ((T - ap) % pk + pk) % pk;
        long long base;
        if (lvlA >= lam2) {
            if (dbase % pk != t2) continue;
            base = dbase;
        } else {
            if (t2 % stepA != dbase) continue;
            base = t2;
        }
        for (long long j = 0; j < pM / stepD; ++j) {
            long long dp = (base + stepD * j) % pM;
            long long prod = (long long)((__int128)ap * dp % pM);
            long long r = ((prod - p2B) % pM + pM) % pM;
            acc += pair_count_balls(p, M, r, lvlA, lvlA);
        }
    }
    return Rat(acc) * rpow(Rat(p), 2 * (long long)B - 3 * (long long)M);
}

Rat trace_cell_mass(long long p, const Cell& cell, const Rat& tau0, int k, int cap) {
    int B = std::max(0, -cell.level);
    if (tau0 != 0 && val_p(tau0, p) < -B) return Rat(0);
    int M0 = std::max({2 * B + 2, B + k + 1, cell.level + B + 1, 1});
    Rat prev = trace_cell_mass_at(p, cell, tau0, k, M0);
    for (int step = 1; step <= cap; ++step) {
        Rat cur = trace_cell_mass_at(p, cell, tau0, k, M0 + step);
        if (cur == prev) return cur;
        prev = cur;
    }
    throw enumeration_cap_error("trace_pushforward: counting modulus did not settle", cap);
}

} // namespace

OrbitalResult trace_pushforward(const GroupCellFunction& phi, const Rat& tau0, int level,
                                bool allow_unstable, int cap) {
    if (phi.tag != Group::Sl2) throw std::invalid_argument("trace_pushforward: Sl2 only");
    if (level < 1) throw std::invalid_argument("trace_pushforward: level >= 1");
    if (!plain_cells(phi.cells, false))
        throw std::invalid_argument("trace_pushforward: untwisted cells with zero b, c centers required");
    const LocalField& K = phi.field();
    long long p = K.p, q = K.q();
    auto mass_at = [&](int k) -> Spec {
        Spec tot(Rat(0), q);
        for (const auto& [cell, coeff] : phi.cells.terms())
            tot += coeff * Spec(trace_cell_mass(p, cell, tau0, k, cap), q);
        return tot;
    };
    Spec m0 = mass_at(level), m1 = mass_at(level + 1);
    bool flat = (Spec(Rat(p), q) * m1 == m0);
    if (!flat && !allow_unstable) {
        bool sing = ball_has({tau0, level}, Rat(2), p) || ball_has({tau0, level}, Rat(-2), p);
        throw refine_error(sing ? "trace_pushforward: cell straddles trace +-2; refine or allow_unstable"
                                : "trace_pushforward: density not locally constant; refine or allow_unstable",
                           level + 1);
    }
    return {{tau0}, m0, flat, level};
}

// ---- toric pushforward ------------------------------------------------------

namespace {

// per-cell mass without the p^{2r} (1 - 1/p)^{-1} weight; cell centers are
// all zero, beta exponents are the clamped cell level.
Rat toric_cell_mass(long long p, const Cell& cell, long long r, const Rat& xi0, int k) {
    int beta = std::max(cell.level, 0);
    bool zero_case = (xi0 == 0) || (val_p(xi0, p) >= k);
    if (zero_case) {
        int J = (int)(k + r);
        Rat ADd = Rat(pair_count_balls(p, J, 0, beta, beta)) * rpow(Rat(p), -2 * (long long)J);
        Rat BCd = Rat(pair_count_balls(p, (int)r, 0, beta, beta)) * rpow(Rat(p), -2 * r) -
                  Rat(pair_count_balls(p, (int)r + 1, 0, beta, beta)) * rpow(Rat(p), -2 * (r + 1));
        return ADd * BCd;
    }
    long long mu = val_p(xi0, p);
    long long nu = mu + r;
    if (nu < 0) return Rat(0);
    long long lu = k - mu + r;
    Rat ucoef = Rat(1) - Rat(1) / xi0;
    long long lm = nu + 1;
    if (ucoef != 0) lm = std::max(lm, lu - std::min(val_p(ucoef, p), lu));
    long long plm = pw(p, lm), plu = pw(p, lu);
    long long pnu = pw(p, nu), pnu1 = pnu * p;
    Rat acc(0);
    for (long long m = pnu; m < plm; m += pnu) {
        if (m % pnu1 == 0) continue;
        long long cntAD = pair_count_balls(p, (int)lm, m, beta, beta);
        if (!cntAD) continue;
        long long u0r = residue_mod(Rat(m) * ucoef, plu, p);
        long long cntBC = pair_count_balls(p, (int)lu, u0r, beta, beta);
        if (!cntBC) continue;
        acc += Rat(Int(cntAD) * cntBC) * rpow(Rat(p), -2 * (lm + lu));
    }
    return acc;
}

} // namespace

OrbitalResult toric_orbital(const GroupCellFunction& phi, const Rat& xi0, int level,
                            bool allow_unstable, int cap) {
    (void)cap;
    if (phi.tag != Group::Pgl2) throw std::invalid_argument("toric_orbital: Pgl2 only");
    if (!phi.det_val) throw std::invalid_argument("toric_orbital: det stratum required");
    if (level < 1) throw std::invalid_argument("toric_orbital: level >= 1");
    if (!plain_cells(phi.cells, true))
        throw std::invalid_argument("toric_orbital: untwisted zero-centered cells required");
    const LocalField& K = phi.field();
    long long p = K.p, q = K.q();
    long long r = *phi.det_val;
    if (r < 0) return {{xi0}, Spec(Rat(0), q), true, level};
    if (r > 1) throw std::invalid_argument("toric_orbital: det stratum depth > 1 unsupported");
    Spec weight = Spec(rpow(Rat(p), 2 * r) / (Rat(1) - rat(1, p)), q);
    auto mass_at = [&](int k) -> Spec {
        Spec tot(Rat(0), q);
        for (const auto& [cell, coeff] : phi.cells.terms())
            tot += coeff * Spec(toric_cell_mass(p, cell, r, xi0, k), q);
        return tot * weight;
    };
    Spec m0 = mass_at(level), m1 = mass_at(level + 1);
    bool flat = (Spec(Rat(p), q) * m1 == m0);
    if (!flat && !allow_unstable) {
        bool sing = ball_has({xi0, level}, Rat(0), p) || ball_has({xi0, level}, Rat(1), p);
        throw refine_error(sing ? "toric_orbital: cell straddles xi in {0, 1}; refine or allow_unstable"
                                : "toric_orbital: density not locally constant; refine or allow_unstable",
                           level + 1);
    }
    return {{xi0}, m0, flat, level};
}

// ---- twisted monoid pushforward ----------------------------------------------

OrbitalResult mat2_twisted_pushforward(const CellFunction& phi, const Rat& b1, const Rat& b2,
                                       std::pair<int, int> signs, ShellKind kind, int cap) {
    if (phi.rank() != 4) throw std::invalid_argument("mat2_twisted_pushforward: rank-4 cells required");
    GroupCellFunction g{Group::Mat2, phi, std::nullopt};
    return kuznetsov_orbital(g, {b1, b2}, signs, kind, cap);
}

// ---- Cartan descent -----------------------------------------------------------

namespace {

using M4 = std::array<Rat, 4>;

M4 mmul(const M4& A, const M4& B) {
    return {A[0] * B[0] + A[1] * B[2], A[0] * B[1] + A[1] * B[3],
            A[2] * B[0] + A[3] * B[2], A[2] * B[1] + A[3] * B[3]};
}

} // namespace

OrbitalResult cartan_descent(const GroupCellFunction& phi, const std::vector<Rat>& t, int cap) {
    if (phi.tag != Group::Sl2 && phi.tag != Group::Gl2)
        throw std::invalid_argument("cartan_descent: Sl2 or Gl2 only");
    const LocalField& K = phi.field();
    long long p = K.p, q = K.q();
    Rat t1, t2;
    long long prefh;
    if (phi.tag == Group::Sl2) {
        if (t.size() != 1 || t[0] == 0) throw std::invalid_argument("cartan_descent: t = {a}, a nonzero");
        t1 = t[0];
        t2 = Rat(1) / t[0];
        prefh = -2 * val_p(t1, p);
    } else {
        if (t.size() != 2 || t[0] == 0 || t[1] == 0)
            throw std::invalid_argument("cartan_descent: t = {t1, t2}, nonzero");
        t1 = t[0];
        t2 = t[1];
        prefh = val_p(t2, p) - val_p(t1, p);
    }
    M4 T{t1, Rat(0), Rat(0), t2};
    M4 TE{Rat(0), t1, Rat(0), Rat(0)};
    M4 W{Rat(0), Rat(-1), Rat(1), Rat(0)};
    M4 Winv{Rat(0), Rat(1), Rat(-1), Rat(0)};
    AddChar psi{K, +1};
    int sigma = phi.cells.psi_sign();

    auto inner = [&](const M4& g, const M4& gi) -> Spec {
        M4 A = mmul(gi, mmul(T, g));
        M4 Bm = mmul(gi, mmul(TE, g));
        Spec tot(Rat(0), q);
        for (const auto& [cell, coeff] : phi.cells.terms()) {
            std::optional<Ball> xb;
            bool dead = false;
            Rat mu(0), cst(0);
            for (int i = 0; i < 4 && !dead; ++i) {
                if (Bm[i] == 0) {
                    if (!ball_has({cell.center[i], cell.level}, A[i], p)) dead = true;
                } else {
                    Ball bi{(cell.center[i] - A[i]) / Bm[i], cell.level - val_p(Bm[i], p)};
                    xb = xb ? ball_meet(*xb, bi, p) : std::optional<Ball>(bi);
                    if (!xb) dead = true;
                }
                mu += tw(cell, i) * Bm[i];
                cst += tw(cell, i) * A[i];
            }
            if (dead || !xb) continue;
            mu *= sigma;
            cst *= sigma;
            if (mu != 0 && val_p(mu, p) < -xb->k) continue;
            tot += coeff * Spec(psi(mu * xb->c + cst), q) * Spec(rpow(Rat(p), -xb->k), q);
        }
        return tot;
    };

    auto value_at = [&](int n) -> Spec {
        Spec tot(Rat(0), q);
        for (long long c = 0; c < pw(p, n); ++c) {
            M4 g{Rat(1), Rat(0), Rat(c), Rat(1)};
            M4 gi{Rat(1), Rat(0), Rat(-c), Rat(1)};
            tot += inner(g, gi);
        }
        for (long long j = 0; j < pw(p, n - 1); ++j) {
            Rat c(p * j);
            M4 nb{Rat(1), Rat(0), c, Rat(1)};
            M4 nbi{Rat(1), Rat(0), -c, Rat(1)};
            tot += inner(mmul(nb, W), mmul(Winv, nbi));
        }
        return tot * Spec(rpow(Rat(p), -n), q);
    };

    Spec prev = value_at(1);
    for (int n = 2; n <= cap; ++n) {
        Spec cur = value_at(n);
        if (cur == prev) return {t, cur * Spec::q_power_half(prefh, q), true, n};
        prev = cur;
    }
    throw refine_error("cartan_descent: coset refinement did not settle; refine the cells", cap + 1);
}

} // namespace hankel
