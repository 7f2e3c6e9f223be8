// Finite-ring scans, closed pair counts, Kuznetsov enumeration, conjugation
// and toric pushforward masses, and Cartan descent.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hankel/orbital.hpp"

#include <stdexcept>
#include <vector>

using namespace hankel;

static const LocalField K2 = LocalField::base(2);
static const LocalField K3 = LocalField::base(3);
static const LocalField K5 = LocalField::base(5);

namespace {

long long ppow(long long p, int e) {
    long long r = 1;
    for (int i = 0; i < e; ++i) r *= p;
    return r;
}

Spec sc(const LocalField& K, const Rat& r) { return Spec(r, K.q()); }
Spec sc(const LocalField& K, long long n) { return Spec(Rat(n), K.q()); }

Spec psi_spec(const LocalField& K, const Rat& x) { return Spec(AddChar{K, +1}(x), K.q()); }

std::array<Rat, 4> orbit_matrix(Group g, const std::vector<Rat>& pt, const Rat& x, const Rat& y) {
    if (g == Group::Sl2) {
        Rat z = pt[0];
        return {x * z, x * y * z - Rat(1) / z, z, y * z};
    }
    if (g == Group::Pgl2) {
        Rat xi = pt[0];
        return {x * xi, Rat(1) + x * y * xi, xi, y * xi};
    }
    return {x * pt[0], pt[1] + x * y * pt[0], pt[0], y * pt[0]};
}

// independent slow path: grid the two unipotent coordinates and evaluate
// through value_at; dep bounds the pole depth, N the class level
Spec dumb_kuznetsov(const GroupCellFunction& phi, const std::vector<Rat>& pt,
                    std::pair<int, int> signs, int dep, int N) {
    const LocalField& K = phi.field();
    long long p = K.p;
    AddChar psi{K, +1};
    Spec tot(Rat(0), K.q());
    long long n = ppow(p, dep + N);
    Rat den = rpow(Rat(p), dep);
    for (long long i = 0; i < n; ++i)
        for (long long j = 0; j < n; ++j) {
            Rat x = Rat(i) / den, y = Rat(j) / den;
            Spec v = phi.value_at(orbit_matrix(phi.tag, pt, x, y));
            if (v.is_zero()) continue;
            tot += v * Spec(psi(signs.first * x + signs.second * y), K.q());
        }
    return tot * Spec(rpow(Rat(p), -2 * N), K.q());
}

long long md(long long x, long long m) { return (x % m + m) % m; }

} // namespace

TEST_CASE("ring scans: special linear counts and weighted unit sums") {
    auto cnt = [](long long p, int N) {
        long long pN = ppow(p, N);
        ScanJob job{p, N, 4};
        return scan_ring(job, [&](const std::vector<long long>& x) {
            return md(x[0] * x[3] - x[1] * x[2], pN) == 1;
        }).solutions;
    };
    CHECK(cnt(3, 2) == 648);
    CHECK(cnt(3, 2) == sl2_class_count(3, 2));
    for (long long p : {2LL, 3LL, 5LL}) {
        CHECK(cnt(p, 1) == (p - 1) * p * (p + 1));
        CHECK(cnt(p, 1) == sl2_class_count(p, 1));
    }

    ScanJob units{3, 1, 1};
    ScanReport rep = scan_ring(
        units, [](const std::vector<long long>& x) { return x[0] % 3 != 0; },
        [](const std::vector<long long>& x) { return x[0]; });
    CHECK(rep.solutions == 2);
    CHECK(rep.weighted == Cyclo(Rat(-1)));

    ScanReport none = scan_ring(units, [](const std::vector<long long>&) { return false; });
    CHECK(none.solutions == 0);
    CHECK(none.weighted == Cyclo(Rat(0)));

    ScanJob big{3, 7, 3};
    CHECK_THROWS_AS(scan_ring(big, [](const std::vector<long long>&) { return true; }),
                    enumeration_cap_error);
}

TEST_CASE("pair counts match exhaustive scans") {
    for (long long p : {2LL, 3LL, 5LL}) {
        CHECK(pair_count_mod(p, 0, 0) == 1);
        for (int L = 1; L <= 3; ++L) {
            long long pL = ppow(p, L);
            for (long long r = 0; r < pL; ++r) {
                ScanJob job{p, L, 2};
                long long brute = scan_ring(job, [&](const std::vector<long long>& x) {
                                      return md(x[0] * x[1] - r, pL) == 0;
                                  }).solutions;
                CHECK(pair_count_mod(p, L, r) == brute);
            }
        }
    }
    for (int L = 1; L <= 3; ++L) {
        long long pL = ppow(3, L);
        for (int bb = 0; bb <= 2; ++bb)
            for (int bc = 0; bc <= 2; ++bc)
                for (long long r = 0; r < pL; ++r) {
                    ScanJob job{3, L, 2};
                    long long brute =
                        scan_ring(job, [&](const std::vector<long long>& x) {
                            return x[0] % ppow(3, bb) == 0 && x[1] % ppow(3, bc) == 0 &&
                                   md(x[0] * x[1] - r, pL) == 0;
                        }).solutions;
                    CHECK(pair_count_balls(3, L, r, bb, bc) == brute);
                }
    }
}

TEST_CASE("kloosterman sums match scans") {
    Cyclo k1 = kloosterman_sum(K3, rat(1, 3), rat(1, 3), 1, {-1, -1});
    CHECK(k1 == Cyclo(Rat(-1)));
    ScanJob job{3, 1, 2};
    ScanReport rep = scan_ring(
        job, [](const std::vector<long long>& x) { return md(x[0] * x[1], 3) == 1; },
        [](const std::vector<long long>& x) { return -(x[0] + x[1]); });
    CHECK(rep.weighted == k1);

    Cyclo k2 = kloosterman_sum(K3, rat(1, 9), rat(1, 9), 2, {-1, -1});
    ScanJob job2{3, 2, 2};
    ScanReport rep2 = scan_ring(
        job2, [](const std::vector<long long>& x) { return md(x[0] * x[1], 9) == 1; },
        [](const std::vector<long long>& x) { return -(x[0] + x[1]); });
    CHECK(rep2.weighted == k2);

    CHECK(kloosterman_sum(K3, rat(1, 3), rat(-1, 3), 1, {-1, -1}) == Cyclo(Rat(2)));
}

TEST_CASE("kuznetsov unit shells evaluate to 1") {
    for (const LocalField* Kp : {&K2, &K3, &K5}) {
        const LocalField& K = *Kp;
        auto one = sc(K, 1);
        OrbitalResult r = kuznetsov_orbital(GroupCellFunction::unit_group(Group::Sl2, K), {Rat(1)},
                                            {-1, -1});
        CHECK(r.value == one);
        CHECK(r.stabilized);
        CHECK(r.level <= 5);
        CHECK(kuznetsov_orbital(GroupCellFunction::unit_group(Group::Pgl2, K), {Rat(1)}, {-1, -1})
                  .value == one);
        CHECK(kuznetsov_orbital(GroupCellFunction::unit_group(Group::Gl2, K), {Rat(1), Rat(1)},
                                {-1, -1})
                  .value == one);
        CHECK(kuznetsov_orbital(GroupCellFunction::unit_group(Group::Mat2, K), {Rat(1), Rat(1)},
                                {1, 1})
                  .value == one);
    }
    CHECK(kuznetsov_orbital(GroupCellFunction::unit_group(Group::Sl2, K5), {Rat(2)}, {-1, -1})
              .value == sc(K5, 1));
}

TEST_CASE("kuznetsov kloosterman shells") {
    GroupCellFunction u3 = GroupCellFunction::unit_group(Group::Sl2, K3);

    OrbitalResult r = kuznetsov_orbital(u3, {Rat(3)}, {-1, -1});
    CHECK(r.value == sc(K3, rat(-1, 3)));
    CHECK(r.value == Spec::q_power_half(-2, 3) *
                         Spec(kloosterman_sum(K3, rat(1, 3), rat(1, 3), 1, {-1, -1}), 3));
    ScanJob job{3, 1, 2};
    ScanReport rep = scan_ring(
        job, [](const std::vector<long long>& x) { return md(x[0] * x[1], 3) == 1; },
        [](const std::vector<long long>& x) { return -(x[0] + x[1]); });
    CHECK(r.value == sc(K3, rat(1, 3)) * Spec(rep.weighted, 3));

    // raw integral on the depth-2 shell equals the level-2 sum
    OrbitalResult r9 = kuznetsov_orbital(u3, {Rat(9)}, {-1, -1}, ShellKind::Function);
    CHECK(r9.value == Spec(kloosterman_sum(K3, rat(1, 9), rat(1, 9), 2, {-1, -1}), 3));
    CHECK(kuznetsov_orbital(u3, {Rat(9)}, {-1, -1}).value ==
          Spec::q_power_half(-4, 3) * r9.value);

    // unit part enters through the inverse square
    OrbitalResult r6 = kuznetsov_orbital(u3, {Rat(6)}, {-1, -1}, ShellKind::Function);
    CHECK(r6.value == Spec(kloosterman_sum(K3, rat(1, 3), rat(1, 12), 1, {-1, -1}), 3));

    CHECK(kuznetsov_orbital(u3, {rat(1, 3)}, {-1, -1}).value == sc(K3, 0));

    CHECK(dumb_kuznetsov(u3, {Rat(3)}, {-1, -1}, 1, 2) ==
          kuznetsov_orbital(u3, {Rat(3)}, {-1, -1}, ShellKind::Function).value);

    GroupCellFunction tr = u3.unipotent_translate(rat(1, 3), Rat(0));
    CHECK(dumb_kuznetsov(tr, {Rat(3)}, {-1, -1}, 1, 3) ==
          kuznetsov_orbital(tr, {Rat(3)}, {-1, -1}, ShellKind::Function).value);
}

TEST_CASE("pgl2 kuznetsov strata") {
    GroupCellFunction kbar = GroupCellFunction::unit_group(Group::Pgl2, K3);
    GroupCellFunction h1 = GroupCellFunction::hecke_orbit(Group::Pgl2, K3, 1);

    // odd depth against the unit stratum vanishes
    CHECK(kuznetsov_orbital(kbar, {Rat(3)}, {-1, -1}).value == sc(K3, 0));
    CHECK(kuznetsov_orbital(h1, {Rat(1)}, {-1, -1}).value == sc(K3, 0));

    OrbitalResult r9 = kuznetsov_orbital(kbar, {Rat(9)}, {-1, -1});
    CHECK(r9.value == Spec::q_power_half(-2, 3) *
                          Spec(kloosterman_sum(K3, rat(1, 3), rat(-1, 3), 1, {-1, -1}), 3));
    CHECK(r9.value == sc(K3, rat(2, 3)));

    // depth-1 stratum against the orbit of depth 1
    OrbitalResult r3 = kuznetsov_orbital(h1, {Rat(3)}, {-1, -1}, ShellKind::Function);
    CHECK(r3.value == dumb_kuznetsov(h1, {Rat(3)}, {-1, -1}, 1, 3));

    CHECK(kuznetsov_orbital(kbar, {rat(1, 9)}, {-1, -1}).value == sc(K3, 0));
}

TEST_CASE("matrix monoid pushforward") {
    CellFunction m3(K3, 4, +1);
    m3.add_indicator(sc(K3, 1), {Rat(0), Rat(0), Rat(0), Rat(0)}, 0);
    CellFunction m5(K5, 4, +1);
    m5.add_indicator(sc(K5, 1), {Rat(0), Rat(0), Rat(0), Rat(0)}, 0);

    CHECK(mat2_twisted_pushforward(m3, Rat(3), Rat(1)).value ==
          Spec::q_power_half(-3, 3) * sc(K3, -1));
    CHECK(mat2_twisted_pushforward(m5, Rat(5), Rat(1)).value ==
          Spec::q_power_half(-3, 5) * sc(K5, -1));
    CHECK(mat2_twisted_pushforward(m3, Rat(1), Rat(3)).value == Spec::q_power_half(-1, 3));
    CHECK(mat2_twisted_pushforward(m3, rat(1, 3), Rat(1)).value == sc(K3, 0));

    // unit torus values agree with the invertible group
    CHECK(mat2_twisted_pushforward(m3, Rat(1), Rat(1)).value ==
          kuznetsov_orbital(GroupCellFunction::unit_group(Group::Gl2, K3), {Rat(1), Rat(1)},
                            {-1, -1})
              .value);

    // the depth-1 determinant slice is the depth-1 orbit value
    GroupCellFunction h1 = GroupCellFunction::hecke_orbit(Group::Gl2, K3, 1);
    CHECK(kuznetsov_orbital(h1, {Rat(3), Rat(1)}, {-1, -1}).value ==
          mat2_twisted_pushforward(m3, Rat(3), Rat(1)).value);

    GroupCellFunction gm{Group::Mat2, m3, std::nullopt};
    CHECK(dumb_kuznetsov(gm, {Rat(3), Rat(1)}, {-1, -1}, 1, 2) ==
          kuznetsov_orbital(gm, {Rat(3), Rat(1)}, {-1, -1}, ShellKind::Function).value);
}

TEST_CASE("translation equivariance and bilinearity") {
    GroupCellFunction u3 = GroupCellFunction::unit_group(Group::Sl2, K3);
    for (auto signs : std::vector<std::pair<int, int>>{{-1, -1}, {1, -1}}) {
        for (Rat zeta : {Rat(3), Rat(1)}) {
            GroupCellFunction tr = u3.unipotent_translate(rat(1, 3), Rat(0));
            Spec lhs = kuznetsov_orbital(tr, {zeta}, signs).value;
            Spec rhs = psi_spec(K3, rat(-signs.first, 3)) *
                       kuznetsov_orbital(u3, {zeta}, signs).value;
            CHECK(lhs == rhs);
        }
    }
    GroupCellFunction u2 = GroupCellFunction::unit_group(Group::Sl2, K2);
    GroupCellFunction tr2 = u2.unipotent_translate(rat(1, 2), rat(1, 4));
    CHECK(kuznetsov_orbital(tr2, {Rat(2)}, {-1, -1}).value ==
          psi_spec(K2, rat(3, 4)) * kuznetsov_orbital(u2, {Rat(2)}, {-1, -1}).value);

    GroupCellFunction ks = GroupCellFunction::hecke_orbit(Group::Sl2, K3, 1);
    GroupCellFunction mix = u3.scaled(sc(K3, 2)) + ks.scaled(sc(K3, rat(-1, 2)));
    Spec direct = kuznetsov_orbital(mix, {Rat(3)}, {-1, -1}).value;
    Spec split = sc(K3, 2) * kuznetsov_orbital(u3, {Rat(3)}, {-1, -1}).value +
                 sc(K3, rat(-1, 2)) * kuznetsov_orbital(ks, {Rat(3)}, {-1, -1}).value;
    CHECK(direct == split);
}

TEST_CASE("group evaluation respects strata and scaling") {
    GroupCellFunction kbar = GroupCellFunction::unit_group(Group::Pgl2, K3);
    CHECK(kbar.value_at({Rat(1), Rat(0), Rat(0), Rat(1)}) == sc(K3, 1));
    CHECK(kbar.value_at({Rat(3), Rat(0), Rat(0), Rat(3)}) == sc(K3, 1));
    CHECK(kbar.value_at({Rat(3), Rat(0), Rat(0), Rat(1)}) == sc(K3, 0));

    GroupCellFunction h1 = GroupCellFunction::hecke_orbit(Group::Pgl2, K3, 1);
    CHECK(h1.value_at({Rat(3), Rat(0), Rat(0), Rat(1)}) == sc(K3, 1));
    CHECK(h1.value_at({Rat(9), Rat(0), Rat(0), Rat(3)}) == sc(K3, 1));
    CHECK(h1.value_at({Rat(1), Rat(0), Rat(0), Rat(1)}) == sc(K3, 0));

    GroupCellFunction sl = GroupCellFunction::unit_group(Group::Sl2, K3);
    CHECK_THROWS_AS(sl.value_at({Rat(2), Rat(0), Rat(0), Rat(1)}), std::invalid_argument);
    CHECK_THROWS_AS(kbar.value_at({Rat(0), Rat(0), Rat(0), Rat(0)}), std::invalid_argument);

    GroupCellFunction m0 = GroupCellFunction::hecke_orbit(Group::Mat2, K3, 0);
    CHECK(m0.value_at({Rat(1), Rat(0), Rat(0), Rat(0)}) == sc(K3, 0));
    GroupCellFunction mu = GroupCellFunction::unit_group(Group::Mat2, K3);
    CHECK(mu.value_at({Rat(1), Rat(0), Rat(0), Rat(0)}) == sc(K3, 1));
}

TEST_CASE("trace masses against scans") {
    GroupCellFunction u3 = GroupCellFunction::unit_group(Group::Sl2, K3);

    auto scan_mass = [](long long p, int M, int k) {
        long long pM = ppow(p, M), pk = ppow(p, k);
        ScanJob job{p, M, 4};
        long long c = scan_ring(job, [&](const std::vector<long long>& x) {
                          return md(x[0] * x[3] - x[1] * x[2], pM) == 1 &&
                                 md(x[0] + x[3], pk) == 0;
                      }).solutions;
        return Rat(c) / rpow(Rat(p), 3 * M);
    };
    Rat m2 = scan_mass(3, 2, 1), m3 = scan_mass(3, 3, 1);
    CHECK(m2 == m3);
    OrbitalResult t0 = trace_pushforward(u3, Rat(0), 1);
    CHECK(t0.value == sc(K3, m2));
    CHECK(t0.stabilized);

    GroupCellFunction u5 = GroupCellFunction::unit_group(Group::Sl2, K5);
    CHECK(trace_pushforward(u5, Rat(0), 1).value == sc(K5, scan_mass(5, 2, 1)));

    CHECK(trace_pushforward(u3, rat(1, 3), 1).value == sc(K3, 0));
    CHECK(trace_pushforward(u3, rat(1, 3), 1).stabilized);
}

TEST_CASE("trace masses: refusal near the singular traces and additivity") {
    GroupCellFunction u3 = GroupCellFunction::unit_group(Group::Sl2, K3);
    CHECK_THROWS_AS(trace_pushforward(u3, Rat(2), 1), refine_error);
    CHECK_THROWS_AS(trace_pushforward(u3, Rat(1), 1), refine_error);
    try {
        trace_pushforward(u3, Rat(2), 1);
    } catch (const refine_error& e) {
        CHECK(e.suggested_level == 2);
    }

    OrbitalResult whole = trace_pushforward(u3, Rat(2), 1, true);
    CHECK_FALSE(whole.stabilized);
    Spec parts(Rat(0), 3);
    for (long long j = 0; j < 3; ++j)
        parts += trace_pushforward(u3, Rat(2 + 3 * j), 2, true).value;
    CHECK(whole.value == parts);

    // a level-3 cell near the singular trace but not containing it is flat
    OrbitalResult near = trace_pushforward(u3, Rat(11), 3);
    CHECK(near.stabilized);

    for (const LocalField* Kp : {&K3, &K5}) {
        const LocalField& K = *Kp;
        long long p = K.p;
        GroupCellFunction u = GroupCellFunction::unit_group(Group::Sl2, K);
        Spec total(Rat(0), K.q());
        for (long long j = 0; j < p; ++j)
            total += trace_pushforward(u, Rat(j), 1, true).value;
        CHECK(total == sc(K, Rat(1) - rat(1, p * p)));
    }
}

TEST_CASE("trace masses of the depth-1 orbit") {
    for (const LocalField* Kp : {&K3, &K5}) {
        const LocalField& K = *Kp;
        long long p = K.p;
        GroupCellFunction ks = GroupCellFunction::hecke_orbit(Group::Sl2, K, 1);
        Spec total(Rat(0), K.q());
        for (long long j = 0; j < p * p; ++j)
            total += trace_pushforward(ks, Rat(j) / p, 1, true).value;
        CHECK(total == sc(K, Rat(p * p + p) * (Rat(1) - rat(1, p * p))));
    }
    GroupCellFunction ks3 = GroupCellFunction::hecke_orbit(Group::Sl2, K3, 1);
    OrbitalResult deep = trace_pushforward(ks3, rat(1, 3), 1);
    CHECK(deep.stabilized);

    // scan of the rescaled coset: primitive h with det p^2, tr h = p tau0
    ScanJob job{3, 3, 4};
    long long c = scan_ring(job, [](const std::vector<long long>& x) {
                      if (x[0] % 3 == 0 && x[1] % 3 == 0 && x[2] % 3 == 0 && x[3] % 3 == 0)
                          return false;
                      return md(x[0] * x[3] - x[1] * x[2], 27) == 9 &&
                             md(x[0] + x[3], 9) == 1;
                  }).solutions;
    CHECK(trace_pushforward(ks3, rat(1, 3), 1, true).value ==
          sc(K3, Rat(9 * c) / rpow(Rat(3), 9)));

    GroupCellFunction sheared = ks3.unipotent_translate(rat(1, 3), Rat(0));
    CHECK_THROWS_AS(trace_pushforward(sheared, Rat(0), 1), std::invalid_argument);

    // depth-2 orbit volume through the same cells
    GroupCellFunction ks2 = GroupCellFunction::hecke_orbit(Group::Sl2, K3, 2);
    Spec t2(Rat(0), 3);
    for (long long j = 0; j < 27; ++j)
        t2 += trace_pushforward(ks2, Rat(j) / 9, 1, true).value;
    CHECK(t2 == sc(K3, Rat(27 * 4) * (Rat(1) - rat(1, 9))));
}

TEST_CASE("toric masses against scans") {
    GroupCellFunction kbar = GroupCellFunction::unit_group(Group::Pgl2, K3);

    OrbitalResult reg = toric_orbital(kbar, Rat(2), 1);
    CHECK(reg.value == sc(K3, rat(4, 27)));
    CHECK(reg.stabilized);
    CHECK_THROWS_AS(toric_orbital(kbar, Rat(0), 1), refine_error);
    CHECK_THROWS_AS(toric_orbital(kbar, Rat(1), 1), refine_error);
    CHECK(toric_orbital(kbar, Rat(1), 1, true).value == sc(K3, rat(10, 27)));
    CHECK(toric_orbital(kbar, Rat(0), 1, true).value == sc(K3, rat(10, 27)));

    // scans over unit-determinant classes, xi = ad / det
    auto scan_kbar = [](int M, long long j) {
        long long pM = ppow(3, M);
        ScanJob job{3, M, 4};
        long long c = scan_ring(job, [&](const std::vector<long long>& x) {
                          long long det = md(x[0] * x[3] - x[1] * x[2], pM);
                          if (det % 3 == 0) return false;
                          return md(x[0] * x[3] - j * det, 3) == 0;
                      }).solutions;
        return Rat(c) / (Rat(pM - pM / 3) * rpow(Rat(3), 3 * M));
    };
    for (long long j = 0; j < 3; ++j) {
        Rat v2 = scan_kbar(2, j), v3 = scan_kbar(3, j);
        CHECK(v2 == v3);
        CHECK(toric_orbital(kbar, Rat(j), 1, true).value == sc(K3, v2));
    }

    Spec parts(Rat(0), 3);
    for (long long j = 0; j < 3; ++j)
        parts += toric_orbital(kbar, Rat(2 + 3 * j), 2).value;
    CHECK(toric_orbital(kbar, Rat(2), 1).value == parts);

    CHECK(toric_orbital(kbar, rat(1, 3), 1).value == sc(K3, 0));

    for (const LocalField* Kp : {&K3, &K5}) {
        const LocalField& K = *Kp;
        long long p = K.p;
        GroupCellFunction kb = GroupCellFunction::unit_group(Group::Pgl2, K);
        Spec total(Rat(0), K.q());
        for (long long j = 0; j < p; ++j)
            total += toric_orbital(kb, Rat(j), 1, true).value;
        CHECK(total == sc(K, Rat(1) - rat(1, p * p)));
    }
}

TEST_CASE("toric masses of the depth-1 orbit") {
    for (const LocalField* Kp : {&K3, &K5}) {
        const LocalField& K = *Kp;
        long long p = K.p;
        GroupCellFunction h1 = GroupCellFunction::hecke_orbit(Group::Pgl2, K, 1);
        Spec total(Rat(0), K.q());
        for (long long j = 0; j < p * p; ++j)
            total += toric_orbital(h1, Rat(j) / p, 1, true).value;
        CHECK(total == sc(K, Rat(p + 1) * (Rat(1) - rat(1, p * p))));
    }

    // scan of the depth-1 stratum on a negative shell
    GroupCellFunction h13 = GroupCellFunction::hecke_orbit(Group::Pgl2, K3, 1);
    OrbitalResult neg = toric_orbital(h13, rat(1, 3), 1);
    CHECK(neg.stabilized);
    ScanJob job{3, 3, 4};
    long long c = scan_ring(job, [&](const std::vector<long long>& x) {
                      long long det = md(x[0] * x[3] - x[1] * x[2], 27);
                      if (det % 3 != 0 || (det / 3) % 3 == 0) return false;
                      if (x[0] % 3 == 0 && x[1] % 3 == 0 && x[2] % 3 == 0 && x[3] % 3 == 0)
                          return false;
                      return md(x[0] * x[3] - det / 3, 9) == 0;
                  }).solutions;
    Rat mass = Rat(9 * c) / (Rat(ppow(3, 3) - ppow(3, 2)) * rpow(Rat(3), 9));
    CHECK(neg.value == sc(K3, mass));
}

TEST_CASE("cartan descent values") {
    GroupCellFunction u3 = GroupCellFunction::unit_group(Group::Sl2, K3);
    OrbitalResult reg = cartan_descent(u3, {Rat(2)});
    CHECK(reg.value == sc(K3, rat(4, 3)));
    CHECK(reg.stabilized);
    CHECK(reg.level <= 5);
    GroupCellFunction u5 = GroupCellFunction::unit_group(Group::Sl2, K5);
    CHECK(cartan_descent(u5, {Rat(2)}).value == sc(K5, rat(6, 5)));

    CHECK(cartan_descent(u3, {Rat(3)}).value == sc(K3, 0));

    GroupCellFunction ks = GroupCellFunction::hecke_orbit(Group::Sl2, K3, 1);
    CHECK(cartan_descent(ks, {Rat(3)}).value == sc(K3, 4));
    CHECK(cartan_descent(ks, {rat(1, 3)}).value == sc(K3, 4));

    GroupCellFunction g1 = GroupCellFunction::hecke_orbit(Group::Gl2, K3, 1);
    Spec a = cartan_descent(g1, {Rat(3), Rat(1)}).value;
    Spec b = cartan_descent(g1, {Rat(1), Rat(3)}).value;
    CHECK(a == Spec::q_power_half(-1, 3) * sc(K3, 4));
    CHECK(b == Spec::q_power_half(1, 3) * sc(K3, rat(4, 3)));
    CHECK(a == b);

    // an off-pattern eigenvalue profile meets no conjugate
    CellFunction deep(K3, 4, +1);
    deep.add_indicator(sc(K3, 1), {Rat(3), Rat(0), Rat(0), rat(1, 3)}, 2);
    GroupCellFunction dg{Group::Sl2, deep, std::nullopt};
    CHECK(cartan_descent(dg, {Rat(2)}).value == sc(K3, 0));
}
