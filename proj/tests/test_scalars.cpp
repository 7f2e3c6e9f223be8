// Exact scalar tower: cyclotomic arithmetic, Laurent ratios, h = sqrt(q).
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hankel/spectral.hpp"

#include <random>

using namespace hankel;

static Cyclo w(unsigned n, long long k = 1) { return Cyclo::root_of_unity(n, k); }

TEST_CASE("roots of unity fold and reduce") {
    CHECK(w(3, 1) + w(3, 2) == Cyclo(-1));
    CHECK(w(4, 1).pow(2) == Cyclo(-1));
    CHECK(w(8, 1) * w(8, 1) == w(4, 1));
    CHECK(w(8, 2).order() == 4);
    CHECK(w(6, 1) == -w(3, 2));
    CHECK(w(6, 1).order() == 3);
    CHECK(w(2, 1) == Cyclo(-1));
    CHECK(w(9, 1).pow(3) == w(3, 1));
    CHECK(w(5, 2).pow(5) == Cyclo(1));
    Cyclo all7(0);
    for (int k = 0; k < 7; ++k) all7 += w(7, k);
    CHECK(all7.is_zero());
}

TEST_CASE("field operations") {
    Cyclo a = Cyclo(1) + w(3, 1);
    CHECK(a.inverse() * a == Cyclo(1));
    CHECK(a.inverse() == -w(3, 1)); // 1 + w3 = -w3^2
    CHECK(Cyclo(Rat(2, 3)) * Cyclo(Rat(3, 2)) == Cyclo(1));
    CHECK(w(5, 1).conjugate() == w(5, 4));
    CHECK((w(12, 1) + Cyclo(2)).galois(5).galois(5) == w(12, 1) + Cyclo(2));
}

TEST_CASE("galois action is multiplicative") {
    std::mt19937_64 rng(20240817);
    auto rnd = [&]() {
        Cyclo x(0);
        for (int i = 0; i < 3; ++i)
            x += Cyclo(Rat((long long)(rng() % 7) - 3)) * w(12, (long long)(rng() % 12));
        return x;
    };
    for (int it = 0; it < 12; ++it) {
        Cyclo x = rnd(), y = rnd();
        for (unsigned k : {5u, 7u, 11u}) {
            CHECK((x * y).galois(k) == x.galois(k) * y.galois(k));
            CHECK((x + y).galois(k) == x.galois(k) + y.galois(k));
        }
    }
}

TEST_CASE("quadratic gauss sum mod 5") {
    // g = sum over units of legendre(a)*zeta5^a; g^2 = 5 and g*conj(g) = 5.
    Cyclo g = w(5, 1) - w(5, 2) - w(5, 3) + w(5, 4);
    CHECK(g * g == Cyclo(5));
    CHECK(g * g.conjugate() == Cyclo(5));
    CHECK_FALSE(g.is_rational());
    CHECK((g * g).minimized().order() == 1);
}

TEST_CASE("order minimization descends the tower") {
    Cyclo z4_in_8 = w(8, 1) * w(8, 1);
    CHECK(z4_in_8.minimized().order() == 4);
    Cyclo sqrt2 = w(8, 1) + w(8, 7);
    CHECK(sqrt2.minimized().order() == 8);
    CHECK(sqrt2 * sqrt2 == Cyclo(2));
    Cyclo z3_in_12 = w(12, 4);
    CHECK(z3_in_12.minimized().order() == 3);
}

static Spec sv(Var v, long long q = 3) { return Spec::variable(v, q); }

TEST_CASE("ratio equality is cross multiplication") {
    Spec t = sv(VT);
    Spec lhs = Spec::from_ratio(
        (Poly(Cyclo(1)) - Poly::monomial(Cyclo(1), exps_of(VT, 2))),
        (Poly(Cyclo(1)) - Poly::monomial(Cyclo(1), exps_of(VT, 1))), 3);
    CHECK(lhs == Spec(1, 3) + t);
    Spec n = lhs.normalized();
    CHECK(n.den() == Poly(Cyclo(1)));
    CHECK(n.num() == (Poly(Cyclo(1)) + Poly::monomial(Cyclo(1), exps_of(VT, 1))));
}

TEST_CASE("h is a square root of q") {
    CHECK(Spec::q_power_half(4, 3) == Spec(9, 3));
    CHECK(Spec::q_power_half(3, 3) == Spec(3, 3) * Spec::q_power_half(1, 3));
    CHECK(Spec::q_power_half(-1, 3) * Spec::q_power_half(1, 3) == Spec(1, 3));
    CHECK(Spec::q_power_half(2, 5) == Spec(5, 5));
    CHECK(Spec::q_power_half(-2, 5) == Spec(Rat(1, 5), 5));
}

TEST_CASE("laurent exponents") {
    Spec z = sv(VZ1);
    Spec lhs = (z + z.inverse()) * (z - z.inverse());
    Spec rhs = z * z - (z * z).inverse();
    CHECK(lhs == rhs);
}

TEST_CASE("normalization cancels common factors") {
    Spec t = sv(VT), z = sv(VZ1);
    Spec common = Spec(1, 3) - t * z;
    Spec r = (common * (Spec(1, 3) + t)) / (common * (Spec(1, 3) - t));
    Spec n = r.normalized();
    Poly expect_num = Poly(Cyclo(1)) + Poly::monomial(Cyclo(1), exps_of(VT, 1));
    Poly expect_den = Poly(Cyclo(1)) - Poly::monomial(Cyclo(1), exps_of(VT, 1));
    CHECK(n.num() == expect_num);
    CHECK(n.den() == expect_den);
    CHECK_FALSE(r.depends_on(VZ1));
}

TEST_CASE("substitution and poles") {
    Spec t = sv(VT);
    Spec f = (Spec(1, 3) - t).inverse();
    CHECK_THROWS_AS((void)f.subst_value(VT, Cyclo(1)), pole_error);
    Spec g = (Spec(1, 3) - t).subst_monomial(VT, Cyclo(Rat(1, 3)), exps_of(VT, 1));
    CHECK(g == Spec(1, 3) - Spec(Rat(1, 3), 3) * t);
    CHECK((w(3, 1) + w(3, 2)) * Cyclo(1) == Cyclo(-1));
    CHECK(Spec(w(3, 1), 3) + Spec(w(3, 2), 3) == Spec(-1, 3));
}

TEST_CASE("q binding rules") {
    CHECK_THROWS_AS((void)(Spec(1, 3) + Spec(1, 5)), std::invalid_argument);
    Spec unbound = Spec(Rat(2));
    CHECK(unbound.with_q(3) + Spec(1, 3) == Spec(3, 3));
    CHECK((Spec(2) * Spec(1, 5)).q() == 5);
}

TEST_CASE("ring laws on random ratios") {
    std::mt19937_64 rng(91u);
    auto rnd_poly = [&]() {
        Poly p;
        for (int i = 0; i < 3; ++i) {
            Exps e = exps_zero();
            e[VT] = (int)(rng() % 5) - 2;
            e[VZ1] = (int)(rng() % 3) - 1;
            long long c = (long long)(rng() % 5) - 2;
            p += Poly::monomial(Cyclo(c), e);
        }
        return p;
    };
    for (int it = 0; it < 10; ++it) {
        Poly pa = rnd_poly(), pb = rnd_poly(), pc = rnd_poly();
        if (pa.is_zero() || pb.is_zero() || pc.is_zero()) continue;
        Spec a = Spec::from_ratio(rnd_poly(), pa, 3);
        Spec b = Spec::from_ratio(rnd_poly(), pb, 3);
        Spec c = Spec::from_ratio(rnd_poly(), pc, 3);
        CHECK((a * b) * c == a * (b * c));
        CHECK(a * (b + c) == a * b + a * c);
        CHECK(a + b == b + a);
        if (!b.is_zero()) CHECK(a / b * b == a);
    }
}

TEST_CASE("power and inverse") {
    Spec t = sv(VT);
    Spec f = (Spec(1, 3) + t) / (Spec(1, 3) - t);
    CHECK(f.pow(-2) * (Spec(1, 3) + t).pow(2) == (Spec(1, 3) - t).pow(2));
    CHECK(f * f.inverse() == Spec(1, 3));
    CHECK(f.pow(0) == Spec(1, 3));
}
