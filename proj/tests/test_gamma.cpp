// Tate zeta integrals, abelian gamma factors, quadratic lambda constants,
// Plancherel densities, and degenerate transfer multipliers.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hankel/gamma.hpp"

#include <random>
#include <stdexcept>
#include <vector>

using namespace hankel;

static const LocalField K2 = LocalField::base(2);
static const LocalField K3 = LocalField::base(3);
static const LocalField K5 = LocalField::base(5);

namespace {

Spec sc(const LocalField& K, const Rat& r) { return Spec(r, K.q()); }
Spec sc(const LocalField& K, long long n) { return Spec(Rat(n), K.q()); }
Spec tvar(const LocalField& K) { return Spec::variable(VT, K.q()); }
Spec zvar(const LocalField& K) { return Spec::variable(VZ1, K.q()); }

MultChar unram(const LocalField& K, const Spec& z) { return MultChar::unramified(K, z); }

long long ppow(long long p, int e) {
    long long r = 1;
    for (int i = 0; i < e; ++i) r *= p;
    return r;
}

UnitChar nontrivial_of_level(long long p, int level) {
    for (const UnitChar& c : UnitChar::all_of_level(p, level))
        if (!c.is_trivial()) return c;
    throw std::logic_error("no nontrivial character at this level");
}

// (1 - z t) / (1 - (q z t)^{-1})
Spec gamma_unram_closed(const LocalField& K, const Spec& z) {
    Spec one = sc(K, 1);
    Spec t = tvar(K);
    return (one - z * t) * (one - (sc(K, K.q()) * z * t).inverse()).inverse();
}

// random conductor <= 2 character with formal uniformizer value
MultChar random_char(std::mt19937_64& rng, const LocalField& K) {
    std::uniform_int_distribution<int> lev(0, 2);
    auto pool = UnitChar::all_of_level(K.p, lev(rng));
    std::uniform_int_distribution<size_t> pick(0, pool.size() - 1);
    return MultChar{K, pool[pick(rng)], zvar(K)};
}

// t-free coefficients so the s -> 1-s substitution touches only |.|^s
CellFunction random_cell(std::mt19937_64& rng, const LocalField& K, int nterms) {
    long long p = K.p;
    std::uniform_int_distribution<int> lev(-1, 2), den(0, 2), coef(1, 3), sgn(0, 1), tp(0, 2);
    CellFunction f(K, 1, +1);
    for (int i = 0; i < nterms; ++i) {
        int k = lev(rng);
        int d = den(rng);
        std::uniform_int_distribution<long long> numc(0, ppow(p, d + 2) - 1);
        Rat a = Rat(numc(rng)) / rpow(Rat(p), d);
        int e = den(rng);
        Rat b = Rat(numc(rng)) / rpow(Rat(p), e);
        Spec c = sc(K, Rat((sgn(rng) ? 1 : -1) * coef(rng), coef(rng)));
        if (tp(rng) == 0) c *= Spec::variable(VZ2, K.q());
        f.add_term(c, {a}, {b}, k);
    }
    return f;
}

} // namespace

TEST_CASE("tate zeta integrals of lattice, unit, and twisted indicators") {
    for (const LocalField& K : {K2, K3, K5}) {
        long long q = K.q();
        Spec one = sc(K, 1), t = tvar(K), z = zvar(K);
        CellFunction lat(K, 1, +1);
        lat.add_indicator(one, {Rat(0)}, 0);
        Spec vol = one - sc(K, Rat(1, q));
        CHECK(tate_zeta(lat, unram(K, z)) == vol * (one - z * t).inverse());
        // half-integral shift folds h into the geometric ratio
        Spec zh = z * Spec::q_power_half(-1, q);
        CHECK(tate_zeta(lat, unram(K, z), 1) == vol * (one - zh * t).inverse());
    }

    // ramified character against untwisted unit shells: orthogonality
    for (const LocalField& K : {K3, K5}) {
        CellFunction units(K, 1, +1);
        units.add_indicator(sc(K, 1), {Rat(0)}, 0);
        units.add_indicator(sc(K, -1), {Rat(0)}, 1);
        MultChar chi{K, nontrivial_of_level(K.p, 1), zvar(K)};
        CHECK(tate_zeta(units, chi).is_zero());
    }

    // a character-weighted coset sum pairs to the unit volume with its own
    // character and to zero against every other
    auto chars = UnitChar::all_of_level(5, 1);
    REQUIRE(chars.size() == 4);
    for (const UnitChar& cu : chars) {
        CellFunction f(K5, 1, +1);
        for (long long u = 1; u <= 4; ++u)
            f.add_indicator(Spec(cu.inverse()(Rat(u)), 5), {Rat(u)}, 1);
        for (const UnitChar& su : chars) {
            Spec v = tate_zeta(f, MultChar{K5, su, sc(K5, 1)});
            if (su == cu)
                CHECK(v == sc(K5, Rat(4, 5)));
            else
                CHECK(v.is_zero());
        }
    }

    // psi(x) on 3^{-1}Z_3 against the quadratic character: a Gauss sum on
    // the valuation -1 shell
    CellFunction g(K3, 1, +1);
    g.add_term(sc(K3, 1), {Rat(0)}, {Rat(1)}, -1);
    UnitChar quad = nontrivial_of_level(3, 1);
    CHECK(quad(Rat(2)) == Cyclo(Rat(-1)));
    Spec gauss = Spec(Cyclo::root_of_unity(3, 1) - Cyclo::root_of_unity(3, 2), 3);
    Spec z3 = zvar(K3), t3 = tvar(K3);
    CHECK(tate_zeta(g, MultChar{K3, quad, z3}) ==
          sc(K3, Rat(1, 3)) * z3.inverse() * t3.inverse() * gauss);
}

TEST_CASE("gamma factors: closed forms and the conductor-one epsilon monomial") {
    for (const LocalField& K : {K2, K3, K5}) {
        long long q = K.q();
        AddChar psi{K, +1};
        Spec one = sc(K, 1), t = tvar(K), z = zvar(K);
        Spec triv = (one - t) * (one - sc(K, Rat(1, q)) * t.inverse()).inverse();
        CHECK(gamma_factor(unram(K, one), 0, psi) == triv);
        CHECK(gamma_factor(unram(K, z), 0, psi) == gamma_unram_closed(K, z));
        CHECK(gamma_factor(unram(K, z), 0, psi.inverse()) == gamma_unram_closed(K, z));
    }

    // the shift parameter is the substitution t -> t/q
    Spec z = zvar(K3), t = tvar(K3);
    AddChar psi3{K3, +1};
    CHECK(gamma_factor(unram(K3, z), 2, psi3) ==
          gamma_factor(unram(K3, z), 0, psi3).subst_monomial(VT, Cyclo(Rat(1, 3)), exps_of(VT, 1)));

    // conductor 1 on Q_3: gamma is the monomial z t times the Gauss sum,
    // so the L-quotient is 1; flipping psi multiplies by chi(-1) = -1
    MultChar chi{K3, nontrivial_of_level(3, 1), z};
    Spec gauss = Spec(Cyclo::root_of_unity(3, 1) - Cyclo::root_of_unity(3, 2), 3);
    CHECK(gamma_factor(chi, 0, psi3) == z * t * gauss);
    CHECK(gamma_factor(chi, 0, psi3.inverse()) == -(z * t * gauss));
    Spec ratio = gamma_factor(chi, 0, psi3) * (z * t).inverse();
    CHECK(!ratio.depends_on(VT));
    CHECK(!ratio.depends_on(VZ1));
}

TEST_CASE("functional equation holds on random cell functions and probes") {
    std::mt19937_64 rng(0x5eed0401);
    for (const LocalField& K : {K2, K3, K5}) {
        AddChar psi{K, +1};
        for (int trial = 0; trial < 10; ++trial) {
            MultChar chi = random_char(rng, K);
            Spec g = gamma_factor(chi, 0, psi);
            CellFunction f = random_cell(rng, K, 1 + trial % 4);
            Spec lhs = g * tate_zeta(f, chi);
            Spec rhs = reflect_s(tate_zeta(fourier_cell(f), chi.inverse()), K.q());
            CHECK(lhs == rhs);
        }
    }

    // five explicit probes agree with the automatic choice
    for (auto [Kp, chi] :
         {std::pair{&K3, MultChar{K3, nontrivial_of_level(3, 1), zvar(K3)}},
          std::pair{&K5, unram(K5, zvar(K5))}}) {
        const LocalField& K = *Kp;
        AddChar psi{K, +1};
        Spec g = gamma_factor(chi, 0, psi);
        int c = std::max(chi.conductor(), 1);
        for (int j = 0; j < 5; ++j) {
            CellFunction probe(K, 1, +1);
            probe.add_indicator(sc(K, 1), {Rat(1) / rpow(Rat(K.p), j)}, c - j);
            Spec den = tate_zeta(probe, chi);
            Spec num = reflect_s(tate_zeta(fourier_cell(probe), chi.inverse()), K.q());
            CHECK(g == num * den.inverse());
        }
    }
}

TEST_CASE("gamma involution over random characters") {
    std::mt19937_64 rng(0x5eed0402);
    std::uniform_int_distribution<int> pp(0, 2), ss(0, 1);
    const LocalField* fields[3] = {&K2, &K3, &K5};
    for (int trial = 0; trial < 30; ++trial) {
        const LocalField& K = *fields[pp(rng)];
        MultChar chi = random_char(rng, K);
        AddChar psi{K, ss(rng) ? +1 : -1};
        Spec a = gamma_factor(chi, 0, psi);
        Spec b = gamma_factor(chi.inverse(), 0, psi.inverse());
        CHECK(a * reflect_s(b, K.q()) == sc(K, 1));
    }
}

TEST_CASE("gamma on torus pullbacks") {
    AddChar psi{K3, +1};
    Spec one = sc(K3, 1), t = tvar(K3);
    Spec z1 = Spec::variable(VZ1, 3), z2 = Spec::variable(VZ2, 3);
    TorusChar tc{{unram(K3, z1), unram(K3, z2)}};

    CHECK(gamma_torus(tc, {0, 0}, 0, psi) ==
          (one - t) * (one - sc(K3, Rat(1, 3)) * t.inverse()).inverse());
    CHECK(gamma_torus(tc, {1, -1}, 0, psi) ==
          gamma_factor(unram(K3, z1 * z2.inverse()), 0, psi));

    // cocharacter doubling equals squaring the character
    AddChar psi5{K5, +1};
    MultChar chi4{K5, nontrivial_of_level(5, 1), zvar(K5)};
    TorusChar tc4{{chi4}};
    TorusChar tc4sq{{chi4.pow(2)}};
    CHECK(gamma_torus(tc4, {2}, 0, psi5) == gamma_torus(tc4sq, {1}, 0, psi5));

    // a cocharacter supported on one coordinate ignores the others
    MultChar rama{K3, nontrivial_of_level(3, 1), z1};
    TorusChar mixed{{unram(K3, z2), rama}};
    TorusChar alone{{rama}};
    CHECK(gamma_torus(mixed, {0, 3}, 0, psi) == gamma_torus(alone, {3}, 0, psi));
}

TEST_CASE("dual lattice of the integers under the trace pairing") {
    struct Case {
        const LocalField* K;
        Rat D;
        int d;
    };
    const Case cases[] = {
        {&K3, Rat(2), 0}, {&K3, Rat(3), 1}, {&K2, Rat(-1), 2},
        {&K2, Rat(-3), 0}, {&K5, Rat(5), 1},
    };
    for (const Case& c : cases) {
        LocalField E = quadratic_extension(*c.K, c.D);
        CHECK(E.psi_conductor == c.d);
        AddChar psi{*c.K, +1};
        long long m = ppow(c.K->p, 2);
        auto trace_sum = [&](long long v) {
            ExtElt x = ext_pi_pow(E, v);
            Cyclo sum(0);
            for (long long a = 0; a < m; ++a)
                for (long long b = 0; b < m; ++b)
                    sum = sum + psi.on_ext(E, ext_mul(E, x, ExtElt{Rat(a), Rat(b)}));
            return sum;
        };
        CHECK(trace_sum(-c.d) == Cyclo(Rat(m * m)));
        CHECK(trace_sum(-c.d - 1) == Cyclo(0));
        CHECK(trace_sum(-c.d - 2) == Cyclo(0));
    }
}

TEST_CASE("lambda factors of quadratic characters") {
    AddChar psi3{K3, +1};
    CHECK_THROWS_AS(lambda_factor(K3, Rat(4), psi3), std::domain_error);
    CHECK_THROWS_AS(lambda_factor(K2, Rat(1, 4), AddChar{K2, +1}), std::domain_error);

    // unramified eta: the three gamma factors cancel exactly
    CHECK(lambda_factor(K3, Rat(2), psi3) == sc(K3, 1));
    CHECK(lambda_factor(K5, Rat(2), AddChar{K5, +1}) == sc(K5, 1));
    CHECK(lambda_factor(K2, Rat(-3), AddChar{K2, +1}) == sc(K2, 1));

    // ramified eta: lambda squares to eta(-1); s-independence is checked
    // inside on every call
    struct Case {
        const LocalField* K;
        Rat D;
    };
    const Case cases[] = {
        {&K3, Rat(3)},  {&K3, Rat(-3)}, {&K3, Rat(15)}, {&K5, Rat(5)},
        {&K5, Rat(10)}, {&K2, Rat(-1)}, {&K2, Rat(2)},  {&K2, Rat(-2)},
        {&K2, Rat(6)},
    };
    for (const Case& c : cases) {
        AddChar psi{*c.K, +1};
        Spec lam = lambda_factor(*c.K, c.D, psi);
        MultChar eta = MultChar::norm_class(*c.K, c.D);
        CHECK(!lam.is_zero());
        CHECK(lam * lam == eta.eval(Rat(-1)));
        // psi(ax) rescales lambda by eta(a); a = -1 is the inverse character
        CHECK(lambda_factor(*c.K, c.D, psi.inverse()) == eta.eval(Rat(-1)) * lam);
    }
    CHECK_NOTHROW(lambda_factor(K5, Rat(15), AddChar{K5, +1}));
}

TEST_CASE("plancherel densities for the three spectral setups") {
    AddChar psi{K3, +1};
    Spec one = sc(K3, 1), z = zvar(K3);
    Spec q = sc(K3, 3), h = Spec::q_power_half(1, 3);

    // whittaker with the Satake square as uniformizer value
    MultChar chi2 = unram(K3, z * z);
    Spec gz2 = (one - z.pow(2)) * (one - (q * z.pow(2)).inverse()).inverse();
    CHECK(plancherel_density(Geometry::WhittakerSl2, chi2, psi) == gz2);
    CHECK(plancherel_density(Geometry::WhittakerPgl2, unram(K3, z), psi) == gz2);

    // group case pairs the two coroot directions: Weyl-symmetric in z
    MultChar chi = unram(K3, z);
    Spec mu = plancherel_density(Geometry::GroupSl2, chi, psi);
    CHECK(mu == mu.subst_monomial(VZ1, Cyclo(1), exps_of(VZ1, -1)));
    Spec gzm = (one - z.inverse()) * (one - (q * z.inverse()).inverse()).inverse();
    Spec gzp = (one - z) * (one - (q * z).inverse()).inverse();
    CHECK(mu == gzm * gzp);

    // ramified Weyl symmetry: inverting the character fixes the density
    MultChar ram{K3, nontrivial_of_level(3, 1), z};
    CHECK(plancherel_density(Geometry::GroupSl2, ram, psi) ==
          plancherel_density(Geometry::GroupSl2, ram.inverse(), psi));

    // torus quotient: half-coroot factor at shift 1/2, squared, times the
    // full coroot factor
    Spec ghalf = (one - z.inverse() * h.inverse()) * (one - z * h.inverse()).inverse();
    CHECK(plancherel_density(Geometry::TorusQuotientPgl2, chi, psi) == ghalf * ghalf * gz2);
}

TEST_CASE("degenerate transfer multipliers") {
    AddChar psi{K3, +1};
    Spec one = sc(K3, 1), z = zvar(K3);
    MultChar chi = unram(K3, z);
    MultChar ram{K3, nontrivial_of_level(3, 1), z};

    for (Geometry g : {Geometry::WhittakerSl2, Geometry::GroupSl2,
                       Geometry::WhittakerPgl2, Geometry::TorusQuotientPgl2})
        CHECK(degenerate_multiplier(g, g, chi, psi) == one);

    // delta^{1/2} dictionary, one entry per geometry
    CHECK(delta_half_at_p(Geometry::WhittakerSl2, 3) == sc(K3, Rat(1, 3)));
    CHECK(delta_half_at_p(Geometry::GroupSl2, 3) == sc(K3, Rat(1, 3)));
    CHECK(delta_half_at_p(Geometry::WhittakerPgl2, 3) == Spec::q_power_half(-1, 3));
    CHECK(delta_half_at_p(Geometry::TorusQuotientPgl2, 3) == Spec::q_power_half(-1, 3));

    // whittaker -> group equals the gamma factor of chi itself with psi
    // upright, at s = 0
    for (const MultChar& c : {chi, ram}) {
        Spec direct = gamma_factor(c, 0, psi).subst_value(VT, Cyclo(Rat(1)));
        CHECK(degenerate_multiplier(Geometry::WhittakerSl2, Geometry::GroupSl2, c, psi) ==
              direct);
        CHECK(degenerate_multiplier(Geometry::WhittakerPgl2, Geometry::TorusQuotientPgl2,
                                    c, psi) == direct * direct);
        // reversing the pair inverts the multiplier
        CHECK(degenerate_multiplier(Geometry::GroupSl2, Geometry::WhittakerSl2, c, psi) *
                  direct == one);
    }

    CHECK_THROWS_AS(
        degenerate_multiplier(Geometry::WhittakerSl2, Geometry::TorusQuotientPgl2, chi, psi),
        std::invalid_argument);
}
