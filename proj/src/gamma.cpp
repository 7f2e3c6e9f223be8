#include "hankel/gamma.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>
#include <utility>

namespace hankel {

namespace {

// valuation window covering f's support and the stabilization points of its
// twisted tails
std::pair<long long, long long> support_window(const CellFunction& f) {
    long long p = f.field().p;
    bool any = false;
    long long lo = 0, hi = 0;
    for (const auto& [cell, coeff] : f.terms()) {
        if (coeff.is_zero()) continue;
        long long vlo, vhi;
        if (!cell.center[0].is_zero()) {
            vlo = vhi = val_p(cell.center[0], p);
        } else {
            vlo = cell.level;
            vhi = cell.level;
            if (!cell.twist[0].is_zero())
                vhi = std::max<long long>(vhi, -val_p(cell.twist[0], p));
        }
        lo = any ? std::min(lo, vlo) : vlo;
        hi = any ? std::max(hi, vhi) : vhi;
        any = true;
    }
    return {lo, hi};
}

MultChar with_abs_power(const MultChar& chi, const Spec& per_val) {
    MultChar r = chi;
    r.at_p = r.at_p * per_val;
    return r;
}

// 1_{p^{-j}(1 + p^c Z_p)}: a single multiplicative coset, so its zeta
// integral is a nonzero monomial for every chi with conductor <= c
CellFunction unit_coset_probe(const LocalField& K, int sign, int c, int j) {
    Rat center(1);
    for (int i = 0; i < j; ++i) center = center / Rat(K.p);
    CellFunction f(K, 1, sign);
    f.add_indicator(Spec(Rat(1), K.q()), {center}, c - j);
    return f;
}

Spec gamma_on_probe(const CellFunction& probe, const MultChar& chi, long long q) {
    Spec den = tate_zeta(probe, chi);
    Spec num = reflect_s(tate_zeta(fourier_cell(probe), chi.inverse()), q);
    return num * den.inverse();
}

} // namespace

Spec tate_zeta(const CellFunction& f, const MultChar& chi, long long shift_halves) {
    assert(chi.K.p == f.field().p && chi.K.degree() == f.field().degree());
    long long q = f.field().q();
    auto [lo, hi] = support_window(f);
    ShellFunction s = cell_to_shell(f, ShellKind::Measure, lo, hi);
    Spec per_val = Spec::variable(VT, q) * Spec::q_power_half(-shift_halves, q);
    return mellin(s, TorusChar{{with_abs_power(chi, per_val)}});
}

Spec reflect_s(const Spec& g, long long q) {
    return g.subst_monomial(VT, Cyclo(Rat(1, q)), exps_of(VT, -1));
}

Spec gamma_factor(const MultChar& chi0, long long shift_halves, const AddChar& psi) {
    const LocalField& K = chi0.K;
    assert(psi.K.p == K.p);
    long long q = K.q();
    MultChar chi = with_abs_power(chi0, Spec::q_power_half(-shift_halves, q));
    int c = std::max(chi.conductor(), 1);
    Spec g = gamma_on_probe(unit_coset_probe(K, psi.sign, c, 0), chi, q);
    Spec g2 = gamma_on_probe(unit_coset_probe(K, psi.sign, c, 1), chi, q);
    if (!(g == g2)) throw std::logic_error("gamma_factor: probe dependence");
    return g;
}

Spec gamma_torus(const TorusChar& chi, const std::vector<int>& cochar,
                 long long shift_halves, const AddChar& psi) {
    return gamma_factor(chi.pullback(cochar), shift_halves, psi);
}

Spec gamma_ext_trivial(const LocalField& E, long long shift_halves) {
    assert(E.degree() == 2);
    long long q = E.p;
    bool ram = (E.e == 2);
    int d = E.psi_conductor;
    Spec t = Spec::variable(VT, q);
    // T = q_E^{-s} with the shift folded in; U = (q_E T)^{-1}
    Spec T = ram ? t * Spec::q_power_half(-shift_halves, q)
                 : t * t * Spec::q_power_half(-2 * shift_halves, q);
    Spec U = (Spec(Rat(E.q()), q) * T).inverse();
    // vol(O_E) under the self-dual measure for psi o tr
    Spec V = Spec::q_power_half(ram ? -d : -2 * d, q);
    Spec one(Rat(1), q);
    return V * U.pow(-d) * (one - T) * (one - U).inverse();
}

Spec lambda_factor(const LocalField& K, const Rat& D, const AddChar& psi) {
    LocalField E = quadratic_extension(K, D);
    MultChar eta = MultChar::norm_class(K, D);
    MultChar one = MultChar::unramified(K, Spec(Rat(1), K.q()));
    auto at_shift = [&](long long sh) {
        return gamma_factor(one, sh, psi) * gamma_factor(eta, sh, psi) *
               gamma_ext_trivial(E, sh).inverse();
    };
    Spec lam = at_shift(0);
    if (lam.depends_on(VT) || !(lam == at_shift(2)))
        throw std::logic_error("lambda_factor: s-dependence (conductor mismatch)");
    return lam;
}

namespace {

struct GeometryData {
    int coroot; // alpha-check in the torus coordinate
    bool pgl2;  // coordinate family
};

GeometryData geometry_data(Geometry g) {
    switch (g) {
    case Geometry::WhittakerSl2: return {1, false};
    case Geometry::GroupSl2: return {1, false};
    case Geometry::WhittakerPgl2: return {2, true};
    case Geometry::TorusQuotientPgl2: return {2, true};
    }
    throw std::logic_error("geometry_data: bad enum");
}

// gamma(chi |.|^{sh/2}, s, psi) at s = 0
Spec gamma_at0(const MultChar& chi, long long sh, const AddChar& psi) {
    return gamma_factor(chi, sh, psi).subst_value(VT, Cyclo(Rat(1)));
}

} // namespace

Spec delta_half_at_p(Geometry g, long long q) {
    return geometry_data(g).pgl2 ? Spec::q_power_half(-1, q) : Spec(Rat(1, q), q);
}

Spec plancherel_density(Geometry g, const MultChar& chi, const AddChar& psi) {
    AddChar pinv = psi.inverse();
    int a = geometry_data(g).coroot;
    Spec mu = gamma_at0(chi.pow(a), 0, pinv);
    switch (g) {
    case Geometry::WhittakerSl2:
    case Geometry::WhittakerPgl2: return mu;
    case Geometry::GroupSl2: return gamma_at0(chi.pow(-a), 0, pinv) * mu;
    case Geometry::TorusQuotientPgl2: {
        Spec half = gamma_at0(chi.pow(-1), 1, pinv); // -coroot/2 at shift 1/2
        return half * half * mu;
    }
    }
    throw std::logic_error("plancherel_density: bad enum");
}

Spec degenerate_multiplier(Geometry x, Geometry y, const MultChar& chi,
                           const AddChar& psi) {
    if (geometry_data(x).pgl2 != geometry_data(y).pgl2)
        throw std::invalid_argument("degenerate_multiplier: incompatible coordinates");
    long long q = chi.K.q();
    MultChar cx = with_abs_power(chi, delta_half_at_p(x, q).inverse());
    MultChar cy = with_abs_power(chi, delta_half_at_p(y, q).inverse());
    Spec ratio = plancherel_density(x, cx, psi) * plancherel_density(y, cy, psi).inverse();
    // the whittaker-to-* multipliers collapse to gamma factors of chi with
    // psi upright; recompute them that way and compare
    bool canonical = (x == Geometry::WhittakerSl2 && y == Geometry::GroupSl2) ||
                     (x == Geometry::WhittakerPgl2 && y == Geometry::TorusQuotientPgl2);
    if (canonical) {
        Spec direct = gamma_at0(chi, 0, psi);
        if (geometry_data(x).pgl2) direct *= direct;
        if (!(ratio == direct))
            throw std::logic_error("degenerate_multiplier: gamma identity failed");
    }
    return ratio;
}

} // namespace hankel
