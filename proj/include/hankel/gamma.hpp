#pragma once

#include "hankel/character.hpp"
#include "hankel/schwartz.hpp"

#include <vector>

namespace hankel {

// Z(f, chi, s) = integral of f(x) chi(x) |x|^(s + shift_halves/2) d*x as a
// rational function of t = q^{-s}. The valuation window is derived from f's
// support; everything beyond it resums exactly.
Spec tate_zeta(const CellFunction& f, const MultChar& chi, long long shift_halves = 0);

// t -> 1/(qt), i.e. s -> 1 - s
Spec reflect_s(const Spec& g, long long q);

// gamma(chi |.|^{shift_halves/2}, s, psi) as the ratio of the zeta integral
// of a probe's Fourier transform at (chi^{-1}, 1-s) to the probe's own at
// (chi, s). The probe is one multiplicative coset, so the denominator is a
// nonzero monomial; a second probe cross-checks the ratio.
Spec gamma_factor(const MultChar& chi, long long shift_halves, const AddChar& psi);

// gamma of the rank-one pullback chi o cochar
Spec gamma_torus(const TorusChar& chi, const std::vector<int>& cochar,
                 long long shift_halves, const AddChar& psi);

// gamma of the trivial character of a quadratic extension E, with additive
// character psi o tr, expressed in base-field scalars (t = q^{-s}, h^2 = q)
Spec gamma_ext_trivial(const LocalField& E, long long shift_halves);

// lambda(eta, psi) = gamma(1,s,psi) gamma(eta,s,psi) / gamma_E(1,s,psi o tr)
// where E = K(sqrt(D)) and eta is its norm-class character. The ratio is
// s-free; computed at two shifts and compared, so a conductor bug surfaces
// as logic_error. Square D is rejected by the extension constructor.
Spec lambda_factor(const LocalField& K, const Rat& D, const AddChar& psi);

// Rank-one spectral setups sharing a G_m coordinate on the spectral torus.
// The Sl2 pair takes the coroot as (1) in its coordinate; the Pgl2 pair
// takes it as (2), so its half stays integral.
enum class Geometry { WhittakerSl2, GroupSl2, WhittakerPgl2, TorusQuotientPgl2 };

// delta_P^{1/2} at the uniformizer, in the geometry's torus coordinate
Spec delta_half_at_p(Geometry g, long long q);

// Plancherel density mu(chi): a product of gamma factors of pullbacks of
// chi evaluated at s = 0, with psi entering inverted.
Spec plancherel_density(Geometry g, const MultChar& chi, const AddChar& psi);

// Mellin multiplier of the degenerate transfer from geometry x to geometry
// y: mu_x(chi delta_x^{-1/2}) / mu_y(chi delta_y^{-1/2}). Requires a shared
// coordinate family.
Spec degenerate_multiplier(Geometry x, Geometry y, const MultChar& chi,
                           const AddChar& psi);

} // namespace hankel
