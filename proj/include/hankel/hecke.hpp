#pragma once

#include "hankel/orbital.hpp"

#include <map>
#include <vector>

namespace hankel {

// Finite combination of double cosets K t_lambda K indexed by dominant
// cocharacters: {r >= 0} for Sl2 / Pgl2, {a >= b} for Gl2. Coefficients are
// exact spectral scalars bound to the field's q.
struct HeckeElement {
    Group tag;
    LocalField K;
    std::map<std::vector<long long>, Spec> terms;

    static HeckeElement identity(Group g, const LocalField& K);
    static HeckeElement double_coset(Group g, const LocalField& K,
                                     const std::vector<long long>& lambda);

    HeckeElement& operator+=(const HeckeElement& o);
    friend HeckeElement operator+(HeckeElement a, const HeckeElement& b) { return a += b; }
    HeckeElement scaled(const Spec& c) const;
    bool operator==(const HeckeElement& o) const;
    bool operator!=(const HeckeElement& o) const { return !(*this == o); }

    // largest coordinate span of the support; bounds every enumeration below
    long long reach() const;
};

// The element as a test function on the group: each K t_lambda K becomes the
// difference of integral ball indicators cutting out its orbit, with the
// det stratum pinned for Pgl2 / Gl2. Those two groups must therefore stay
// inside a single det stratum here; mixed elements are rejected.
GroupCellFunction as_group_cells(const HeckeElement& h);

// Weyl-invariant Laurent polynomial in the Satake coordinates (z for the
// rank-one groups with Sl2 supported on even powers, z1/z2 for Gl2).
// Construction checks the invariance and rejects anything else.
struct SatakePolynomial {
    Group tag;
    Spec value;

    SatakePolynomial(Group g, const Spec& v);

    friend SatakePolynomial operator*(const SatakePolynomial& a, const SatakePolynomial& b);
    friend SatakePolynomial operator+(const SatakePolynomial& a, const SatakePolynomial& b);
    bool operator==(const SatakePolynomial& o) const;
    bool operator!=(const SatakePolynomial& o) const { return !(*this == o); }
    std::string str() const;
};

// Constant-term transform: sum over torus valuations of delta^{1/2}(t_V)
// times the unipotent integral of h(t_V n(u)) du, attached to the monomial
// of t_V. The valuation layers of u are finite and exact; the enumeration
// window is certified by vanishing margins on both sides.
SatakePolynomial satake(const HeckeElement& h);

// Algebra product. Computed by acting on the unramified Whittaker vector and
// peeling the result against the triangular double-coset basis, so it shares
// no code path with satake(); the check satake(a*b) == satake(a)satake(b)
// is a genuine two-sided test.
HeckeElement hecke_convolve(const HeckeElement& a, const HeckeElement& b);

enum class DualRep { Std, Ad };

// The element whose Satake transform is the character of Sym^i(rep) of the
// dual group: Ad for Sl2, Std for Pgl2 / Gl2. Triangular inversion against
// the double-coset basis.
HeckeElement sym_power_element(Group g, const LocalField& K, DualRep rep, int i);

// Action of h on K-invariant Whittaker shell data W(t_V): rank 1 indexed by
// V (supported in V >= 0), rank 2 by dominant (v1, v2). Shell data absent
// from the window and tails is read as zero, so inputs must carry their full
// support; all window shells must be level 0. A geometric tail of the input
// is carried to a fitted tail of the output (rank 1; the fit is verified on
// extra shells and throws enumeration_cap_error when it cannot stabilize).
ShellFunction hecke_convolve_whittaker(const HeckeElement& h, const ShellFunction& w);

// The three unramified spaces with distinguished basic data at the desk:
// the adjoint L-factor at 1 on Sl2, the square of the standard L-factor at
// 1/2 on Pgl2, and the shifted standard space of the 2x2 matrix monoid.
enum class BasicSpace { Sl2Adjoint, Pgl2StdPair, Gl2Std };

Group basic_space_group(BasicSpace s);

// Whittaker shell data of the basic vector: the Hecke series resummed per
// shell with an exact ray model (ratio and log degree solved from the
// computed terms, then verified on extras), window [0, vmax] plus the
// matching tail. Rank-one spaces only.
ShellFunction basic_whittaker(BasicSpace space, const LocalField& K, long long vmax);

// Pushforward of Whittaker shell data to the unipotent double quotient,
// as a density against the reference d*zeta measure: per output shell the
// Bessel pairing reduces to finitely many torus shells, each an exact
// one-dimensional character sum. Window [wmin, wmax]; when wmin <= 0 the
// deep side is fitted to tail terms and verified on extra shells.
ShellFunction whittaker_pushforward(Group g, const ShellFunction& w, long long wmin,
                                    long long wmax, std::pair<int, int> signs = {-1, -1});

// The basic vector on the unipotent quotient. Sl2 / Pgl2: the pushforward
// of basic_whittaker, measure-normalized, tails attached. Gl2: graded by
// det valuation, each slice the Kuznetsov value of the matching sym-power
// translate; half-density normalized to pair with mat2_twisted_pushforward.
// Shell levels adapt to the verified unit dependence.
ShellFunction basic_vector(BasicSpace space, const LocalField& K, long long wmin,
                           long long wmax, std::pair<int, int> signs = {-1, -1});

} // namespace hankel
