#pragma once

#include "hankel/schwartz.hpp"

#include <array>
#include <functional>
#include <optional>
#include <utility>

namespace hankel {

// An enumeration hit its precision cap before two consecutive levels agreed.
struct enumeration_cap_error : std::runtime_error {
    int cap;
    enumeration_cap_error(const std::string& what, int cap_) : std::runtime_error(what), cap(cap_) {}
};

// The requested cell straddles a locus where the pushforward density is not
// locally constant; retry at suggested_level or pass allow_unstable.
struct refine_error : std::runtime_error {
    int suggested_level;
    refine_error(const std::string& what, int suggested)
        : std::runtime_error(what), suggested_level(suggested) {}
};

enum class Group { Sl2, Pgl2, Gl2, Mat2 };

// Test function on a 2x2 matrix group or monoid over Q_p: a rank-4
// CellFunction in the entries (a, b, c, d), row-major, evaluated on the
// group's locus. det_val restricts to the Smith stratum of that valuation;
// Pgl2 functions are evaluated on the p-power-primitive representative and
// must be supplied invariant under unit scaling.
struct GroupCellFunction {
    Group tag;
    CellFunction cells;
    std::optional<long long> det_val;

    // indicator of G(Z_p) (Mat2: the integral monoid)
    static GroupCellFunction unit_group(Group g, const LocalField& K);
    // depth-r orbit: Sl2 gives {g : p^r g integral primitive}; the others give
    // integral primitive matrices of det-valuation r. r = 0 is unit_group for
    // the group tags.
    static GroupCellFunction hecke_orbit(Group g, const LocalField& K, int r);

    const LocalField& field() const { return cells.field(); }
    Spec value_at(const std::array<Rat, 4>& m) const;
    // g -> Phi(n(u) g n(v)); cells split along residues fine enough to carry
    // the sheared balls
    GroupCellFunction unipotent_translate(const Rat& u, const Rat& v) const;
    GroupCellFunction scaled(const Spec& c) const;
    GroupCellFunction& operator+=(const GroupCellFunction& o);
    friend GroupCellFunction operator+(GroupCellFunction a, const GroupCellFunction& b) {
        return a += b;
    }
};

struct OrbitalResult {
    std::vector<Rat> point;
    Spec value;
    bool stabilized = false;
    int level = 0;
};

// ---- finite-ring oracle ----------------------------------------------------

// Exhaustive scan over (Z/p^level)^arity; the trust anchor every fast path is
// tested against. `phase` feeds psi(phase / p^level) with the sign-+1
// standard character; solutions are points where pred holds.
struct ScanJob {
    long long p = 0;
    int level = 1;
    int arity = 1;
    long long cap = 300000000;
};
struct ScanReport {
    long long solutions = 0;
    Cyclo weighted;
};
ScanReport scan_ring(const ScanJob& job, const std::function<bool(const std::vector<long long>&)>& pred,
                     const std::function<long long(const std::vector<long long>&)>& phase = {});

// |SL_2(Z/p^N)| = p^{3N}(1 - p^{-2})
long long sl2_class_count(long long p, int N);
// #{(b,c) in (Z/p^L)^2 : bc = r}
long long pair_count_mod(long long p, int L, long long r);
// as above with b in p^beta_b Z, c in p^beta_c Z
long long pair_count_balls(long long p, int L, long long r, int beta_b, int beta_c);
// sum over units u mod p^m of psi^{s1}(a u) psi^{s2}(b u^{-1})
Cyclo kloosterman_sum(const LocalField& K, const Rat& a, const Rat& b, int m,
                      std::pair<int, int> signs);

// ---- orbital integrals -----------------------------------------------------

// Two-sided unipotent orbital integral at the anti-diagonal representative of
// t, weighted by psi^{s1}(x) psi^{s2}(y) on the two unipotent coordinates.
// point = {zeta} (Sl2, Pgl2) or {b1, b2} (Gl2, Mat2), all coordinates
// nonzero. HalfDensity multiplies the raw integral by |zeta| (Sl2),
// |xi|^{1/2} (Pgl2), or |b1|^{3/2}|b2|^{1/2} (Gl2, Mat2).
OrbitalResult kuznetsov_orbital(const GroupCellFunction& phi, const std::vector<Rat>& point,
                                std::pair<int, int> signs, ShellKind kind = ShellKind::HalfDensity,
                                int cap = 9);

// Mass the conjugation-pushforward of Phi dg assigns to tau0 + p^level Z_p,
// Sl2 only. `stabilized` certifies the density is locally constant there; a
// cell containing +-2 fails that and raises refine_error unless
// allow_unstable (the exact mass is still returned in that mode).
OrbitalResult trace_pushforward(const GroupCellFunction& phi, const Rat& tau0, int level,
                                bool allow_unstable = false, int cap = 9);

// Mass of the T\G/T pushforward of Phi dg on xi0 + p^level Z_p, Pgl2 only;
// xi is the invariant with xi(identity) = 1, xi(antidiagonal) = 0. Cells
// containing 0 or 1 carry non-constant density: as above.
OrbitalResult toric_orbital(const GroupCellFunction& phi, const Rat& xi0, int level,
                            bool allow_unstable = false, int cap = 9);

// Twisted pushforward of a Schwartz function on Mat_2 to the torus point
// (b1, b2): the Gl2 Kuznetsov integral of the same cells against the monoid
// support, half-density normalized by default.
OrbitalResult mat2_twisted_pushforward(const CellFunction& phi, const Rat& b1, const Rat& b2,
                                       std::pair<int, int> signs = {-1, -1},
                                       ShellKind kind = ShellKind::HalfDensity, int cap = 9);

// delta^{1/2}(t) * integral over B\H x N of Phi(g^{-1} t n g), H in
// {Sl2, Gl2}; t = {a} or {t1, t2}. B\H carries the counting measure of total
// mass 1 + 1/p. Raises refine_error when coset refinement does not
// stabilize (irregular t against fine cells).
OrbitalResult cartan_descent(const GroupCellFunction& phi, const std::vector<Rat>& t, int cap = 9);

} // namespace hankel
