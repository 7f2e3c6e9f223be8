#pragma once

#include "hankel/character.hpp"
#include "hankel/local_field.hpp"
#include "hankel/spectral.hpp"

#include <map>
#include <stdexcept>
#include <vector>

namespace hankel {

// A declared valuation window is too small for the requested operation.
// required_valuation is the shell that must be covered for it to succeed.
struct window_error : std::runtime_error {
    long long required_valuation;
    window_error(const std::string& what, long long required)
        : std::runtime_error(what), required_valuation(required) {}
};

// A pointwise multiplier hits a zero / unresolved square class on a cell.
struct singular_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Canonical representative of c + p^k Z_p: a rational m / p^d with
// 0 <= m < p^(k+d), d = max(0, -val(c)); 0 when val(c) >= k.
Rat reduce_mod_level(const Rat& c, int k, long long p);

// coeff * psi(<twist, x>) * indicator(x in center + p^level Z_p^n),
// canonicalized: center mod p^level, twist mod p^(-level) (the discarded
// twist part is constant on the cell and folded into coeff).
struct Cell {
    int level = 0;
    std::vector<Rat> center;
    std::vector<Rat> twist;
};
bool operator<(const Cell& a, const Cell& b);

// Finite linear combination of twisted lattice-coset indicators on Q_p^n.
class CellFunction {
public:
    CellFunction(const LocalField& K, int rank, int psi_sign);

    const LocalField& field() const { return K_; }
    int rank() const { return rank_; }
    int psi_sign() const { return psi_sign_; }
    AddChar psi() const { return {K_, psi_sign_}; }
    const std::map<Cell, Spec>& terms() const { return terms_; }
    size_t size() const { return terms_.size(); }

    // adds coeff * psi(<twist, x>) on center + p^level Z_p^n
    void add_term(const Spec& coeff, std::vector<Rat> center, std::vector<Rat> twist, int level);
    void add_indicator(const Spec& coeff, std::vector<Rat> center, int level);

    Spec value_at(const std::vector<Rat>& x) const;
    Spec value_at(const std::vector<Padic>& x) const;

    CellFunction operator-() const;
    CellFunction& operator+=(const CellFunction& o);
    friend CellFunction operator+(CellFunction a, const CellFunction& b) { return a += b; }
    CellFunction& operator-=(const CellFunction& o) { return *this += -o; }
    friend CellFunction operator-(CellFunction a, const CellFunction& b) { return a -= b; }
    // pointwise product on the common refinement
    friend CellFunction operator*(const CellFunction& a, const CellFunction& b);

    CellFunction scaled(const Spec& c) const;
    // coefficient-wise cyclotomic conjugation (psi -> psi^{-1} on twists)
    CellFunction conjugated() const;

    bool operator==(const CellFunction& o) const;
    bool operator!=(const CellFunction& o) const { return !(*this == o); }

private:
    LocalField K_;
    int rank_;
    int psi_sign_;
    std::map<Cell, Spec> terms_;
};

// Additive Fourier transform with the self-dual measure, vol(Z_p^n) = 1.
CellFunction fourier_cell(const CellFunction& f);
// integral over Q_p^n against the self-dual additive measure
Spec integral_cell(const CellFunction& f);
// <f, g> = integral of f * conj(g)
Spec pair_cells(const CellFunction& f, const CellFunction& g);

enum class ShellKind { Function, Measure, HalfDensity };

// Data of one valuation shell {x : val(x_i) = v_i}: an exact function on
// unit cosets mod (1 + p^level Z_p) per coordinate. The map is total over
// coset representatives.
struct Shell {
    int level = 0;
    std::map<std::vector<long long>, Spec> values;
};

// Geometric ray of shells: at valuation start + k*step (k >= 0) the value
// on coset u is coset[u] * k^log_degree * ratio^k.
struct TailTerm {
    std::vector<long long> start;
    std::vector<long long> step;
    Spec ratio;
    int log_degree = 0;
    int level = 0;
    std::map<std::vector<long long>, Spec> coset;
};

std::vector<long long> unit_reps(long long p, int level);
std::vector<std::vector<long long>> unit_rep_tuples(long long p, int level, int rank);
// multiplicative volume of a level-m unit coset: 1 - 1/q at level 0, q^-m after
Spec coset_volume(const LocalField& K, int level);

// Function / measure / half-density on (Q_p^*)^r presented by exact window
// shells plus geometric tails. Inside the window the shell data is the
// value; tails apply only to shells outside the window.
class ShellFunction {
public:
    ShellFunction(const LocalField& K, int rank, ShellKind kind);

    const LocalField& field() const { return K_; }
    int rank() const { return rank_; }
    ShellKind kind() const { return kind_; }
    const std::map<std::vector<long long>, Shell>& window() const { return window_; }
    const std::vector<TailTerm>& tails() const { return tails_; }

    void set_shell(const std::vector<long long>& v, Shell s);
    void add_tail(TailTerm t);

    // total: window shell, else sum of covering tails, else 0
    Spec value_at(const std::vector<long long>& v, const std::vector<long long>& u) const;
    // the full shell at v, materialized at least at `level`
    Shell shell_at(const std::vector<long long>& v, int level = 0) const;
    // integral of the shell against the reference measure
    Spec shell_mass(const std::vector<long long>& v) const;

    ShellFunction operator-() const;
    ShellFunction& operator+=(const ShellFunction& o);
    friend ShellFunction operator+(ShellFunction a, const ShellFunction& b) { return a += b; }
    ShellFunction& operator-=(const ShellFunction& o) { return *this += -o; }
    friend ShellFunction operator-(ShellFunction a, const ShellFunction& b) { return a -= b; }
    ShellFunction scaled(const Spec& c) const;
    ShellFunction with_kind(ShellKind k) const;

private:
    LocalField K_;
    int rank_;
    ShellKind kind_;
    std::map<std::vector<long long>, Shell> window_;
    std::vector<TailTerm> tails_;
};

// sum over k >= 0 of k^j w^k as an exact rational (Eulerian numerator);
// throws pole_error when w = 1
Spec geometric_power_sum(const Spec& w, int j);

// integral of f * prod_i chi_i(x_i); chi.comp.size() == f.rank().
// Tail resummation is exact; a tail whose ratio meets the character at 1
// raises pole_error.
Spec mellin(const ShellFunction& f, const TorusChar& chi);

// pointwise multiplication by prod_i chi_i(x_i)
ShellFunction multiply_by_char(const ShellFunction& f, const TorusChar& chi);
// pointwise multiplication by psi(c * prod x_i^{e_i}); materializes tail
// heads when the twist stabilizes along the ray, else raises window_error
ShellFunction multiply_by_psi_monomial(const ShellFunction& f, const AddChar& psi, const Rat& c,
                                       const std::vector<int>& exps);
// pointwise multiplication by eta(P(x)) for rank-1 f, P a polynomial with
// coefficients poly[j] on x^j; raises singular_error when a cell cannot
// resolve the square class of P
ShellFunction multiply_by_eta_poly(const ShellFunction& f, const MultChar& eta,
                                   const std::vector<Rat>& poly);

// restriction of a rank-1 cell function to Q_p^*; exact on [wmin, wmax],
// constant tail upward for cells containing 0. Raises window_error if the
// window misses nonzero shells or cuts a tail before it stabilizes.
ShellFunction cell_to_shell(const CellFunction& f, ShellKind kind, long long wmin,
                            long long wmax);

// pointwise equality of materialized shells over a valuation box
bool equal_on_box(const ShellFunction& f, const ShellFunction& g,
                  const std::vector<long long>& lo, const std::vector<long long>& hi);

} // namespace hankel
