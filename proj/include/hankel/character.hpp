#pragma once

#include "hankel/local_field.hpp"
#include "hankel/spectral.hpp"

#include <vector>

namespace hankel {

// Finite-order character of Z_p^* presented at level m, i.e. factoring
// through (Z/p^m)^*. Stored by its values on fixed generators: a primitive
// root chosen once per p (primitive mod p^2, hence mod every power), and
// (-1, 5) for p = 2. The same generators serve every level, so lifting the
// presentation level never changes stored values.
class UnitChar {
public:
    static UnitChar trivial(long long p);
    static UnitChar from_generator_values(long long p, int level, std::vector<Cyclo> values);
    static std::vector<UnitChar> all_of_level(long long p, int level);
    static std::vector<long long> generators(long long p, int level);

    long long p() const { return p_; }
    int level() const { return level_; }
    const std::vector<Cyclo>& generator_values() const { return gv_; }

    Cyclo operator()(const Rat& u) const; // u a p-adic unit
    int conductor() const;
    bool is_trivial() const;

    UnitChar at_level(int level) const; // raise the presentation level
    UnitChar times(const UnitChar& o) const;
    UnitChar inverse() const;
    UnitChar pow(long long k) const;

    bool operator==(const UnitChar& o) const;
    bool operator!=(const UnitChar& o) const { return !(*this == o); }

private:
    long long p_ = 2;
    int level_ = 0;
    std::vector<Cyclo> gv_;
};

// Character of Q_p^*: a finite-order unit part times a value at p. The
// value at p is a spectral scalar, so Satake coordinates and unramified
// twists |.|^s = t^{v(.)} stay symbolic.
struct MultChar {
    LocalField K;
    UnitChar unit;
    Spec at_p;

    static MultChar unramified(const LocalField& K, const Spec& at_p);
    // Norm-class character of the quadratic extension K(sqrt(D)): +1 on
    // norms, -1 off them. Built by sampling the norm probe on generators.
    static MultChar norm_class(const LocalField& K, const Rat& D);

    Spec eval(const Rat& x) const;
    MultChar times(const MultChar& o) const;
    MultChar inverse() const;
    MultChar pow(long long k) const;
    int conductor() const { return unit.conductor(); }

    bool operator==(const MultChar& o) const;
    bool operator!=(const MultChar& o) const { return !(*this == o); }
};

// Character of a split torus (Q_p^*)^r, one MultChar per coordinate.
struct TorusChar {
    std::vector<MultChar> comp;

    // Restriction along the cocharacter a -> (a^c1, ..., a^cr).
    MultChar pullback(const std::vector<int>& cochar) const;
};

} // namespace hankel
