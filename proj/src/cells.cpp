#include "hankel/schwartz.hpp"

#include <cassert>

namespace hankel {

namespace {

long long small_pow(long long p, long long e) {
    long long r = 1;
    for (long long i = 0; i < e; ++i) {
        r *= p;
        assert(r < (1LL << 40));
    }
    return r;
}

} // namespace

Rat reduce_mod_level(const Rat& c, int k, long long p) {
    if (c == 0) return Rat(0);
    long long v = val_p(c, p);
    if (v >= k) return Rat(0);
    long long d = v < 0 ? -v : 0;
    long long m = small_pow(p, k + d);
    long long r = residue_mod(c * Rat(small_pow(p, d)), m, p);
    return Rat(r) / Rat(small_pow(p, d));
}

bool operator<(const Cell& a, const Cell& b) {
    if (a.level != b.level) return a.level < b.level;
    if (a.center != b.center) return a.center < b.center;
    return a.twist < b.twist;
}

CellFunction::CellFunction(const LocalField& K, int rank, int psi_sign)
    : K_(K), rank_(rank), psi_sign_(psi_sign) {
    assert(K.degree() == 1 && rank >= 1);
}

void CellFunction::add_term(const Spec& coeff, std::vector<Rat> center, std::vector<Rat> twist,
                            int level) {
    assert((int)center.size() == rank_ && (int)twist.size() == rank_);
    if (coeff.is_zero()) return;
    AddChar ps = psi();
    Spec c = coeff;
    for (int i = 0; i < rank_; ++i) {
        center[i] = reduce_mod_level(center[i], level, K_.p);
        Rat bred = reduce_mod_level(twist[i], -level, K_.p);
        // the discarded twist part is constant on the cell
        c *= Spec(ps((twist[i] - bred) * center[i]), K_.q());
        twist[i] = bred;
    }
    Cell key{level, std::move(center), std::move(twist)};
    auto it = terms_.find(key);
    if (it == terms_.end()) {
        terms_.emplace(std::move(key), std::move(c));
    } else {
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

void CellFunction::add_indicator(const Spec& coeff, std::vector<Rat> center, int level) {
    add_term(coeff, std::move(center), std::vector<Rat>(rank_, Rat(0)), level);
}

Spec CellFunction::value_at(const std::vector<Rat>& x) const {
    assert((int)x.size() == rank_);
    AddChar ps = psi();
    Spec r(Rat(0), K_.q());
    for (auto& [cell, coeff] : terms_) {
        bool in = true;
        for (int i = 0; i < rank_ && in; ++i) {
            Rat d = x[i] - cell.center[i];
            if (d != 0 && val_p(d, K_.p) < cell.level) in = false;
        }
        if (!in) continue;
        Spec v = coeff;
        for (int i = 0; i < rank_; ++i) v *= Spec(ps(cell.twist[i] * x[i]), K_.q());
        r += v;
    }
    return r;
}

Spec CellFunction::value_at(const std::vector<Padic>& x) const {
    assert((int)x.size() == rank_);
    AddChar ps = psi();
    Spec r(Rat(0), K_.q());
    for (auto& [cell, coeff] : terms_) {
        bool in = true;
        for (int i = 0; i < rank_ && in; ++i) {
            Padic d = x[i] - Padic(K_.p, cell.center[i]);
            if (d.approx() == 0) {
                if (d.prec() < cell.level)
                    throw precision_error("cell membership undecided", cell.level);
            } else if (val_p(d.approx(), K_.p) < cell.level) {
                in = false;
            }
        }
        if (!in) continue;
        Spec v = coeff;
        for (int i = 0; i < rank_; ++i)
            v *= Spec(ps(Padic(K_.p, cell.twist[i]) * x[i]), K_.q());
        r += v;
    }
    return r;
}

CellFunction CellFunction::operator-() const {
    CellFunction r(K_, rank_, psi_sign_);
    for (auto& [cell, coeff] : terms_) r.terms_.emplace(cell, -coeff);
    return r;
}

CellFunction& CellFunction::operator+=(const CellFunction& o) {
    assert(K_.p == o.K_.p && rank_ == o.rank_ && psi_sign_ == o.psi_sign_);
    for (auto& [cell, coeff] : o.terms_) {
        auto it = terms_.find(cell);
        if (it == terms_.end()) {
            terms_.emplace(cell, coeff);
        } else {
            it->second += coeff;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }
    return *this;
}

CellFunction operator*(const CellFunction& a, const CellFunction& b) {
    assert(a.K_.p == b.K_.p && a.rank_ == b.rank_ && a.psi_sign_ == b.psi_sign_);
    CellFunction r(a.K_, a.rank_, a.psi_sign_);
    for (auto& [ca, qa] : a.terms_)
        for (auto& [cb, qb] : b.terms_) {
            const Cell& fine = ca.level >= cb.level ? ca : cb;
            int kmin = std::min(ca.level, cb.level);
            bool meet = true;
            for (int i = 0; i < a.rank_ && meet; ++i) {
                Rat d = ca.center[i] - cb.center[i];
                if (d != 0 && val_p(d, a.K_.p) < kmin) meet = false;
            }
            if (!meet) continue;
            std::vector<Rat> twist(a.rank_);
            for (int i = 0; i < a.rank_; ++i) twist[i] = ca.twist[i] + cb.twist[i];
            r.add_term(qa * qb, fine.center, std::move(twist), fine.level);
        }
    return r;
}

CellFunction CellFunction::scaled(const Spec& c) const {
    CellFunction r(K_, rank_, psi_sign_);
    if (c.is_zero()) return r;
    for (auto& [cell, coeff] : terms_) r.terms_.emplace(cell, coeff * c);
    return r;
}

CellFunction CellFunction::conjugated() const {
    CellFunction r(K_, rank_, psi_sign_);
    for (auto& [cell, coeff] : terms_) {
        std::vector<Rat> twist(rank_);
        for (int i = 0; i < rank_; ++i) twist[i] = -cell.twist[i];
        r.add_term(coeff.conjugated(), cell.center, std::move(twist), cell.level);
    }
    return r;
}

bool CellFunction::operator==(const CellFunction& o) const {
    if (terms_.size() != o.terms_.size()) return false;
    auto it = o.terms_.begin();
    for (auto jt = terms_.begin(); jt != terms_.end(); ++jt, ++it) {
        if (jt->first.level != it->first.level || jt->first.center != it->first.center ||
            jt->first.twist != it->first.twist)
            return false;
        if (jt->second != it->second) return false;
    }
    return true;
}

CellFunction fourier_cell(const CellFunction& f) {
    const LocalField& K = f.field();
    const int n = f.rank();
    AddChar ps = f.psi();
    CellFunction r(K, n, f.psi_sign());
    for (auto& [cell, coeff] : f.terms()) {
        Spec c = coeff * Spec(rpow(Rat(K.q()), -(long long)cell.level * n), K.q());
        for (int i = 0; i < n; ++i) c *= Spec(ps(cell.center[i] * cell.twist[i]), K.q());
        std::vector<Rat> center(n), twist(n);
        for (int i = 0; i < n; ++i) {
            center[i] = -cell.twist[i];
            twist[i] = cell.center[i];
        }
        r.add_term(c, std::move(center), std::move(twist), -cell.level);
    }
    return r;
}

Spec integral_cell(const CellFunction& f) {
    const LocalField& K = f.field();
    const int n = f.rank();
    AddChar ps = f.psi();
    Spec r(Rat(0), K.q());
    for (auto& [cell, coeff] : f.terms()) {
        bool dual = true;
        for (int i = 0; i < n && dual; ++i)
            if (cell.twist[i] != 0 && val_p(cell.twist[i], K.p) < -cell.level) dual = false;
        if (!dual) continue;
        Spec c = coeff * Spec(rpow(Rat(K.q()), -(long long)cell.level * n), K.q());
        for (int i = 0; i < n; ++i) c *= Spec(ps(cell.center[i] * cell.twist[i]), K.q());
        r += c;
    }
    return r;
}

Spec pair_cells(const CellFunction& f, const CellFunction& g) {
    return integral_cell(f * g.conjugated());
}

} // namespace hankel
