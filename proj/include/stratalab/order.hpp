#pragma once

#include <cassert>
#include <vector>

#include "embeddings.hpp"
#include "tower_linalg.hpp"

namespace stratalab {

// A p-adic scalar p^(-dexp) * u with u known mod p^tprec.
struct QpVal {
    Int u = 0;
    long dexp = 0;
    long tprec = 0;

    // p-adic valuation; tprec - dexp is a lower bound when u = 0 mod p^tprec
    long val(long p) const {
        Int x = u;
        if (x == 0) return tprec - dexp;
        long v = 0;
        while (x % p == 0 && v < tprec) {
            x /= p;
            ++v;
        }
        return v - dexp;
    }
    bool zero_at_prec(long p) const {
        Int m = pow_int(p, tprec);
        return ((u % m) + m) % m == 0;
    }
};

class ChainOrder;

// N x N matrix over F at precision: value p^(-delta) * M with entries of M
// known mod p^T.  Row r and column c carry chain weights; see ChainOrder.
struct FMat {
    const ChainOrder* ord = nullptr;
    long delta = 0;
    long T = 0;
    std::vector<Int> a;  // N*N row-major

    Int& at(long r, long c);
    const Int& at(long r, long c) const;
};

// The standard principal hereditary order attached to the identification
// V = E^m: the stabilizer of the lattice chain L_i = pi_E^i o_E^m.  Its
// radical powers have a monomial basis in the pi-graded coordinates of V:
// with row weight b_r and column weight b_c,
//
//   x in P^k  <=>  v_p(x_rc) >= ceil((k + b_c - b_r) / e)   for all (r, c),
//
// which drives the valuation nu_A, membership, and index computations.
class ChainOrder {
public:
    ChainOrder(TowerPtr E, long m, long T = 0)
        : E_(std::move(E)), m_(m) {
        F_ = std::make_shared<TowerField>(E_->p(), 1, 1, 0, E_->abs_prec());
        f_ = E_->f_abs();
        e_ = E_->e_abs();
        N_ = m_ * f_ * e_;
        T_ = T > 0 ? T : 2 * ceil_div(E_->abs_prec(), e_) + 8;
        mod_ = pow_int(p(), T_);
    }

    const TowerPtr& chain_field() const { return E_; }
    const TowerPtr& base_field() const { return F_; }
    long p() const { return E_->p(); }
    long m() const { return m_; }
    long N() const { return N_; }
    long e_chain() const { return e_; }
    long T() const { return T_; }
    const Int& modulus() const { return mod_; }

    // V-basis index (s, a, b) -> flat index; weight is b
    long vidx(long s, long a, long b) const { return (s * f_ + a) * e_ + b; }
    long weight(long i) const { return i % e_; }

    long lambda(long bcol, long brow, long k) const {
        return ceil_div(k + bcol - brow, e_);
    }

    // ----- FMat helpers -----
    FMat zero_mat(long delta = 0) const {
        FMat x;
        x.ord = this;
        x.delta = delta;
        x.T = T_;
        x.a.assign(N_ * N_, Int(0));
        return x;
    }
    FMat identity() const {
        FMat x = zero_mat();
        for (long i = 0; i < N_; ++i) x.a[i * N_ + i] = 1;
        return x;
    }

    Int reduce(const Int& v) const {
        Int r = v % mod_;
        if (r < 0) r += mod_;
        return r;
    }

    FMat add(const FMat& x, const FMat& y) const {
        long d = std::max(x.delta, y.delta);
        FMat r = zero_mat(d);
        Int sx = pow_int(p(), d - x.delta), sy = pow_int(p(), d - y.delta);
        r.T = std::min(x.T + (d - x.delta), y.T + (d - y.delta));
        r.T = std::min(r.T, T_);
        for (long i = 0; i < N_ * N_; ++i) r.a[i] = reduce(x.a[i] * sx + y.a[i] * sy);
        return r;
    }
    FMat neg(const FMat& x) const {
        FMat r = x;
        for (auto& v : r.a) v = reduce(-v);
        return r;
    }
    FMat sub(const FMat& x, const FMat& y) const { return add(x, neg(y)); }
    FMat mul(const FMat& x, const FMat& y) const {
        FMat r = zero_mat(x.delta + y.delta);
        r.T = std::min({x.T, y.T, T_});
        for (long i = 0; i < N_; ++i)
            for (long k = 0; k < N_; ++k) {
                const Int& v = x.a[i * N_ + k];
                if (v == 0) continue;
                for (long j = 0; j < N_; ++j) {
                    if (y.a[k * N_ + j] == 0) continue;
                    r.a[i * N_ + j] += v * y.a[k * N_ + j];
                }
            }
        for (auto& v : r.a) v = reduce(v);
        return r;
    }
    FMat scale_p(const FMat& x, long k) const {  // multiply by p^k
        FMat r = x;
        if (k >= 0) {
            Int c = pow_int(p(), k);
            for (auto& v : r.a) v = reduce(v * c);
        } else {
            r.delta = x.delta - k;
        }
        return r;
    }

    // trace as a p-adic scalar
    QpVal trace(const FMat& x) const {
        QpVal q;
        q.dexp = x.delta;
        q.tprec = x.T;
        Int acc = 0;
        for (long i = 0; i < N_; ++i) acc += x.a[i * N_ + i];
        q.u = reduce(acc);
        return q;
    }

    Elem qp_to_elem(const QpVal& q) const {
        Elem u = Elem::from_integer(F_, q.u);
        if (u.is_zero()) return Elem::zero(F_, std::min(u.abs_bound(), q.tprec) - q.dexp);
        Elem s = u.shift(-q.dexp);
        // knowledge limited by q.tprec
        return Elem::from_digits(F_, s.val(), s.digits(),
                                 std::min(s.abs_bound(), q.tprec - q.dexp));
    }

    // ----- embedding of chain-field elements -----

    // F-coordinates of an element y of E wrt the basis {x~^a pi^b} (unit
    // coefficient form shifted by the valuation).
    FMat embed_elem(const Elem& y) const {
        if (!y.field()->same_shape(*E_)) throw Error("embed_elem: wrong field");
        if (y.is_zero()) {
            FMat z = zero_mat();
            z.T = std::max<long>(1, std::min<long>(T_, ceil_div(y.abs_bound(), e_)));
            return z;
        }
        long v = y.val();
        FMat U = unit_mult_matrix(y);
        return mul(U, pi_pow(v));
    }

    // matrix of multiplication by pi^k on V (any k in Z):
    // pi^k : x~^a pi^b -> z^(-w) p^w x~^a pi^nb with w = floor((k+b)/e),
    // nb = (k+b) mod e.
    FMat pi_pow(long k) const {
        long u = std::max<long>(0, -floor_div(k, e_));
        FMat r = zero_mat(u);
        r.T = T_;
        long TT = T_;
        for (long s = 0; s < m_; ++s)
            for (long a = 0; a < f_; ++a)
                for (long b = 0; b < e_; ++b) {
                    long w = floor_div(k + b, e_);
                    long nb = mod_pos(k + b, e_);
                    TowerField::W c = E_->teich(
                        E_->residue().from_dlog(mod_pos(-w * E_->twist_log(),
                                                        E_->q() - 1)),
                        TT);
                    if (w + u < 0) throw Error("pi_pow: delta underflow");
                    Int pw = pow_int(p(), w + u);
                    TowerField::W shifted = shift_by_xa(c, a, TT);
                    for (long aa = 0; aa < f_; ++aa)
                        r.a[vidx(s, aa, nb) * N_ + vidx(s, a, b)] =
                            reduce(shifted[aa] * pw);
                }
        return r;
    }

    // matrix of multiplication by the unit part of y (val stripped)
    FMat unit_mult_matrix(const Elem& y) const {
        long want = std::min<long>(E_->abs_prec(),
                                   y.exact() ? E_->abs_prec() : y.abs_bound() - y.val());
        long TT = std::max<long>(T_, working_T(*E_, want));
        Elem::Coeffs co = y.to_coeffs(TT);
        FMat r = zero_mat();
        r.T = T_;
        TowerField::W zi = E_->teich(E_->residue().from_dlog(-E_->twist_log()), TT);
        for (long s = 0; s < m_; ++s)
            for (long a = 0; a < f_; ++a)
                for (long b = 0; b < e_; ++b) {
                    // y * x~^a pi^b = sum_j c_j x~^a pi^(j+b)
                    for (long j = 0; j < e_; ++j) {
                        if (E_->w_is_zero(co.c[j])) continue;
                        long wrap = (j + b) / e_;
                        long nb = (j + b) % e_;
                        TowerField::W c = shift_by_xa(co.c[j], a, TT);
                        if (wrap) c = E_->w_mul(c, zi, TT);
                        Int pw = pow_int(p(), wrap);
                        for (long aa = 0; aa < f_; ++aa) {
                            long row = vidx(s, aa, nb), col = vidx(s, a, b);
                            r.a[row * N_ + col] = reduce(r.a[row * N_ + col] + c[aa] * pw);
                        }
                    }
                }
        return r;
    }

    // ----- valuation / membership -----

    // nu_A(x); returns VAL_INF-style bound if x = 0 at precision.  The
    // second member reports whether the value is exact (some entry decided).
    std::pair<long, bool> nu_A_checked(const FMat& x) const {
        long best = VAL_INF;
        bool decided = false;
        for (long r = 0; r < N_; ++r)
            for (long c = 0; c < N_; ++c) {
                const Int& v = x.a[r * N_ + c];
                long vp;
                if (v == 0 || reduce(v) == 0)
                    vp = x.T;  // at least
                else {
                    Int w = reduce(v);
                    vp = 0;
                    while (w % p() == 0) {
                        w /= p();
                        ++vp;
                    }
                }
                long contrib = e_ * (vp - x.delta) + weight(r) - weight(c);
                if (vp < x.T) {
                    if (contrib < best) {
                        best = contrib;
                        decided = true;
                    }
                } else {
                    // undecided entry: only a lower bound
                    if (contrib < best) {
                        best = contrib;
                        decided = false;
                    }
                }
            }
        return {best, decided};
    }
    long nu_A(const FMat& x) const {
        auto [v, ok] = nu_A_checked(x);
        if (!ok && v < e_ * (x.T - x.delta) - e_)
            throw InsufficientPrecision("nu_A undecided at precision");
        return ok ? v : VAL_INF;
    }

    bool in_P_k(const FMat& x, long k) const {
        for (long r = 0; r < N_; ++r)
            for (long c = 0; c < N_; ++c) {
                long lam = lambda(weight(c), weight(r), k) + x.delta;
                if (lam <= 0) continue;
                if (lam > x.T) throw ModulusTooSmall("in_P_k beyond precision");
                Int m = pow_int(p(), lam);
                if ((x.a[r * N_ + c] % m + m) % m != 0) return false;
            }
        return true;
    }

    // matrix inverse via adjugate; throws SingularAtPrecision
    FMat inverse(const FMat& x) const {
        long n = N_;
        Int det = det_int(x.a, n);
        if (det == 0) throw SingularAtPrecision("determinant vanishes at precision");
        long d = 0;
        Int u = det;
        while (u % p() == 0) {
            u /= p();
            ++d;
            if (d >= x.T) throw SingularAtPrecision("determinant vanishes at precision");
        }
        long Tr = x.T - d;
        if (Tr <= 1) throw SingularAtPrecision("inverse loses all precision");
        ZpRing R(p(), Tr);
        Int uinv = R.unit_inv(u % R.modulus());
        FMat r = zero_mat();
        r.delta = d - x.delta;
        r.T = Tr;
        // adjugate: cofactors
        std::vector<Int> sub((n - 1) * (n - 1));
        for (long i = 0; i < n; ++i)
            for (long j = 0; j < n; ++j) {
                long idx = 0;
                for (long r2 = 0; r2 < n; ++r2) {
                    if (r2 == i) continue;
                    for (long c2 = 0; c2 < n; ++c2) {
                        if (c2 == j) continue;
                        sub[idx++] = x.a[r2 * n + c2];
                    }
                }
                Int cof = det_int(sub, n - 1);
                if ((i + j) % 2) cof = -cof;
                // adj[j][i] = cof
                r.a[j * n + i] = ((cof % R.modulus()) * uinv % R.modulus() + R.modulus()) %
                                 R.modulus();
            }
        return r;
    }

    // g normalizes the chain iff nu(g) + nu(g^{-1}) = 0
    bool in_normalizer(const FMat& g) const {
        FMat gi = inverse(g);
        auto [v1, ok1] = nu_A_checked(g);
        auto [v2, ok2] = nu_A_checked(gi);
        if (!ok1 || !ok2) throw InsufficientPrecision("in_normalizer undecided");
        return v1 + v2 == 0;
    }

private:
    static Int det_int(const std::vector<Int>& a, long n) {
        if (n == 1) return a[0];
        if (n == 2) return a[0] * a[3] - a[1] * a[2];
        Int acc = 0;
        std::vector<Int> sub((n - 1) * (n - 1));
        for (long j = 0; j < n; ++j) {
            if (a[j] == 0) continue;
            long idx = 0;
            for (long r = 1; r < n; ++r)
                for (long c = 0; c < n; ++c) {
                    if (c == j) continue;
                    sub[idx++] = a[r * n + c];
                }
            Int term = a[j] * det_int(sub, n - 1);
            if (j % 2)
                acc -= term;
            else
                acc += term;
        }
        return acc;
    }

    // multiply a W element by x~^a and reduce mod h
    TowerField::W shift_by_xa(const TowerField::W& c, long a, long TT) const {
        if (a == 0) return c;
        TowerField::W xa = E_->w_zero(TT);
        if (a < f_)
            xa[a] = 1;
        else
            throw Error("shift_by_xa: exponent out of range");
        return E_->w_mul(c, xa, TT);
    }

    TowerPtr E_, F_;
    long m_, f_, e_, N_, T_;
    Int mod_;
};

inline Int& FMat::at(long r, long c) { return a[r * ord->N() + c]; }
inline const Int& FMat::at(long r, long c) const { return a[r * ord->N() + c]; }

// ---------------------------------------------------------------------------
// Lattices in A = M_N(F), scaled-integral row modules in canonical Howell
// form.  All lattices handled here are full or sit inside an explicit
// p-power sandwich, so a working modulus p^T with margin captures them
// exactly; callers double T to certify discrete outputs.
// ---------------------------------------------------------------------------
struct ALattice {
    const ChainOrder* ord = nullptr;
    long delta = 0;  // lattice = p^-delta * (row span)
    long T = 0;
    HowellForm H;

    long dim() const { return ord->N() * ord->N(); }
    bool full_rank() const { return (long)H.rows.size() == dim(); }

    // sum of pivot valuations = log_p [o^D : span]
    long index_exp() const {
        if (!full_rank()) throw InsufficientPrecision("lattice not full rank at precision");
        long s = 0;
        for (long v : H.pivot_val) s += v;
        return s;
    }
};

inline ALattice lattice_from_rows(const ChainOrder& ord, Mat rows, long delta, long T) {
    ALattice L;
    L.ord = &ord;
    L.delta = delta;
    L.T = T;
    ZpRing R(ord.p(), T);
    L.H = howell(R, std::move(rows));
    return L;
}

inline Row fmat_to_row(const FMat& x, long target_delta) {
    Row r(x.a.size());
    long shift = target_delta - x.delta;
    if (shift < 0) throw Error("fmat_to_row: losing denominator");
    Int c = pow_int(x.ord->p(), shift);
    for (size_t i = 0; i < x.a.size(); ++i) r[i] = x.a[i] * c;
    return r;
}

inline ALattice lattice_from_fmats(const ChainOrder& ord, const std::vector<FMat>& gens,
                                   long T = 0) {
    if (T == 0) T = ord.T();
    long delta = 0;
    for (const auto& g : gens) delta = std::max(delta, g.delta);
    Mat rows;
    for (const auto& g : gens) rows.push_back(fmat_to_row(g, delta));
    return lattice_from_rows(ord, std::move(rows), delta, T);
}

// the monomial lattice P^k of the order
inline ALattice radical_power_lattice(const ChainOrder& ord, long k, long T = 0) {
    if (T == 0) T = ord.T();
    long N = ord.N();
    long delta = std::max<long>(0, -floor_div(k - (ord.e_chain() - 1), ord.e_chain()));
    Mat rows;
    rows.reserve(N * N);
    for (long r = 0; r < N; ++r)
        for (long c = 0; c < N; ++c) {
            long lam = ord.lambda(ord.weight(c), ord.weight(r), k) + delta;
            Row row(N * N, Int(0));
            row[r * N + c] = pow_int(ord.p(), std::max<long>(lam, 0));
            if (lam < 0) throw Error("radical_power_lattice: delta too small");
            rows.push_back(std::move(row));
        }
    return lattice_from_rows(ord, std::move(rows), delta, T);
}

inline bool lattice_member(const ALattice& L, const FMat& x) {
    if (x.delta > L.delta) {
        // x has a deeper denominator; try to peel provable p-divisibility
        long shift = x.delta - L.delta;
        Int c = pow_int(x.ord->p(), shift);
        Row r(x.a.size());
        for (size_t i = 0; i < x.a.size(); ++i) {
            Int v = x.ord->reduce(x.a[i]);
            if (v % c != 0) return false;
            r[i] = v / c;
        }
        ZpRing R(L.ord->p(), L.T);
        return howell_member(R, L.H, r);
    }
    ZpRing R(L.ord->p(), L.T);
    return howell_member(R, L.H, fmat_to_row(x, L.delta));
}

inline ALattice lattice_sum(const ALattice& a, const ALattice& b) {
    long delta = std::max(a.delta, b.delta);
    long T = std::min(a.T, b.T);
    Mat rows;
    Int ca = pow_int(a.ord->p(), delta - a.delta), cb = pow_int(a.ord->p(), delta - b.delta);
    for (const auto& r : a.H.rows) {
        Row s(r.size());
        for (size_t i = 0; i < r.size(); ++i) s[i] = r[i] * ca;
        rows.push_back(std::move(s));
    }
    for (const auto& r : b.H.rows) {
        Row s(r.size());
        for (size_t i = 0; i < r.size(); ++i) s[i] = r[i] * cb;
        rows.push_back(std::move(s));
    }
    return lattice_from_rows(*a.ord, std::move(rows), delta, T);
}

inline bool lattice_subset(const ALattice& inner, const ALattice& outer) {
    ZpRing R(inner.ord->p(), std::min(inner.T, outer.T));
    for (const auto& r : inner.H.rows) {
        FMat x = inner.ord->zero_mat(inner.delta);
        x.a.assign(r.begin(), r.end());
        if (!lattice_member(outer, x)) return false;
    }
    return true;
}

inline bool lattice_equal(const ALattice& a, const ALattice& b) {
    return lattice_subset(a, b) && lattice_subset(b, a);
}

// |Lambda1 / Lambda2| as a p-power exponent; throws NotContained.
inline long quotient_size_exp(const ALattice& l1, const ALattice& l2) {
    if (!lattice_subset(l2, l1)) throw NotContained("quotient_size: not contained");
    long e1 = l1.index_exp() - l1.delta * l1.dim();
    long e2 = l2.index_exp() - l2.delta * l2.dim();
    return e2 - e1;
}

inline Int quotient_size(const ALattice& l1, const ALattice& l2) {
    return pow_int(l1.ord->p(), quotient_size_exp(l1, l2));
}

}  // namespace stratalab
