#pragma once

#include <climits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "fq.hpp"
#include "howell.hpp"
#include "numeric.hpp"

namespace stratalab {

// Absolute-precision sentinel: the element's digit string is its complete
// expansion (finitely many nonzero digits, all later digits zero).
inline constexpr long PREC_EXACT = LONG_MAX / 4;
// val() of an element that is zero at its stated precision.
inline constexpr long VAL_INF = LONG_MAX / 2;

struct TowerStep {
    enum Kind { Unramified, TotallyTame } kind;
    long param;       // f for unramified, e for totally tame
    long twist_digit; // packed F_q index of the twist z (totally tame only)
};

// A tame finite extension E of F = Q_p, normalized to a two-step tower:
// the maximal unramified subfield Q_p(zeta), zeta a Teichmueller generator
// of mu_{q-1}, followed by a totally tame step pi with
//
//     pi^e * zeta^twist = p            (gcd(e, p) = 1)
//
// held exactly in the representation.  Elements carry Teichmueller digit
// expansions sum s_j pi^j with s_j in mu_{q-1} u {0}; arithmetic routes
// through a coefficient form over the unramified ring Z/p^T [x]/(h).
class TowerField {
public:
    TowerField(long p, long f, long e, long twist_log, long abs_prec,
               std::vector<TowerStep> steps = {})
        : res_(p, f), e_(e), twist_log_(mod_pos(twist_log, pow_int_long(p, f) - 1)),
          abs_prec_(abs_prec), steps_(std::move(steps)) {
        if (abs_prec < 1) throw Error("abs_prec must be >= 1");
        if (gcd_long(e, p) != 0 && gcd_long(e, p) != 1) throw NonTameStep("p divides e");
        if (e % p == 0) throw NonTameStep("p divides e");
    }

    long p() const { return res_.p(); }
    long f_abs() const { return res_.f(); }
    long e_abs() const { return e_; }
    long degree() const { return e_ * res_.f(); }
    long q() const { return res_.q(); }
    long twist_log() const { return twist_log_; }
    long abs_prec() const { return abs_prec_; }
    const FqCtx& residue() const { return res_; }
    const std::vector<TowerStep>& steps() const { return steps_; }

    bool same_shape(const TowerField& o) const {
        return p() == o.p() && f_abs() == o.f_abs() && e_abs() == o.e_abs() &&
               twist_log_ == o.twist_log_;
    }

    std::string id() const {
        return "p" + std::to_string(p()) + ".f" + std::to_string(f_abs()) + ".e" +
               std::to_string(e_abs()) + ".t" + std::to_string(twist_log_);
    }

    // ----- unramified coefficient ring W_T = Z/p^T [x]/(h) -----
    //
    // h is the canonical primitive polynomial of the residue field lifted
    // with coefficients in [0, p).  W_T is the unramified extension ring of
    // Z/p^T; omega below is its Teichmueller generator (the limit of
    // x^(q^k)), so mu_{q-1} = { omega^k } exactly mod p^T.

    using W = std::vector<Int>;  // f coefficients, reduced mod p^T

    W w_zero(long /*T*/) const { return W(res_.f(), Int(0)); }
    W w_one(long /*T*/) const {
        W w(res_.f(), Int(0));
        w[0] = 1;
        return w;
    }

    W w_add(const W& a, const W& b, long T) const {
        Int m = pow_int(p(), T);
        W r(res_.f());
        for (long i = 0; i < res_.f(); ++i) {
            r[i] = (a[i] + b[i]) % m;
        }
        return r;
    }
    W w_sub(const W& a, const W& b, long T) const {
        Int m = pow_int(p(), T);
        W r(res_.f());
        for (long i = 0; i < res_.f(); ++i) {
            r[i] = ((a[i] - b[i]) % m + m) % m;
        }
        return r;
    }
    W w_mul(const W& a, const W& b, long T) const {
        Int m = pow_int(p(), T);
        long f = res_.f();
        std::vector<Int> prod(2 * f - 1, Int(0));
        for (long i = 0; i < f; ++i) {
            if (a[i] == 0) continue;
            for (long j = 0; j < f; ++j) prod[i + j] += a[i] * b[j];
        }
        const auto& h = res_.poly();
        for (long d = 2 * f - 2; d >= f; --d) {
            if (prod[d] == 0) continue;
            Int c = prod[d] % m;
            prod[d] = 0;
            for (long i = 0; i < f; ++i) prod[d - f + i] -= c * h[i];
        }
        W r(f);
        for (long i = 0; i < f; ++i) r[i] = ((prod[i] % m) + m) % m;
        return r;
    }
    W w_scale(const W& a, const Int& c, long T) const {
        Int m = pow_int(p(), T);
        W r(res_.f());
        for (long i = 0; i < res_.f(); ++i) r[i] = ((a[i] * c) % m + m) % m;
        return r;
    }
    W w_pow(W a, Int k, long T) const {
        W r = w_one(T);
        while (k > 0) {
            if ((k & 1) != 0) r = w_mul(r, a, T);
            a = w_mul(a, a, T);
            k >>= 1;
        }
        return r;
    }
    bool w_is_zero(const W& a) const {
        for (const auto& c : a)
            if (c != 0) return false;
        return true;
    }
    // min p-valuation over coefficients, capped at T
    long w_val(const W& a, long T) const {
        long best = T;
        for (const auto& c : a) {
            if (c == 0) continue;
            Int x = c;
            long v = 0;
            while (x % p() == 0 && v < best) {
                x /= p();
                ++v;
            }
            if (v < best) best = v;
        }
        return best;
    }
    W w_divp(const W& a, long T) const {  // exact division by p
        W r(res_.f());
        for (long i = 0; i < res_.f(); ++i) {
            if (a[i] % p() != 0) throw Error("w_divp: not divisible");
            r[i] = a[i] / p();
        }
        return r;
    }
    // residue in F_q (packed index)
    long w_residue(const W& a) const {
        std::vector<long> c(res_.f());
        for (long i = 0; i < res_.f(); ++i) c[i] = long(a[i] % p());
        return res_.from_coeffs(c);
    }

    // Teichmueller generator omega mod p^T (cached per T).
    const W& omega(long T) const {
        auto it = omega_cache_.find(T);
        if (it != omega_cache_.end()) return it->second;
        W om(res_.f(), Int(0));
        if (res_.f() == 1) {
            om[0] = mod_pos(-res_.poly()[0], p());
        } else {
            om[1] = 1;
        }
        // om <- om^p repeated f*(T+2) times stabilizes om = om^q mod p^T.
        for (long k = 0; k < res_.f() * (T + 2); ++k) om = w_pow(om, Int(p()), T);
        // sanity: omega^(q-1) = 1 exactly mod p^T
        W chk = w_pow(om, Int(q() - 1), T);
        if (!(chk == w_one(T))) throw Error("omega: Teichmueller iteration failed");
        return omega_cache_.emplace(T, std::move(om)).first->second;
    }

    // Teichmueller lift of a residue element (packed index) mod p^T.
    W teich(long fq_index, long T) const {
        if (fq_index == 0) return w_zero(T);
        return w_pow(omega(T), Int(res_.dlog(fq_index)), T);
    }

private:
    static long pow_int_long(long p, long f) {
        long r = 1;
        for (long i = 0; i < f; ++i) r *= p;
        return r;
    }

    FqCtx res_;
    long e_;
    long twist_log_;
    long abs_prec_;
    std::vector<TowerStep> steps_;
    mutable std::map<long, W> omega_cache_;
};

using TowerPtr = std::shared_ptr<const TowerField>;

// ---------------------------------------------------------------------------
// Elem: Teichmueller digit expansion at tracked absolute precision.
//
// digits()[k] is the F_q index of the digit of pi^(val+k); digits()[0] != 0.
// The element is known modulo pi^abs_bound; digits beyond the stored string
// up to abs_bound are zero.  abs_bound == PREC_EXACT means the string is the
// whole expansion.
// ---------------------------------------------------------------------------
class Elem {
public:
    Elem() : fld_(nullptr), val_(0), bound_(0) {}

    static Elem zero(TowerPtr F, long bound = PREC_EXACT) {
        Elem x;
        x.fld_ = std::move(F);
        x.val_ = 0;
        x.bound_ = bound;
        return x;
    }
    static Elem from_digits(TowerPtr F, long val, std::vector<long> digs,
                            long bound = PREC_EXACT) {
        Elem x;
        x.fld_ = std::move(F);
        x.val_ = val;
        x.dig_ = std::move(digs);
        x.bound_ = bound;
        x.normalize();
        return x;
    }
    static Elem monomial(TowerPtr F, long fq_index, long pi_exp) {
        return from_digits(std::move(F), pi_exp, {fq_index});
    }
    static Elem one(TowerPtr F) { return monomial(std::move(F), 1, 0); }
    static Elem uniformizer(TowerPtr F) { return monomial(std::move(F), 1, 1); }
    // Teichmueller lift as an element: exact by construction.
    static Elem teichmuller(TowerPtr F, long fq_index) {
        if (fq_index == 0) throw ZeroResidue("teichmuller of zero residue");
        return monomial(std::move(F), fq_index, 0);
    }
    static Elem from_integer(TowerPtr F, const Int& n);

    const TowerPtr& field() const { return fld_; }
    bool is_zero() const { return dig_.empty(); }
    long abs_bound() const { return bound_; }
    bool exact() const { return bound_ >= PREC_EXACT; }
    const std::vector<long>& digits() const { return dig_; }

    long val() const { return dig_.empty() ? VAL_INF : val_; }
    Rat ord_abs() const {
        if (dig_.empty()) throw ZeroElement("ord_abs of (known-)zero element");
        return Rat(val_, fld_->e_abs());
    }
    long leading_digit() const {
        if (dig_.empty()) throw ZeroElement("leading_digit of zero");
        return dig_[0];
    }
    // digit at absolute position k (F_q index), 0 beyond the string
    long digit_at(long k) const {
        if (dig_.empty()) return 0;
        long i = k - val_;
        if (i < 0 || i >= (long)dig_.size()) return 0;
        return dig_[i];
    }

    Elem operator-() const {
        Elem r = *this;
        const FqCtx& k = fld_->residue();
        for (auto& d : r.dig_) d = k.neg(d);
        return r;
    }

    Elem operator+(const Elem& o) const { return add_impl(o, false); }
    Elem operator-(const Elem& o) const { return add_impl(o, true); }
    Elem operator*(const Elem& o) const;
    Elem inverse() const;
    Elem operator/(const Elem& o) const { return *this * o.inverse(); }
    Elem pow(long k) const;

    // multiply by pi^k (exactness preserved)
    Elem shift(long k) const {
        Elem r = *this;
        if (!r.dig_.empty()) r.val_ += k;
        if (r.bound_ < PREC_EXACT) r.bound_ += k;
        return r;
    }

    // the partial sum of digits with pi-exponent < cutoff
    Elem truncate_below(long cutoff) const {
        if (bound_ < cutoff)
            throw InsufficientPrecision("truncate_below beyond known precision");
        Elem r = *this;
        if (r.dig_.empty()) {
            r.bound_ = PREC_EXACT;  // zero up to cutoff, exactly
            return r;
        }
        long keep = cutoff - val_;
        if (keep < (long)r.dig_.size()) r.dig_.resize(std::max<long>(keep, 0));
        r.bound_ = PREC_EXACT;  // a finite digit string, fully known
        r.normalize();
        return r;
    }

    // agreement modulo pi^m (within the precision actually known)
    bool congruent_mod(const Elem& o, long m) const {
        if (std::min(bound_, o.bound_) < m)
            throw InsufficientPrecision("congruent_mod beyond known precision");
        long lo = std::min(dig_.empty() ? m : val_, o.dig_.empty() ? m : o.val_);
        long end1 = dig_.empty() ? lo : val_ + (long)dig_.size();
        long end2 = o.dig_.empty() ? lo : o.val_ + (long)o.dig_.size();
        long hi = std::min(m, std::max(end1, end2));  // digits beyond are zero
        for (long k = lo; k < hi; ++k)
            if (digit_at(k) != o.digit_at(k)) return false;
        return true;
    }
    bool identical_to(const Elem& o) const {
        return val_ == o.val_ && dig_ == o.dig_ && bound_ == o.bound_;
    }

    // ----- coefficient form bridge -----
    struct Coeffs {
        long T = 0;
        std::vector<TowerField::W> c;  // e entries: value = sum c_j pi^j (unit-level)
    };
    // coefficient form of the digit string (ignoring val shift), at precision T
    Coeffs to_coeffs(long T) const;
    // extract up to `want` digits from a coefficient form; returns digits and
    // the pi-valuation offset of the first digit (relative to the form)
    static std::pair<long, std::vector<long>> extract_digits(const TowerField& F, Coeffs c,
                                                             long want);

    std::string str() const;

private:
    Elem add_impl(const Elem& o, bool sub) const;
    // drop digits at positions >= bound_
    void clip() {
        if (bound_ >= PREC_EXACT || dig_.empty()) return;
        long keep = bound_ - val_;
        if (keep <= 0)
            dig_.clear();
        else if (keep < (long)dig_.size())
            dig_.resize(keep);
    }
    void normalize() {
        clip();
        while (!dig_.empty() && dig_.back() == 0) dig_.pop_back();
        if (!dig_.empty() && dig_[0] == 0) {
            size_t lead = 0;
            while (lead < dig_.size() && dig_[lead] == 0) ++lead;
            val_ += (long)lead;
            dig_.erase(dig_.begin(), dig_.begin() + lead);
        }
        if (dig_.empty() && bound_ >= PREC_EXACT) bound_ = PREC_EXACT;
    }

    TowerPtr fld_;
    long val_;
    std::vector<long> dig_;
    long bound_;
};

// ----- Elem implementation -----

inline Elem::Coeffs Elem::to_coeffs(long T) const {
    const TowerField& F = *fld_;
    long e = F.e_abs();
    Coeffs co;
    co.T = T;
    co.c.assign(e, F.w_zero(T));
    // z^{-1} p, the wrap factor for pi^e
    TowerField::W zinv_p = F.w_scale(F.teich(F.residue().from_dlog(-F.twist_log()), T),
                                     Int(F.p()), T);
    TowerField::W wrap = F.w_one(T);
    long wrap_pow = 0;
    for (size_t k = 0; k < dig_.size(); ++k) {
        if (dig_[k] == 0) continue;
        long j = (long)k % e, a = (long)k / e;
        while (wrap_pow < a) {
            wrap = F.w_mul(wrap, zinv_p, T);
            ++wrap_pow;
        }
        if (wrap_pow != a) {  // digits are scanned in order, so only forward
            wrap = F.w_one(T);
            for (long i = 0; i < a; ++i) wrap = F.w_mul(wrap, zinv_p, T);
            wrap_pow = a;
        }
        co.c[j] = F.w_add(co.c[j], F.w_mul(F.teich(dig_[k], T), wrap, T), T);
    }
    return co;
}

inline std::pair<long, std::vector<long>> Elem::extract_digits(const TowerField& F, Coeffs co,
                                                               long want) {
    long e = F.e_abs();
    long T = co.T;
    TowerField::W z = F.teich(F.residue().from_dlog(F.twist_log()), T);
    // locate valuation: smallest e*vp(c_j) + j
    long v = LONG_MAX;
    for (long j = 0; j < e; ++j) {
        long w = F.w_val(co.c[j], T);
        if (w < T) v = std::min(v, e * w + j);
    }
    if (v == LONG_MAX) return {0, {}};  // zero at this precision
    // divide by pi^v: repeated single-pi division
    for (long s = 0; s < v; ++s) {
        TowerField::W c0 = co.c[0];
        if (F.w_val(c0, T) < 1) throw Error("extract_digits: misaligned valuation");
        for (long j = 0; j + 1 < e; ++j) co.c[j] = co.c[j + 1];
        co.c[e - 1] = F.w_mul(z, F.w_divp(c0, T), T - 0);
    }
    std::vector<long> digs;
    digs.reserve(want);
    for (long k = 0; k < want; ++k) {
        long r = F.w_residue(co.c[0]);
        digs.push_back(r);
        if (r != 0) co.c[0] = F.w_sub(co.c[0], F.teich(r, T), T);
        // divide by pi
        TowerField::W c0 = co.c[0];
        for (long j = 0; j + 1 < e; ++j) co.c[j] = co.c[j + 1];
        co.c[e - 1] = F.w_mul(z, F.w_divp(c0, T), T);
    }
    return {v, digs};
}

inline long working_T(const TowerField& F, long window) {
    return ceil_div(window + 2 * F.e_abs(), F.e_abs()) + 2;
}

inline Elem Elem::add_impl(const Elem& o, bool sub) const {
    if (!fld_ || !o.fld_ || !fld_->same_shape(*o.fld_))
        throw Error("Elem: mixed fields in arithmetic");
    const TowerField& F = *fld_;
    Elem rhs = sub ? -o : o;
    if (dig_.empty() && rhs.dig_.empty())
        return Elem::zero(fld_, std::min(bound_, rhs.bound_));
    if (dig_.empty()) {
        Elem r = rhs;
        r.bound_ = std::min(bound_, rhs.bound_);
        r.clip();
        return r;
    }
    if (rhs.dig_.empty()) {
        Elem r = *this;
        r.bound_ = std::min(bound_, rhs.bound_);
        r.clip();
        return r;
    }
    // disjoint digit-position fast path keeps exactness
    long bound = std::min(bound_, rhs.bound_);
    {
        bool disjoint = true;
        for (long k = std::min(val_, rhs.val_);
             k <= std::max(val_ + (long)dig_.size(), rhs.val_ + (long)rhs.dig_.size()); ++k)
            if (digit_at(k) != 0 && rhs.digit_at(k) != 0) {
                disjoint = false;
                break;
            }
        if (disjoint) {
            long lo = std::min(val_, rhs.val_);
            long hi = std::max(val_ + (long)dig_.size(), rhs.val_ + (long)rhs.dig_.size());
            std::vector<long> digs(hi - lo, 0);
            for (long k = lo; k < hi; ++k) {
                long d = digit_at(k);
                digs[k - lo] = d ? d : rhs.digit_at(k);
            }
            return from_digits(fld_, lo, std::move(digs), bound);
        }
    }
    long lo = std::min(val_, rhs.val_);
    long window_end = std::min(bound, lo + F.abs_prec());
    if (window_end <= lo) throw InsufficientPrecision("add: no overlapping window");
    long want = window_end - lo;
    // slack for leading-digit cancellation (valuation can rise by up to want)
    long T = working_T(F, 2 * want);
    // align both to valuation lo and add coefficient forms
    Coeffs ca = to_coeffs(T), cb = rhs.to_coeffs(T);
    auto shift_up = [&](Coeffs& c, long by) {  // multiply by pi^by, by >= 0
        const TowerField::W zp = F.w_scale(
            F.teich(F.residue().from_dlog(-F.twist_log()), T), Int(F.p()), T);
        for (long s = 0; s < by; ++s) {
            TowerField::W last = c.c[F.e_abs() - 1];
            for (long j = F.e_abs() - 1; j > 0; --j) c.c[j] = c.c[j - 1];
            c.c[0] = F.w_mul(last, zp, T);
        }
    };
    shift_up(ca, val_ - lo);
    shift_up(cb, rhs.val_ - lo);
    Coeffs sum;
    sum.T = T;
    sum.c.resize(F.e_abs());
    for (long j = 0; j < F.e_abs(); ++j) sum.c[j] = F.w_add(ca.c[j], cb.c[j], T);
    auto [dv, digs] = extract_digits(F, std::move(sum), want);
    if (digs.empty()) return Elem::zero(fld_, window_end);
    return from_digits(fld_, lo + dv, std::move(digs), window_end);
}

inline Elem Elem::operator*(const Elem& o) const {
    if (!fld_ || !o.fld_ || !fld_->same_shape(*o.fld_))
        throw Error("Elem: mixed fields in arithmetic");
    const TowerField& F = *fld_;
    if (dig_.empty() || o.dig_.empty()) {
        if ((dig_.empty() && exact()) || (o.dig_.empty() && o.exact()))
            return Elem::zero(fld_);  // exact zero annihilates
        long v1 = dig_.empty() ? bound_ : val_;
        long v2 = o.dig_.empty() ? o.bound_ : o.val_;
        return Elem::zero(fld_, v1 + v2);
    }
    // monomial fast path: digit-wise map, exactness preserved
    if (dig_.size() == 1 && exact()) {
        Elem r = o;
        const FqCtx& k = F.residue();
        for (auto& d : r.dig_) d = k.mul(d, dig_[0]);
        r.val_ += val_;
        if (r.bound_ < PREC_EXACT) r.bound_ += val_;
        r.normalize();
        return r;
    }
    if (o.dig_.size() == 1 && o.exact()) return o * *this;
    long v = val_ + o.val_;
    long rel1 = bound_ >= PREC_EXACT ? F.abs_prec() : bound_ - val_;
    long rel2 = o.bound_ >= PREC_EXACT ? F.abs_prec() : o.bound_ - o.val_;
    long want = std::min({rel1, rel2, F.abs_prec()});
    if (want <= 0) throw InsufficientPrecision("mul: no known digits");
    long T = working_T(F, want);
    Coeffs ca = to_coeffs(T), cb = o.to_coeffs(T);
    Coeffs prod;
    prod.T = T;
    prod.c.assign(F.e_abs(), F.w_zero(T));
    TowerField::W zp =
        F.w_scale(F.teich(F.residue().from_dlog(-F.twist_log()), T), Int(F.p()), T);
    for (long i = 0; i < F.e_abs(); ++i) {
        if (F.w_is_zero(ca.c[i])) continue;
        for (long j = 0; j < F.e_abs(); ++j) {
            if (F.w_is_zero(cb.c[j])) continue;
            TowerField::W t = F.w_mul(ca.c[i], cb.c[j], T);
            long k = i + j;
            if (k >= F.e_abs()) {
                k -= F.e_abs();
                t = F.w_mul(t, zp, T);
            }
            prod.c[k] = F.w_add(prod.c[k], t, T);
        }
    }
    auto [dv, digs] = extract_digits(F, std::move(prod), want);
    long bound = v + want;
    if (digs.empty()) return Elem::zero(fld_, bound);
    return from_digits(fld_, v + dv, std::move(digs), bound);
}

inline Elem Elem::inverse() const {
    if (dig_.empty()) throw ZeroElement("inverse of (known-)zero element");
    const TowerField& F = *fld_;
    if (dig_.size() == 1) {  // monomial: exact inverse
        return monomial(fld_, F.residue().inv(dig_[0]), -val_);
    }
    long rel = bound_ >= PREC_EXACT ? F.abs_prec() : bound_ - val_;
    long want = std::min(rel, F.abs_prec());
    long T = working_T(F, want);
    Coeffs cx = to_coeffs(T);
    // Newton iteration y <- y(2 - x y) on the unit part
    Coeffs y;
    y.T = T;
    y.c.assign(F.e_abs(), F.w_zero(T));
    y.c[0] = F.teich(F.residue().inv(dig_[0]), T);
    TowerField::W zp =
        F.w_scale(F.teich(F.residue().from_dlog(-F.twist_log()), T), Int(F.p()), T);
    auto cmul = [&](const Coeffs& a, const Coeffs& b) {
        Coeffs r;
        r.T = T;
        r.c.assign(F.e_abs(), F.w_zero(T));
        for (long i = 0; i < F.e_abs(); ++i) {
            if (F.w_is_zero(a.c[i])) continue;
            for (long j = 0; j < F.e_abs(); ++j) {
                if (F.w_is_zero(b.c[j])) continue;
                TowerField::W t = F.w_mul(a.c[i], b.c[j], T);
                long k = i + j;
                if (k >= F.e_abs()) {
                    k -= F.e_abs();
                    t = F.w_mul(t, zp, T);
                }
                r.c[k] = F.w_add(r.c[k], t, T);
            }
        }
        return r;
    };
    long steps = 1;
    while ((1L << steps) < want + 2 * F.e_abs()) ++steps;
    for (long s = 0; s <= steps; ++s) {
        Coeffs xy = cmul(cx, y);
        // 2 - xy
        Coeffs two_m;
        two_m.T = T;
        two_m.c.assign(F.e_abs(), F.w_zero(T));
        TowerField::W two = F.w_one(T);
        two[0] = Int(2) % pow_int(F.p(), T);
        two_m.c[0] = F.w_sub(two, xy.c[0], T);
        for (long j = 1; j < F.e_abs(); ++j)
            two_m.c[j] = F.w_sub(F.w_zero(T), xy.c[j], T);
        y = cmul(y, two_m);
    }
    auto [dv, digs] = extract_digits(F, std::move(y), want);
    if (digs.empty()) throw SingularAtPrecision("inverse lost all precision");
    return from_digits(fld_, -val_ + dv, std::move(digs), -val_ + want);
}

inline Elem Elem::pow(long k) const {
    if (k == 0) return one(fld_);
    if (k < 0) return inverse().pow(-k);
    Elem base = *this, r = one(fld_);
    while (k > 0) {
        if (k & 1) r = r * base;
        base = k > 1 ? base * base : base;
        k >>= 1;
    }
    return r;
}

inline Elem Elem::from_integer(TowerPtr F, const Int& n) {
    if (n == 0) return zero(std::move(F));
    const TowerField& Fr = *F;
    long want = Fr.abs_prec();
    long T = working_T(Fr, want) + 1;
    Coeffs co;
    co.T = T;
    co.c.assign(Fr.e_abs(), Fr.w_zero(T));
    Int m = pow_int(Fr.p(), T);
    co.c[0][0] = ((n % m) + m) % m;
    auto [dv, digs] = extract_digits(Fr, std::move(co), want);
    if (digs.empty()) return zero(std::move(F), want);
    return from_digits(std::move(F), dv, std::move(digs), dv + want);
}

inline std::string Elem::str() const {
    if (dig_.empty()) return exact() ? "0" : "O(pi^" + std::to_string(bound_) + ")";
    std::string s;
    for (size_t k = 0; k < dig_.size(); ++k) {
        if (dig_[k] == 0) continue;
        if (!s.empty()) s += " + ";
        s += "[" + std::to_string(dig_[k]) + "]pi^" + std::to_string(val_ + (long)k);
    }
    if (!exact()) s += " + O(pi^" + std::to_string(bound_) + ")";
    return s;
}

}  // namespace stratalab
