#pragma once

#include <algorithm>
#include <memory>
#include <vector>

#include "tower.hpp"

namespace stratalab {

// A subfield K of a tame tower E, presented by (f1, e1, a1):
//
//     zeta_K = zeta^((q-1)/(q1-1)),   pi_K = [zeta^a1] * pi^(e/e1).
//
// Every subfield of a tame tower has such a presentation: a subfield is tame,
// so it admits a uniformizer with pi_K^e1 * z1 = p, and any solution of that
// pure equation inside E is a Teichmueller monomial.  a1 is reduced modulo
// idx = (q-1)/(q1-1); distinct residues give distinct (conjugate) subfields.
class Subfield {
public:
    Subfield(TowerPtr amb, long f1, long e1, long a1)
        : amb_(std::move(amb)), f1_(f1), e1_(e1) {
        const TowerField& E = *amb_;
        if (E.f_abs() % f1 || E.e_abs() % e1) throw NotSubfield("degree mismatch");
        q1_ = 1;
        for (long i = 0; i < f1; ++i) q1_ *= E.p();
        idx_ = (E.q() - 1) / (q1_ - 1);
        a1_ = mod_pos(a1, idx_);
        long num = E.twist_log() - a1_ * e1_;
        if (mod_pos(num, idx_) != 0) throw NotSubfield("twist incompatible");
        long t1 = mod_pos(num / idx_, q1_ - 1);  // exact division
        self_ = std::make_shared<TowerField>(E.p(), f1, e1, t1, E.abs_prec());
    }

    const TowerPtr& ambient() const { return amb_; }
    const TowerPtr& field() const { return self_; }  // intrinsic presentation
    long f1() const { return f1_; }
    long e1() const { return e1_; }
    long a1() const { return a1_; }
    long q1() const { return q1_; }
    long idx() const { return idx_; }
    long degree() const { return f1_ * e1_; }
    long rel_e() const { return amb_->e_abs() / e1_; }
    long rel_f() const { return amb_->f_abs() / f1_; }
    long rel_degree() const { return rel_e() * rel_f(); }
    bool is_whole() const { return degree() == amb_->degree(); }
    bool is_base() const { return degree() == 1; }

    bool same_as(const Subfield& o) const {
        return f1_ == o.f1_ && e1_ == o.e1_ && a1_ == o.a1_;
    }

    // Is the ambient monomial [s] pi^k (s given by dlog) in C_K?
    bool contains_monomial_dlog(long s_dlog, long k) const {
        if (mod_pos(k, rel_e()) != 0) return false;
        long dd = k / rel_e();
        return mod_pos(s_dlog - dd * a1_, idx_) == 0;
    }
    bool contains_monomial(long s_index, long k) const {
        if (s_index == 0) return true;
        return contains_monomial_dlog(amb_->residue().dlog(s_index), k);
    }

    // Residue subfield membership and transfer.
    bool residue_contains(long s_index) const {
        if (s_index == 0) return true;
        return mod_pos(amb_->residue().dlog(s_index), idx_) == 0;
    }
    long residue_to_intrinsic(long s_index) const {
        if (s_index == 0) return 0;
        long l = amb_->residue().dlog(s_index);
        if (mod_pos(l, idx_) != 0) throw NotSubfield("residue not in subfield");
        return self_->residue().from_dlog(l / idx_);
    }
    long residue_embed(long s1_index) const {
        if (s1_index == 0) return 0;
        return amb_->residue().from_dlog(self_->residue().dlog(s1_index) * idx_);
    }

    // K contains the other subfield K' (both of the same ambient)?
    bool contains_subfield(const Subfield& o) const {
        if (o.f1_ == 1 && o.e1_ == 1) return true;
        if (f1_ % o.f1_ || e1_ % o.e1_) return false;
        // generators of K': zeta_{K'} and pi_{K'} = [zeta^{a1'}] pi^{e/e1'}
        if (mod_pos(o.idx_, idx_) != 0) return false;  // zeta_{K'} in C_K
        return contains_monomial_dlog(o.a1_, amb_->e_abs() / o.e1_);
    }

    // exact membership of an element: every digit monomial must lie in C_K
    bool contains(const Elem& x) const {
        if (x.is_zero()) return true;
        for (size_t i = 0; i < x.digits().size(); ++i) {
            long d = x.digits()[i];
            if (d == 0) continue;
            if (!contains_monomial(d, x.val() + (long)i)) return false;
        }
        return true;
    }

    // intrinsic K-element -> ambient E-element (digit map, exact)
    Elem embed(const Elem& y) const {
        if (!y.field()->same_shape(*self_)) throw NotSubfield("embed: wrong field");
        if (y.is_zero())
            return Elem::zero(amb_, y.exact() ? PREC_EXACT : y.abs_bound() * rel_e());
        std::vector<long> digs;
        long v = y.val() * rel_e();
        digs.assign((long)y.digits().size() * rel_e() - rel_e() + 1, 0);
        const FqCtx& kE = amb_->residue();
        for (size_t i = 0; i < y.digits().size(); ++i) {
            long d = y.digits()[i];
            if (d == 0) continue;
            long dd = y.val() + (long)i;  // intrinsic pi_K exponent
            long lg = mod_pos(self_->residue().dlog(d) * idx_ + dd * a1_, amb_->q() - 1);
            digs[i * rel_e()] = kE.from_dlog(lg);
        }
        long bound = y.exact() ? PREC_EXACT : y.abs_bound() * rel_e();
        return Elem::from_digits(amb_, v, std::move(digs), bound);
    }

    // ambient element -> intrinsic K-element; throws NotSubfield if some
    // digit monomial falls outside C_K
    Elem to_intrinsic(const Elem& x) const {
        if (!x.field()->same_shape(*amb_)) throw NotSubfield("to_intrinsic: wrong field");
        if (x.is_zero())
            return Elem::zero(self_, x.exact() ? PREC_EXACT
                                               : ceil_div(x.abs_bound(), rel_e()));
        if (mod_pos(x.val(), rel_e()) != 0) throw NotSubfield("valuation not divisible");
        long v1 = x.val() / rel_e();
        std::vector<long> digs;
        for (size_t i = 0; i < x.digits().size(); ++i) {
            long d = x.digits()[i];
            long k = x.val() + (long)i;
            if (d == 0) {
                if (mod_pos(k, rel_e()) == 0) digs.push_back(0);
                continue;
            }
            if (mod_pos(k, rel_e()) != 0) throw NotSubfield("digit position");
            long dd = floor_div(k, rel_e());
            long l = amb_->residue().dlog(d);
            if (mod_pos(l - dd * a1_, idx_) != 0) throw NotSubfield("digit residue");
            digs.push_back(self_->residue().from_dlog(
                mod_pos((l - dd * a1_) / idx_, q1_ - 1)));  // exact division
        }
        long bound = x.exact() ? PREC_EXACT : floor_div(x.abs_bound() + rel_e() - 1, rel_e());
        return Elem::from_digits(self_, v1, std::move(digs), bound);
    }

    // ambient pi_K and zeta_K as ambient elements
    Elem pi_ambient() const {
        return Elem::monomial(amb_, amb_->residue().from_dlog(a1_), rel_e());
    }
    Elem zeta_ambient() const {
        return Elem::teichmuller(amb_, amb_->residue().from_dlog(idx_));
    }

    // All subfields of E, sorted by (degree, f1, e1, a1).
    static std::vector<Subfield> enumerate(const TowerPtr& E) {
        std::vector<Subfield> out;
        long f = E->f_abs(), e = E->e_abs();
        for (long f1 = 1; f1 <= f; ++f1) {
            if (f % f1) continue;
            for (long e1 = 1; e1 <= e; ++e1) {
                if (e % e1) continue;
                long q1 = 1;
                for (long i = 0; i < f1; ++i) q1 *= E->p();
                long idx = (E->q() - 1) / (q1 - 1);
                for (long a1 = 0; a1 < idx; ++a1) {
                    if (mod_pos(E->twist_log() - a1 * e1, idx) != 0) continue;
                    out.emplace_back(E, f1, e1, a1);
                }
            }
        }
        std::sort(out.begin(), out.end(), [](const Subfield& a, const Subfield& b) {
            if (a.degree() != b.degree()) return a.degree() < b.degree();
            if (a.f1_ != b.f1_) return a.f1_ < b.f1_;
            if (a.e1_ != b.e1_) return a.e1_ < b.e1_;
            return a.a1_ < b.a1_;
        });
        return out;
    }

    static Subfield whole(const TowerPtr& E) {
        return Subfield(E, E->f_abs(), E->e_abs(), 0);
    }
    static Subfield base(const TowerPtr& E) {
        long idx = (E->q() - 1) / (E->p() - 1);
        return Subfield(E, 1, 1, mod_pos(E->twist_log(), idx));
    }

private:
    TowerPtr amb_;
    long f1_, e1_, a1_, q1_, idx_;
    TowerPtr self_;
};

// Smallest subfield of E containing all digit monomials of the given exact
// elements (and, if `over` is given, containing that subfield too).
inline Subfield subfield_generated(const TowerPtr& E, const std::vector<Elem>& xs,
                                   const Subfield* over = nullptr) {
    for (auto& K : Subfield::enumerate(E)) {
        if (over && !K.contains_subfield(*over)) continue;
        bool ok = true;
        for (const auto& x : xs)
            if (!K.contains(x)) {
                ok = false;
                break;
            }
        if (ok) return K;
    }
    throw Error("subfield_generated: no subfield found (unreachable)");
}

// Smallest subfield containing the element x = F[x]-as-a-subfield; x exact.
inline Subfield identify_subfield(const TowerPtr& E, const Elem& x) {
    return subfield_generated(E, {x});
}

// --- tower construction -----------------------------------------------------

// Build a tame tower over Q_p from user steps and normalize it to the
// two-step shape (maximal unramified, then totally tame).  The twist of a
// totally tame step is a residue element of the field built so far.
inline TowerPtr make_tower(long p, const std::vector<TowerStep>& steps, long abs_prec) {
    long f = 1, e = 1;
    long twist_dlog_scaled = 0;  // accumulated, in the final residue field
    // first pass: total f
    long f_total = 1;
    for (const auto& s : steps)
        if (s.kind == TowerStep::Unramified) f_total *= s.param;
    Int qf = pow_int(p, f_total);
    if (qf > 1000000) throw Error("make_tower: residue field too large");
    long Q = long(qf);
    // canonical residue contexts for intermediate fields are the (p, f_i)
    // FqCtx's; their generators map to zeta^((Q-1)/(q_i-1))
    for (const auto& s : steps) {
        if (s.kind == TowerStep::Unramified) {
            if (s.param < 1) throw Error("make_tower: bad unramified degree");
            f *= s.param;
        } else {
            if (s.param < 1) throw Error("make_tower: bad ramification degree");
            if (s.param % p == 0) throw NonTameStep("make_tower: p | e");
            if (s.twist_digit == 0) throw BadTwist("make_tower: zero twist");
            long qi = 1;
            for (long i = 0; i < f; ++i) qi *= p;
            FqCtx ki(p, f);
            long tl = ki.dlog(s.twist_digit);          // in intermediate field
            long tl_final = tl * ((Q - 1) / (qi - 1)); // image in final field
            // pi_old = pi_new^{e'} * z' ; pi_old^{e} * z = p
            // => pi_new^{e e'} * z'^{e} * z = p
            twist_dlog_scaled = mod_pos(tl_final * e + twist_dlog_scaled, Q - 1);
            e *= s.param;
        }
    }
    if (f != f_total) {
        // unramified steps after tame ones only enlarge the residue field;
        // the accumulated dlog is already expressed in the final field
        f = f_total;
    }
    auto F = std::make_shared<TowerField>(p, f, e, twist_dlog_scaled, abs_prec, steps);
    // re-evaluate the defining relation as a construction check
    Elem pi = Elem::uniformizer(F);
    Elem z = (F->twist_log() == 0)
                 ? Elem::one(F)
                 : Elem::teichmuller(F, F->residue().from_dlog(F->twist_log()));
    Elem lhs = pi.pow(e) * z;
    Elem rhs = Elem::from_integer(F, p);
    if (lhs.val() != e || !lhs.congruent_mod(rhs, std::min(lhs.abs_bound(), rhs.abs_bound())))
        throw Error("make_tower: defining relation failed re-evaluation");
    return F;
}

inline TowerPtr make_Qp(long p, long abs_prec) {
    return make_tower(p, {TowerStep{TowerStep::Unramified, 1, 0}}, abs_prec);
}

}  // namespace stratalab
