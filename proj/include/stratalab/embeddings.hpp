#pragma once

#include <vector>

#include "tower_linalg.hpp"

namespace stratalab {

// An F-embedding sigma : E' -> Omega between tame towers.  Such a map is
// determined by a Frobenius twist on the residue field and a Teichmueller
// monomial image of the uniformizer:
//
//   sigma(zeta') = (zeta_Omega^((q_O-1)/(q'-1)))^(p^c),
//   sigma(pi')   = [mu] * pi_Omega^(e_O/e'),
//
// with mu^(e') = z_Omega-relation-compatible.  It therefore acts on digit
// expansions monomial by monomial, exactly.
class FieldEmbedding {
public:
    FieldEmbedding(TowerPtr src, TowerPtr omega, long frob, long mu_dlog)
        : src_(std::move(src)), omega_(std::move(omega)), frob_(frob), mu_dlog_(mu_dlog) {
        scale_ = (omega_->q() - 1) / (src_->q() - 1);
        eshift_ = omega_->e_abs() / src_->e_abs();
        pc_ = 1;
        for (long i = 0; i < frob_; ++i) pc_ = (pc_ * src_->p()) % (omega_->q() - 1);
    }

    const TowerPtr& source() const { return src_; }
    const TowerPtr& target() const { return omega_; }
    long frob() const { return frob_; }
    long mu_dlog() const { return mu_dlog_; }

    // image of a residue element (by packed index)
    long map_residue(long s) const {
        if (s == 0) return 0;
        long l = src_->residue().dlog(s);
        return omega_->residue().from_dlog(mod_pos(l * scale_ * pc_, omega_->q() - 1));
    }

    Elem operator()(const Elem& x) const {
        if (!x.field()->same_shape(*src_)) throw Error("embedding: wrong source field");
        if (x.is_zero())
            return Elem::zero(omega_, x.exact() ? PREC_EXACT : x.abs_bound() * eshift_);
        std::vector<long> digs((x.digits().size() - 1) * eshift_ + 1, 0);
        for (size_t i = 0; i < x.digits().size(); ++i) {
            long d = x.digits()[i];
            if (d == 0) continue;
            long k = x.val() + (long)i;
            long lg = mod_pos(src_->residue().dlog(d) * scale_ * pc_ + k * mu_dlog_,
                              omega_->q() - 1);
            digs[i * eshift_] = omega_->residue().from_dlog(lg);
        }
        long bound = x.exact() ? PREC_EXACT : x.abs_bound() * eshift_;
        return Elem::from_digits(omega_, x.val() * eshift_, std::move(digs), bound);
    }

    bool operator==(const FieldEmbedding& o) const {
        return frob_ == o.frob_ && mu_dlog_ == o.mu_dlog_;
    }

private:
    TowerPtr src_, omega_;
    long frob_, mu_dlog_;
    long scale_, eshift_, pc_;
};

// A tower Omega containing an isomorphic copy of E' together with all of its
// F-conjugates.  The residue degree starts at lcm(f', ord_{e'}(p)) (so that
// mu_{e'} lives in the residue field) and grows until every Frobenius twist
// of the uniformizer relation is solvable, i.e. until
//     e' | t' * scale * (p^c - 1)   for all c < f'.
inline TowerPtr splitting_tower(const TowerPtr& Ep, long extra_f = 1) {
    long p = Ep->p(), f = Ep->f_abs(), e = Ep->e_abs();
    long base_f = lcm_long(lcm_long(f, mult_order(p, e)), extra_f);
    for (long k = 1; k <= 16; ++k) {
        long fo = base_f * k;
        Int qo_big = pow_int(p, fo);
        if (qo_big > (1 << 21)) break;
        long qo = long(qo_big);
        long scale = (qo - 1) / (Ep->q() - 1);
        bool ok = true;
        long pc = 1;
        for (long c = 0; c < f && ok; ++c) {
            Int rhs = Int(Ep->twist_log()) * scale * (pc - 1);
            if (rhs % e != 0) ok = false;
            pc = (pc * p) % (qo - 1);
        }
        if (!ok) continue;
        long prec = Ep->abs_prec();
        return std::make_shared<TowerField>(p, fo, e,
                                            mod_pos(Ep->twist_log() * scale, qo - 1), prec);
    }
    throw OmegaTooSmall("splitting_tower: no admissible residue degree found");
}

// All F-embeddings of E' into Omega.  Throws OmegaTooSmall unless exactly
// [E':F] embeddings exist.
inline std::vector<FieldEmbedding> embeddings_into(const TowerPtr& Ep, const TowerPtr& Om) {
    if (Om->p() != Ep->p()) throw OmegaTooSmall("different p");
    if (Om->f_abs() % Ep->f_abs() || Om->e_abs() % Ep->e_abs())
        throw OmegaTooSmall("degree does not divide");
    long e = Ep->e_abs();
    long qo = Om->q();
    long scale = (qo - 1) / (Ep->q() - 1);
    std::vector<FieldEmbedding> out;
    for (long c = 0; c < Ep->f_abs(); ++c) {
        long pc = 1;
        for (long i = 0; i < c; ++i) pc = (pc * Ep->p()) % (qo - 1);
        // sigma(z') has dlog t' * scale * p^c in Omega; mu must satisfy
        //   e * dlog(mu) == tO * (eO/e) ... derived from sigma(pi')^e sigma(z') = p
        // with sigma(pi') = [mu] piO^(eO/e):
        //   mu^e * piO^eO * sigma(z') = p = [zetaO^tO]^(-1)... careful:
        //   piO^eO * [zetaO^tO] = p   =>   mu^e = [zetaO^tO] * sigma(z')^(-1)
        long rhs = mod_pos(Om->twist_log() - Ep->twist_log() * scale * pc, qo - 1);
        long g = gcd_long(e, qo - 1);
        if (rhs % g != 0) continue;
        // solutions m of e*m == rhs (mod qo-1)
        long e_red = e / g, n_red = (qo - 1) / g, r_red = rhs / g;
        long einv = 1;
        for (long k = 1; k < n_red + 1; ++k)
            if ((k * e_red) % n_red == 1 % n_red) {
                einv = k;
                break;
            }
        long m0 = n_red == 1 ? 0 : mod_pos(r_red * einv, n_red);
        for (long j = 0; j < g; ++j) out.emplace_back(Ep, Om, c, m0 + j * n_red);
    }
    if ((long)out.size() != Ep->degree())
        throw OmegaTooSmall("expected " + std::to_string(Ep->degree()) + " embeddings, got " +
                            std::to_string(out.size()));
    return out;
}

// Group embeddings of E' by their restriction to the subfield K of E'
// (restriction identified by the images of K's generators).
inline std::vector<std::vector<FieldEmbedding>> group_by_restriction(
    const std::vector<FieldEmbedding>& embs, const Subfield& K) {
    Elem piK = K.pi_ambient();
    Elem zeK = K.zeta_ambient();
    std::vector<std::vector<FieldEmbedding>> groups;
    std::vector<std::pair<std::vector<long>, std::vector<long>>> keys;
    for (const auto& s : embs) {
        Elem a = s(piK), b = s(zeK);
        std::pair<std::vector<long>, std::vector<long>> key{
            {a.val(), a.leading_digit()}, {b.val(), b.leading_digit()}};
        bool found = false;
        for (size_t i = 0; i < keys.size(); ++i)
            if (keys[i] == key) {
                groups[i].push_back(s);
                found = true;
                break;
            }
        if (!found) {
            keys.push_back(key);
            groups.emplace_back(1, s);
        }
    }
    return groups;
}

}  // namespace stratalab
