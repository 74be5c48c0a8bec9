#pragma once

#include <optional>
#include <vector>

#include "subfield.hpp"

namespace stratalab {

// Relative linear algebra for E over a subfield K.  The K-basis of E is
// { zeta^alpha pi^b : alpha < rel_f, b < rel_e }.  Coordinates are obtained
// by a greedy digit descent: the leading digit monomial of the remainder is
// decomposed over the residue basis { zetabar^alpha } with k_K coefficients,
// the matching exact monomials are subtracted, and the process repeats.  The
// remainder's valuation strictly increases, so `window` digits of every
// coordinate are produced after O(window) exact subtractions.
class RelBasis {
public:
    explicit RelBasis(const Subfield& K) : K_(K) {
        const TowerField& E = *K.ambient();
        long f = E.f_abs(), p = E.p();
        long rf = K.rel_f();
        // residue change of basis: columns = coefficient vectors of
        // zetabar^(alpha + gamma * idx), alpha < rel_f, gamma < f1
        long f1 = K.f1();
        std::vector<std::vector<long>> M(f, std::vector<long>(f));
        const FqCtx& kE = E.residue();
        for (long alpha = 0; alpha < rf; ++alpha)
            for (long gamma = 0; gamma < f1; ++gamma) {
                long el = kE.from_dlog(mod_pos(alpha + gamma * K.idx(), E.q() - 1));
                auto cf = kE.coeffs(el);
                for (long r = 0; r < f; ++r) M[r][alpha * f1 + gamma] = cf[r];
            }
        minv_ = invert_mod_p(M, p);
    }

    const Subfield& K() const { return K_; }
    long dim() const { return K_.rel_degree(); }

    // index of basis element zeta^alpha pi^b
    long basis_index(long alpha, long b) const { return b * K_.rel_f() + alpha; }
    Elem basis_elem(long i) const {
        long alpha = i % K_.rel_f(), b = i / K_.rel_f();
        const TowerField& E = *K_.ambient();
        return Elem::monomial(K_.ambient(), E.residue().from_dlog(alpha), 0).shift(b);
    }

    // decompose s in k_E over { zetabar^alpha } with k_K coefficients;
    // returns rel_f packed k_K-intrinsic indices
    std::vector<long> residue_coords(long s) const {
        const TowerField& E = *K_.ambient();
        const FqCtx& kE = E.residue();
        const FqCtx& kK = K_.field()->residue();
        long f = E.f_abs(), f1 = K_.f1(), rf = K_.rel_f();
        auto cf = kE.coeffs(s);
        std::vector<long> out(rf, 0);
        for (long alpha = 0; alpha < rf; ++alpha) {
            std::vector<long> kcf(f1, 0);
            for (long gamma = 0; gamma < f1; ++gamma) {
                long acc = 0;
                for (long r = 0; r < f; ++r)
                    acc = (acc + minv_[alpha * f1 + gamma][r] * cf[r]) % E.p();
                kcf[gamma] = acc;
            }
            out[alpha] = kK.from_coeffs(kcf);
        }
        return out;
    }

    // K-coordinates of x wrt the relative basis, each an intrinsic K-element.
    // `window` counts ambient pi-digits of x consumed (default abs_prec).
    std::vector<Elem> coords(const Elem& x, long window = -1) const {
        const TowerField& E = *K_.ambient();
        const TowerPtr& KF = K_.field();
        long rf = K_.rel_f(), re = K_.rel_e();
        std::vector<Elem> out(dim(), Elem::zero(KF));
        if (x.is_zero()) {
            long b = x.exact() ? PREC_EXACT : ceil_div(x.abs_bound() - (re - 1), re);
            for (auto& c : out) c = Elem::zero(KF, std::min<long>(b, PREC_EXACT));
            return out;
        }
        if (window < 0) window = E.abs_prec();
        long stop = x.exact() ? x.val() + window : std::min(x.abs_bound(), x.val() + window);
        Elem rem = x;
        // accumulated digit strings per coordinate
        std::vector<std::vector<long>> digs(dim());
        std::vector<long> dig_lo(dim(), 0);
        long guard = (stop - x.val() + 2) * (long)dim() + 16;
        while (!rem.is_zero() && rem.val() < stop && guard-- > 0) {
            long k = rem.val();
            long s = rem.leading_digit();
            long b = mod_pos(k, re);
            long dd = floor_div(k, re);  // pi_K exponent
            // the ambient residue of a K-digit at pi_K^dd carries zeta^(a1 dd)
            // from pi_K = [zeta^a1] pi^re; peel that twist before descending
            const FqCtx& kE0 = E.residue();
            long s_tw = kE0.mul(
                s, kE0.from_dlog(mod_pos(-dd * K_.a1(), E.q() - 1)));
            auto rc = residue_coords(s_tw);
            Elem sub = Elem::zero(K_.ambient());
            const FqCtx& kE = E.residue();
            for (long alpha = 0; alpha < rf; ++alpha) {
                if (rc[alpha] == 0) continue;
                long i = basis_index(alpha, b);
                auto& D = digs[i];
                if (D.empty()) dig_lo[i] = dd;
                while ((long)D.size() < dd - dig_lo[i]) D.push_back(0);
                D.push_back(rc[alpha]);
                // ambient monomial: [rc_alpha-embedded] * zeta^alpha * pi_K^dd * pi^b
                long lg = mod_pos(K_.field()->residue().dlog(rc[alpha]) * K_.idx() + alpha +
                                      dd * K_.a1(),
                                  E.q() - 1);
                Elem mono = Elem::monomial(K_.ambient(), kE.from_dlog(lg), dd * re + b);
                sub = sub + mono;
            }
            rem = rem - sub;
        }
        if (guard <= 0) throw Error("RelBasis::coords failed to converge");
        bool all_exact = x.exact() && rem.is_zero() && rem.exact();
        for (long i = 0; i < dim(); ++i) {
            long b = i / rf;
            // coordinate digits dd are known while dd*re + b < stop
            long bound = all_exact ? PREC_EXACT : ceil_div(stop - b, re);
            if (digs[i].empty())
                out[i] = Elem::zero(KF, bound);
            else
                out[i] = Elem::from_digits(KF, dig_lo[i], digs[i], bound);
        }
        return out;
    }

    // inverse of coords: sum coord_i * basis_i, embedded into E
    Elem assemble(const std::vector<Elem>& cs) const {
        Elem acc = Elem::zero(K_.ambient());
        for (long i = 0; i < dim(); ++i) {
            if (cs[i].is_zero()) continue;
            long alpha = i % K_.rel_f(), b = i / K_.rel_f();
            Elem amb = K_.embed(cs[i]);
            Elem mono = Elem::monomial(K_.ambient(),
                                       K_.ambient()->residue().from_dlog(alpha), b);
            acc = acc + amb * mono;
        }
        return acc;
    }

    // matrix of multiplication by x on the relative basis (rows = output
    // coordinate, columns = input basis index), entries intrinsic K-elements
    std::vector<std::vector<Elem>> mult_matrix(const Elem& x) const {
        std::vector<std::vector<Elem>> M(dim(), std::vector<Elem>(dim()));
        for (long j = 0; j < dim(); ++j) {
            auto col = coords(x * basis_elem(j));
            for (long i = 0; i < dim(); ++i) M[i][j] = col[i];
        }
        return M;
    }

private:
    static std::vector<std::vector<long>> invert_mod_p(std::vector<std::vector<long>> M,
                                                       long p) {
        long n = (long)M.size();
        std::vector<std::vector<long>> I(n, std::vector<long>(n, 0));
        for (long i = 0; i < n; ++i) I[i][i] = 1;
        for (long c = 0; c < n; ++c) {
            long piv = -1;
            for (long r = c; r < n; ++r)
                if (M[r][c] % p != 0) {
                    piv = r;
                    break;
                }
            if (piv < 0) throw Error("residue basis matrix singular");
            std::swap(M[c], M[piv]);
            std::swap(I[c], I[piv]);
            long inv = 1;
            for (long k = 1; k < p; ++k)
                if ((k * M[c][c]) % p == 1) {
                    inv = k;
                    break;
                }
            for (long j = 0; j < n; ++j) {
                M[c][j] = (M[c][j] * inv) % p;
                I[c][j] = (I[c][j] * inv) % p;
            }
            for (long r = 0; r < n; ++r) {
                if (r == c || M[r][c] == 0) continue;
                long m = M[r][c];
                for (long j = 0; j < n; ++j) {
                    M[r][j] = mod_pos(M[r][j] - m * M[c][j], p);
                    I[r][j] = mod_pos(I[r][j] - m * I[c][j], p);
                }
            }
        }
        return I;
    }

    Subfield K_;
    std::vector<std::vector<long>> minv_;
};

// Exact trace of x from E down to the subfield K, via the multiplication
// matrix on a K-basis.
inline Elem trace_to(const Elem& x, const Subfield& K) {
    if (!x.field()->same_shape(*K.ambient())) throw NotSubfield("trace_to: wrong field");
    RelBasis B(K);
    Elem acc = Elem::zero(K.field());
    for (long j = 0; j < B.dim(); ++j) {
        auto col = B.coords(x * B.basis_elem(j));
        acc = acc + col[j];
    }
    return acc;
}

// Trace all the way to Q_p.
inline Elem trace_to_base(const Elem& x) { return trace_to(x, Subfield::base(x.field())); }

namespace detail {

// Solve sum_i a_i v_i = w over the field K (columns v_i of K-elements) by
// Gaussian elimination with valuation pivoting.  Returns the coefficients or
// nullopt if inconsistent at precision.
inline std::optional<std::vector<Elem>> solve_K(const std::vector<std::vector<Elem>>& cols,
                                                const std::vector<Elem>& rhs,
                                                const TowerPtr& K) {
    long n = (long)cols.size();
    long m = (long)rhs.size();
    // augmented rows [A | w]
    std::vector<std::vector<Elem>> R(m, std::vector<Elem>(n + 1, Elem::zero(K)));
    for (long r = 0; r < m; ++r) {
        for (long c = 0; c < n; ++c) R[r][c] = cols[c][r];
        R[r][n] = rhs[r];
    }
    std::vector<long> pivcol;
    long rank = 0;
    for (long c = 0; c < n && rank < m; ++c) {
        long pr = -1, pv = VAL_INF;
        for (long r = rank; r < m; ++r) {
            if (R[r][c].is_zero()) continue;
            if (R[r][c].val() < pv) {
                pv = R[r][c].val();
                pr = r;
            }
        }
        if (pr < 0) continue;
        std::swap(R[rank], R[pr]);
        Elem inv = R[rank][c].inverse();
        for (long j = c; j <= n; ++j) R[rank][j] = R[rank][j] * inv;
        for (long r = 0; r < m; ++r) {
            if (r == rank || R[r][c].is_zero()) continue;
            Elem f = R[r][c];
            for (long j = c; j <= n; ++j) R[r][j] = R[r][j] - f * R[rank][j];
        }
        pivcol.push_back(c);
        ++rank;
    }
    for (long r = rank; r < m; ++r)
        if (!R[r][n].is_zero()) return std::nullopt;
    std::vector<Elem> a(n, Elem::zero(K));
    for (long r = 0; r < rank; ++r) a[pivcol[r]] = R[r][n];
    return a;
}

}  // namespace detail

// Monic minimal polynomial of x over the subfield K: the first linear
// dependency among 1, x, x^2, ...; coefficients are intrinsic K-elements
// (constant first).  Degree stability is rechecked with one more power.
inline std::vector<Elem> minimal_poly(const Elem& x, const Subfield& K) {
    RelBasis B(K);
    long D = B.dim();
    std::vector<std::vector<Elem>> pows;  // coords of x^0, x^1, ...
    Elem xp = Elem::one(K.ambient());
    pows.push_back(B.coords(xp));
    for (long d = 1; d <= D; ++d) {
        xp = xp * x;
        auto target = B.coords(xp);
        auto sol = detail::solve_K(pows, target, K.field());
        if (sol) {
            std::vector<Elem> coeffs;  // P(T) = T^d - sum a_i T^i
            for (auto& a : *sol) coeffs.push_back(-a);
            coeffs.push_back(Elem::one(K.field()));
            return coeffs;
        }
        pows.push_back(target);
    }
    throw InsufficientPrecision("minimal_poly: no dependency up to full degree");
}

inline long minimal_poly_degree(const Elem& x, const Subfield& K) {
    return (long)minimal_poly(x, K).size() - 1;
}

// Evaluate a polynomial with intrinsic-K coefficients at an ambient element.
inline Elem eval_poly(const std::vector<Elem>& coeffs, const Subfield& K, const Elem& x) {
    Elem acc = Elem::zero(K.ambient());
    for (long i = (long)coeffs.size() - 1; i >= 0; --i)
        acc = acc * x + K.embed(coeffs[i]);
    return acc;
}

}  // namespace stratalab
