#pragma once

#include <memory>
#include <unordered_map>
#include <vector>

#include "errors.hpp"
#include "numeric.hpp"

namespace stratalab {

// The residue field F_q, q = p^f, presented as F_p[x]/(h) where h is the
// first monic polynomial (in lexicographic scan order) whose root generates
// F_q^x.  Fixing the scan order makes the presentation canonical per (p, f),
// so serialized data is reproducible across runs.
//
// Elements are packed indices in [0, q): the element sum a_i * zbar^i has
// index sum a_i * p^i.  Index 0 is zero.  zbar (index p for f > 1) is a
// fixed generator of F_q^x.
class FqCtx {
public:
    FqCtx(long p, long f) : p_(p), f_(f) {
        q_ = 1;
        for (long i = 0; i < f; ++i) q_ *= p;
        find_primitive_poly();
        build_tables();
    }

    long p() const { return p_; }
    long f() const { return f_; }
    long q() const { return q_; }
    // Monic defining polynomial, coefficients h[0..f] in [0,p), h[f] = 1.
    const std::vector<long>& poly() const { return h_; }

    long zero() const { return 0; }
    long one() const { return 1; }
    // The fixed multiplicative generator zeta-bar.
    long gen() const { return f_ == 1 ? exp_[1] : p_; }

    long add(long a, long b) const {
        long r = 0, mul = 1;
        for (long i = 0; i < f_; ++i) {
            long da = (a / pw_[i]) % p_, db = (b / pw_[i]) % p_;
            r += ((da + db) % p_) * mul;
            mul *= p_;
        }
        return r;
    }
    long neg(long a) const {
        long r = 0, mul = 1;
        for (long i = 0; i < f_; ++i) {
            long da = (a / pw_[i]) % p_;
            r += ((p_ - da) % p_) * mul;
            mul *= p_;
        }
        return r;
    }
    long sub(long a, long b) const { return add(a, neg(b)); }
    long mul(long a, long b) const {
        if (a == 0 || b == 0) return 0;
        return exp_[(log_.at(a) + log_.at(b)) % (q_ - 1)];
    }
    long inv(long a) const {
        if (a == 0) throw ZeroResidue("FqCtx::inv of zero");
        return exp_[(q_ - 1 - log_.at(a)) % (q_ - 1)];
    }
    long pow(long a, long k) const {
        if (a == 0) {
            if (k <= 0) throw ZeroResidue("FqCtx::pow of zero");
            return 0;
        }
        long e = mod_pos(k % (q_ - 1), q_ - 1);
        return exp_[(log_.at(a) * e) % (q_ - 1)];
    }
    // x -> x^p, the arithmetic Frobenius.
    long frobenius(long a) const { return pow(a, p_); }
    long dlog(long a) const {
        if (a == 0) throw ZeroResidue("FqCtx::dlog of zero");
        return log_.at(a);
    }
    long from_dlog(long k) const { return exp_[mod_pos(k, q_ - 1)]; }

    // Multiplicative order; 1 for the identity.
    long order(long a) const {
        if (a == 0) throw ZeroResidue("FqCtx::order of zero");
        long l = log_.at(a);
        return (q_ - 1) / gcd_long(l, q_ - 1);
    }

    // Degree over F_p of the subfield generated by a, i.e. the least d | f
    // with a^(p^d) = a.
    long degree_of(long a) const {
        if (a == 0) return 1;
        for (long d = 1; d <= f_; ++d) {
            if (f_ % d) continue;
            // a^(p^d) == a  <=>  (p^d - 1) * dlog(a) == 0 mod q-1
            Int pdm1 = pow_int(p_, d) - 1;
            if ((Int(dlog(a)) * pdm1) % (q_ - 1) == 0) return d;
        }
        throw Error("degree_of: unreachable");
    }

    std::vector<long> coeffs(long a) const {
        std::vector<long> c(f_);
        for (long i = 0; i < f_; ++i) c[i] = (a / pw_[i]) % p_;
        return c;
    }
    long from_coeffs(const std::vector<long>& c) const {
        long r = 0;
        for (long i = 0; i < f_ && i < (long)c.size(); ++i) r += mod_pos(c[i], p_) * pw_[i];
        return r;
    }

private:
    // Multiply two packed polynomials modulo (h, p).
    long poly_mul(long a, long b) const {
        std::vector<long> prod(2 * f_ - 1, 0);
        for (long i = 0; i < f_; ++i)
            for (long j = 0; j < f_; ++j)
                prod[i + j] = (prod[i + j] + ((a / pw_[i]) % p_) * ((b / pw_[j]) % p_)) % p_;
        for (long d = 2 * f_ - 2; d >= f_; --d) {
            long c = prod[d];
            if (!c) continue;
            prod[d] = 0;
            for (long i = 0; i < f_; ++i)
                prod[d - f_ + i] = mod_pos(prod[d - f_ + i] - c * h_[i], p_);
        }
        long r = 0;
        for (long i = 0; i < f_; ++i) r += prod[i] * pw_[i];
        return r;
    }

    void find_primitive_poly() {
        pw_.resize(f_ + 1);
        pw_[0] = 1;
        for (long i = 1; i <= f_; ++i) pw_[i] = pw_[i - 1] * p_;
        // Scan monic h = x^f + sum h_i x^i; the root x must have order q-1.
        for (long packed = 0; packed < pw_[f_]; ++packed) {
            h_.assign(f_ + 1, 0);
            for (long i = 0; i < f_; ++i) h_[i] = (packed / pw_[i]) % p_;
            h_[f_] = 1;
            if (h_[0] == 0) continue;  // reducible (root 0) or x | h
            long x = (f_ == 1) ? mod_pos(-h_[0], p_) : p_;
            if (x == 0) continue;
            long cur = x, ord = 1;
            bool ok = true;
            while (cur != 1) {
                cur = poly_mul(cur, x);
                ++ord;
                if (ord > q_ - 1) {
                    ok = false;
                    break;
                }
            }
            if (ok && ord == q_ - 1) return;
        }
        throw Error("FqCtx: no primitive polynomial found");
    }

    void build_tables() {
        exp_.resize(q_ - 1);
        long g = (f_ == 1) ? mod_pos(-h_[0], p_) : p_;
        long cur = 1;
        for (long k = 0; k < q_ - 1; ++k) {
            exp_[k] = cur;
            log_[cur] = k;
            cur = poly_mul(cur, g);
        }
        if (cur != 1) throw Error("FqCtx: generator order mismatch");
    }

    long p_, f_, q_;
    std::vector<long> h_;
    std::vector<long> pw_;
    std::vector<long> exp_;
    std::unordered_map<long, long> log_;
};

}  // namespace stratalab
