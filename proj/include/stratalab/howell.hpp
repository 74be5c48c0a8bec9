#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "errors.hpp"
#include "numeric.hpp"

namespace stratalab {

// Linear algebra over the chain ring R = Z/p^t.  Row spans of matrices over
// R are exactly the finitely generated R-submodules of R^n; the Howell
// normal form is a canonical generating set with the property that any
// element of the span supported on the last k coordinates is an R-combination
// of the form's rows supported there.  That property is what makes the
// reduction-based membership test below complete.
class ZpRing {
public:
    ZpRing(long p, long t) : p_(p), t_(t), mod_(pow_int(p, t)) {}

    long p() const { return p_; }
    long t() const { return t_; }
    const Int& modulus() const { return mod_; }

    Int reduce(const Int& x) const {
        Int r = x % mod_;
        if (r < 0) r += mod_;
        return r;
    }

    // p-adic valuation capped at t (val(0) = t).
    long val(const Int& x) const {
        Int r = reduce(x);
        if (r == 0) return t_;
        long v = 0;
        while (r % p_ == 0) {
            r /= p_;
            ++v;
        }
        return v;
    }

    // Inverse of a unit (val 0) modulo p^t.
    Int unit_inv(const Int& x) const {
        Int a = reduce(x);
        if (a % p_ == 0) throw Error("ZpRing::unit_inv of non-unit");
        // Extended Euclid mod p, then Newton lifting to p^t.
        Int inv;
        {
            long ap = long(a % p_), t = 0, newt = 1, r = p_, newr = ap;
            while (newr != 0) {
                long q = r / newr;
                long tmp = t - q * newt;
                t = newt;
                newt = tmp;
                tmp = r - q * newr;
                r = newr;
                newr = tmp;
            }
            inv = mod_pos(t, p_);
        }
        for (long prec = 1; prec < t_; prec *= 2) inv = reduce(inv * (2 - a * inv));
        return inv;
    }

private:
    long p_, t_;
    Int mod_;
};

using Row = std::vector<Int>;
using Mat = std::vector<Row>;

struct HowellForm {
    Mat rows;                       // canonical rows, zero rows dropped
    std::vector<long> pivot_col;    // pivot column of each row (increasing)
    std::vector<long> pivot_val;    // valuation a: pivot entry is p^a
};

namespace detail {

inline void row_submul(const ZpRing& R, Row& r, const Int& c, const Row& s) {
    for (size_t j = 0; j < r.size(); ++j) r[j] = R.reduce(r[j] - c * s[j]);
}

inline bool row_is_zero(const Row& r) {
    for (const auto& x : r)
        if (x != 0) return false;
    return true;
}

// Echelonize rows in place (full reduction above and below pivots).
// Returns pivot (col, val) list; afterwards rows beyond the rank are zero
// and are dropped.
inline std::vector<std::pair<long, long>> echelon(const ZpRing& R, Mat& rows) {
    std::vector<std::pair<long, long>> pivots;
    size_t rank = 0;
    long ncols = rows.empty() ? 0 : (long)rows[0].size();
    for (long col = 0; col < ncols && rank < rows.size(); ++col) {
        long best = -1, best_val = R.t();
        for (size_t i = rank; i < rows.size(); ++i) {
            if (rows[i][col] == 0) continue;
            long v = R.val(rows[i][col]);
            if (v < best_val) {
                best_val = v;
                best = (long)i;
            }
        }
        if (best < 0) continue;
        std::swap(rows[rank], rows[best]);
        // Normalize pivot to p^a.
        Int pa = pow_int(R.p(), best_val);
        Int u = rows[rank][col] / pa;  // unit by construction
        Int uinv = R.unit_inv(u);
        for (auto& x : rows[rank]) x = R.reduce(x * uinv);
        // Eliminate the column below the pivot; entries above live in earlier
        // pivot rows and are only reducible mod p^a (done in the final pass).
        for (size_t i = rank + 1; i < rows.size(); ++i) {
            if (rows[i][col] == 0) continue;
            if (R.val(rows[i][col]) < best_val) throw Error("echelon: pivot not minimal");
            Int c = rows[i][col] / pa;
            row_submul(R, rows[i], c, rows[rank]);
        }
        pivots.emplace_back(col, best_val);
        ++rank;
    }
    rows.resize(rank);
    return pivots;
}

}  // namespace detail

// Reduced Howell normal form of the row span of `gens` over R.
inline HowellForm howell(const ZpRing& R, Mat gens) {
    Mat rows = std::move(gens);
    for (auto& r : rows)
        for (auto& x : r) x = R.reduce(x);
    rows.erase(std::remove_if(rows.begin(), rows.end(), detail::row_is_zero), rows.end());

    while (true) {
        auto pivots = detail::echelon(R, rows);
        // Howell completion: for every pivot p^a with a > 0 the multiple
        // p^(t-a) * row has vanishing pivot but possibly nonzero tail; the
        // tails must lie in the span of deeper rows for the form to be
        // Howell.  Append any that do not reduce to zero and re-echelonize.
        Mat extra;
        for (size_t i = 0; i < pivots.size(); ++i) {
            long a = pivots[i].second;
            if (a == 0) continue;
            Int c = pow_int(R.p(), R.t() - a);
            Row cand(rows[i].size());
            for (size_t j = 0; j < cand.size(); ++j) cand[j] = R.reduce(rows[i][j] * c);
            // Reduce against current rows.
            for (size_t k = 0; k < pivots.size(); ++k) {
                long col = pivots[k].first, av = pivots[k].second;
                if (cand[col] == 0) continue;
                if (R.val(cand[col]) >= av)
                    detail::row_submul(R, cand, cand[col] / pow_int(R.p(), av), rows[k]);
            }
            if (!detail::row_is_zero(cand)) extra.push_back(std::move(cand));
        }
        if (extra.empty()) {
            // Canonical reduction: entries above a pivot p^a reduced mod p^a.
            for (size_t k = 0; k < pivots.size(); ++k) {
                long col = pivots[k].first, a = pivots[k].second;
                Int pa = pow_int(R.p(), a);
                for (size_t i = 0; i < k; ++i) {
                    Int rem = rows[i][col] % pa;
                    if (rem != rows[i][col])
                        detail::row_submul(R, rows[i], (rows[i][col] - rem) / pa, rows[k]);
                }
            }
            HowellForm H;
            H.rows = std::move(rows);
            for (auto& pv : pivots) {
                H.pivot_col.push_back(pv.first);
                H.pivot_val.push_back(pv.second);
            }
            return H;
        }
        for (auto& r : extra) rows.push_back(std::move(r));
    }
}

// Does v lie in the row span captured by the Howell form?
inline bool howell_member(const ZpRing& R, const HowellForm& H, Row v) {
    for (auto& x : v) x = R.reduce(x);
    for (size_t k = 0; k < H.rows.size(); ++k) {
        long col = H.pivot_col[k], a = H.pivot_val[k];
        if (v[col] == 0) continue;
        if (R.val(v[col]) < a) return false;
        detail::row_submul(R, v, v[col] / pow_int(R.p(), a), H.rows[k]);
    }
    return detail::row_is_zero(v);
}

// Generators of the kernel {x in R^m : x M = 0} of the row action x -> x M.
// Computed from the Howell form of [M | I]: any module element vanishing on
// the M block is a combination of form rows vanishing there, so the x-parts
// of those rows generate the kernel.
inline Mat kernel(const ZpRing& R, const Mat& M) {
    size_t m = M.size();
    if (m == 0) return {};
    size_t n = M[0].size();
    Mat aug(m, Row(n + m, 0));
    for (size_t i = 0; i < m; ++i) {
        for (size_t j = 0; j < n; ++j) aug[i][j] = R.reduce(M[i][j]);
        aug[i][n + i] = 1;
    }
    HowellForm H = howell(R, std::move(aug));
    Mat ker;
    for (size_t k = 0; k < H.rows.size(); ++k) {
        if (H.pivot_col[k] < (long)n) continue;
        ker.emplace_back(H.rows[k].begin() + n, H.rows[k].end());
    }
    return ker;
}

// Smith-type elementary divisor exponents (sorted ascending) of the row
// module of M inside R^n, capped at t.  For a full-rank lattice given by
// enough generators, these determine the index exactly when all are < t.
inline std::vector<long> smith_exponents(const ZpRing& R, Mat M) {
    for (auto& r : M)
        for (auto& x : r) x = R.reduce(x);
    std::vector<long> divs;
    size_t top = 0;
    while (top < M.size()) {
        long best_val = R.t();
        size_t bi = top, bj = 0;
        size_t ncols = M[0].size();
        for (size_t i = top; i < M.size(); ++i)
            for (size_t j = 0; j < ncols; ++j) {
                if (M[i][j] == 0) continue;
                long v = R.val(M[i][j]);
                if (v < best_val) {
                    best_val = v;
                    bi = i;
                    bj = j;
                }
            }
        if (best_val == R.t()) break;  // all remaining entries are 0
        std::swap(M[top], M[bi]);
        // Normalize the pivot, clear its column by row operations, then clear
        // its row.  Clearing the row stands in for the column operations
        // (valid since the pivot column is already zero elsewhere), and both
        // kinds of operation preserve the elementary divisors.
        Int pa = pow_int(R.p(), best_val);
        Int u = M[top][bj] / pa;
        Int uinv = R.unit_inv(u);
        for (auto& x : M[top]) x = R.reduce(x * uinv);
        for (size_t i = 0; i < M.size(); ++i) {
            if (i == top || M[i][bj] == 0) continue;
            detail::row_submul(R, M[i], M[i][bj] / pa, M[top]);
        }
        // Column elimination on the pivot row.
        for (size_t j = 0; j < ncols; ++j) {
            if (j == bj) continue;
            M[top][j] = 0;
        }
        divs.push_back(best_val);
        ++top;
    }
    std::sort(divs.begin(), divs.end());
    return divs;
}

}  // namespace stratalab
