#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

#include "errors.hpp"

namespace stratalab {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Int pow_int(Int base, long exp) {
    if (exp < 0) throw Error("pow_int: negative exponent");
    Int r = 1;
    while (exp > 0) {
        if (exp & 1) r *= base;
        base *= base;
        exp >>= 1;
    }
    return r;
}

inline long floor_div(long a, long b) {
    long q = a / b, r = a % b;
    return (r != 0 && ((r < 0) != (b < 0))) ? q - 1 : q;
}

inline long ceil_div(long a, long b) { return -floor_div(-a, b); }

inline long mod_pos(long a, long b) {
    long r = a % b;
    return r < 0 ? r + b : r;
}

inline long gcd_long(long a, long b) {
    a = a < 0 ? -a : a;
    b = b < 0 ? -b : b;
    while (b) {
        long t = a % b;
        a = b;
        b = t;
    }
    return a;
}

inline long lcm_long(long a, long b) { return a / gcd_long(a, b) * b; }

// Multiplicative order of a modulo n, for gcd(a, n) = 1.
inline long mult_order(long a, long n) {
    if (n == 1) return 1;
    long x = mod_pos(a, n), ord = 1;
    long cur = x;
    while (cur != 1) {
        cur = (cur * x) % n;
        ++ord;
        if (ord > n) throw Error("mult_order: not invertible");
    }
    return ord;
}

// Exact element of Q/Z.  Values are reduced fractions in [0,1).  All the
// characters in this library take values here; the denominator is always a
// p-power times a divisor of some q-1, which cpp_rational handles exactly.
class QmodZ {
public:
    QmodZ() : v_(0) {}
    explicit QmodZ(const Rat& v) : v_(reduce(v)) {}
    QmodZ(const Int& num, const Int& den) : v_(reduce(Rat(num, den))) {}

    static QmodZ zero() { return QmodZ(); }

    bool is_zero() const { return v_ == 0; }
    const Rat& value() const { return v_; }

    QmodZ operator+(const QmodZ& o) const { return QmodZ(v_ + o.v_); }
    QmodZ operator-(const QmodZ& o) const { return QmodZ(v_ - o.v_); }
    QmodZ operator-() const { return QmodZ(-v_); }
    QmodZ operator*(const Int& k) const { return QmodZ(v_ * k); }
    bool operator==(const QmodZ& o) const { return v_ == o.v_; }
    bool operator!=(const QmodZ& o) const { return v_ != o.v_; }

    std::string str() const {
        return boost::multiprecision::numerator(v_).str() + "/" +
               boost::multiprecision::denominator(v_).str();
    }

private:
    static Rat reduce(const Rat& v) {
        Int n = boost::multiprecision::numerator(v);
        Int d = boost::multiprecision::denominator(v);
        Int m = n % d;
        if (m < 0) m += d;
        return Rat(m, d);
    }
    Rat v_;
};

}  // namespace stratalab
