#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "stratalab/fq.hpp"
#include "stratalab/howell.hpp"
#include "stratalab/numeric.hpp"

using namespace stratalab;

TEST_CASE("QmodZ arithmetic is exact") {
    QmodZ a(Int(1), Int(3)), b(Int(5), Int(6));
    REQUIRE((a + b) == QmodZ(Int(1), Int(6)));
    REQUIRE((a - b) == QmodZ(Int(1), Int(2)));
    REQUIRE((a * Int(3)).is_zero());
    REQUIRE((-a) == QmodZ(Int(2), Int(3)));
    REQUIRE(QmodZ(Int(7), Int(3)) == QmodZ(Int(1), Int(3)));
    REQUIRE(a.str() == "1/3");
}

TEST_CASE("FqCtx builds fields with a primitive generator") {
    for (auto [p, f] : {std::pair<long, long>{5, 1}, {3, 2}, {7, 2}, {3, 4}}) {
        FqCtx k(p, f);
        REQUIRE(k.q() == pow_int(p, f));
        long g = k.gen();
        REQUIRE(k.order(g) == k.q() - 1);
        // field axioms on a few random elements
        std::mt19937_64 rng(42);
        for (int it = 0; it < 50; ++it) {
            long a = rng() % k.q(), b = rng() % k.q(), c = rng() % k.q();
            REQUIRE(k.mul(a, k.add(b, c)) == k.add(k.mul(a, b), k.mul(a, c)));
            if (a != 0) REQUIRE(k.mul(a, k.inv(a)) == 1);
        }
        // frobenius is additive and fixes exactly F_p
        long a = k.gen(), b = k.add(k.gen(), 1);
        REQUIRE(k.frobenius(k.add(a, b)) == k.add(k.frobenius(a), k.frobenius(b)));
        if (f > 1) REQUIRE(k.degree_of(k.gen()) == f);
        REQUIRE(k.degree_of(1) == 1);
    }
}

TEST_CASE("Howell form canonical and membership complete") {
    ZpRing R(5, 4);  // Z/5^4
    SECTION("p^(t-a) tails are captured") {
        Mat gens = {{5, 1}};
        auto H = howell(R, gens);
        // span contains (0,125) = 125*(5,1)
        REQUIRE(howell_member(R, H, {0, 125}));
        REQUIRE(!howell_member(R, H, {0, 25}));
        REQUIRE(howell_member(R, H, {10, 2}));
    }
    SECTION("canonical form equality") {
        Mat a = {{5, 1}, {0, 125}};
        Mat b = {{10, 2}, {125, 25}, {5, 1}};
        auto Ha = howell(R, a), Hb = howell(R, b);
        REQUIRE(Ha.rows == Hb.rows);
    }
    SECTION("kernel correctness") {
        // x * M = 0 over Z/5^4 with M = [[5,0],[0,25]]
        Mat M = {{5, 0}, {0, 25}};
        auto K = kernel(R, M);
        // kernel = { (a,b) : 5a ≡ 0, 25b ≡ 0 } = p^3 Z x p^2 Z
        auto H = howell(R, K);
        REQUIRE(howell_member(R, H, {125, 0}));
        REQUIRE(howell_member(R, H, {0, 25}));
        REQUIRE(!howell_member(R, H, {25, 0}));
        REQUIRE(!howell_member(R, H, {0, 5}));
        // every generator is a genuine kernel element
        for (auto& x : K) {
            for (size_t j = 0; j < 2; ++j) {
                Int acc = 0;
                for (size_t i = 0; i < 2; ++i) acc += x[i] * M[i][j];
                REQUIRE(R.reduce(acc) == 0);
            }
        }
    }
    SECTION("random kernel consistency") {
        std::mt19937_64 rng(7);
        for (int it = 0; it < 25; ++it) {
            size_t m = 3 + rng() % 3, n = 3 + rng() % 3;
            Mat M(m, Row(n));
            for (auto& r : M)
                for (auto& x : r) x = Int(rng() % 625);
            auto K = kernel(R, M);
            for (auto& x : K)
                for (size_t j = 0; j < n; ++j) {
                    Int acc = 0;
                    for (size_t i = 0; i < m; ++i) acc += x[i] * M[i][j];
                    REQUIRE(R.reduce(acc) == 0);
                }
        }
    }
    SECTION("smith exponents") {
        Mat M = {{5, 0, 0}, {0, 25, 0}, {0, 0, 1}};
        auto d = smith_exponents(R, M);
        REQUIRE(d == std::vector<long>{0, 1, 2});
        Mat N = {{5, 25, 0}, {0, 25, 5}, {1, 1, 1}};
        auto dn = smith_exponents(R, N);
        REQUIRE(dn.size() == 3);
        // invariance under row shuffles and row operations
        Mat N2 = {{1, 1, 1}, {0, 25, 5}, {5 + 1, 25 + 1, 1}};
        REQUIRE(smith_exponents(R, N2) == dn);
    }
}
