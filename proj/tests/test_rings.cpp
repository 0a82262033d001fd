#include <gtest/gtest.h>

#include <random>

#include "k3dyn/rings.hpp"

using namespace k3dyn;

TEST(Fp, FieldAxioms) {
    for (std::uint32_t p : {2u, 3u, 5u, 7u, 13u, 65521u}) {
        for (std::int64_t a = -20; a < 20; ++a) {
            Fp x(a, p);
            EXPECT_LT(x.v, p);
            if (x.v != 0) {
                EXPECT_EQ((x * x.inverse()).v, 1u) << a << " mod " << p;
            }
            EXPECT_TRUE(is_zero(x + (-x)));
        }
    }
    EXPECT_THROW(Fp(0, 7).inverse(), InvalidArgument);
    EXPECT_EQ(lift(Integer(-1), Fp(0, 7)).v, 6u);
    EXPECT_EQ(lift(Integer("100000000000000000000"), Fp(0, 7)).v, static_cast<std::uint32_t>(mpz_fdiv_ui(Integer("100000000000000000000").get_mpz_t(), 7)));
}

TEST(QuadInt, Arithmetic) {
    QuadInt a(1, 2, 3), b(-4, 1, 3);
    QuadInt prod = a * b;  // (1 + 2r)(−4 + r) = −4 + r − 8r + 2·3 = 2 − 7r
    EXPECT_EQ(prod.a, 2);
    EXPECT_EQ(prod.b, -7);
    EXPECT_EQ(a.norm(), 1 - 12);
    QuadInt n = a * a.conjugate();
    EXPECT_EQ(n.b, 0);
    EXPECT_EQ(n.a, a.norm());
    EXPECT_THROW(a + QuadInt(0, 1, 5), InvalidArgument);
    EXPECT_EQ(to_string(QuadInt(3, -1, 2)), "3-r");
    EXPECT_EQ(to_string(QuadInt(0, 2, 2)), "2*r");
    EXPECT_EQ(to_string(QuadInt(-5, 0, 2)), "-5");
}

TEST(Normalize, IntegerTriples) {
    Triple<Integer> v{-4, 6, 0};
    normalize(v);
    EXPECT_EQ(v, (Triple<Integer>{2, -3, 0}));
    Triple<Integer> w{0, -3, -9};
    normalize(w);
    EXPECT_EQ(w, (Triple<Integer>{0, 1, 3}));
}

TEST(Normalize, IdempotentAndScaleInvariant) {
    std::mt19937 rng(1);
    std::uniform_int_distribution<long> d(-30, 30);
    for (int trial = 0; trial < 500; ++trial) {
        Triple<Integer> v{d(rng), d(rng), d(rng)};
        if (is_zero_triple(v)) continue;
        auto n1 = normalized(v);
        EXPECT_EQ(normalized(n1), n1);
        long k = d(rng);
        if (k == 0) continue;
        Triple<Integer> scaled{v[0] * k, v[1] * k, v[2] * k};
        EXPECT_EQ(normalized(scaled), n1);
    }
}

TEST(Normalize, FpFirstNonzeroIsOne) {
    std::mt19937 rng(2);
    for (std::uint32_t p : {5u, 11u}) {
        std::uniform_int_distribution<std::int64_t> d(0, p - 1);
        for (int trial = 0; trial < 200; ++trial) {
            Triple<Fp> v{Fp(d(rng), p), Fp(d(rng), p), Fp(d(rng), p)};
            if (is_zero_triple(v)) continue;
            auto n = normalized(v);
            std::size_t k = 0;
            while (is_zero(n[k])) ++k;
            EXPECT_EQ(n[k].v, 1u);
            Fp c(d(rng), p);
            if (is_zero(c)) continue;
            EXPECT_EQ(normalized(Triple<Fp>{v[0] * c, v[1] * c, v[2] * c}), n);
        }
    }
}

TEST(Normalize, QuadraticScaleInvariant) {
    // Scaling by any nonzero element of Z[√d] gives the same normal form.
    std::mt19937 rng(4);
    std::uniform_int_distribution<long> d(-6, 6);
    for (long disc : {2L, 3L, 5L, -1L, -7L}) {
        for (int trial = 0; trial < 200; ++trial) {
            Triple<QuadInt> v{QuadInt(d(rng), d(rng), disc), QuadInt(d(rng), d(rng), disc), QuadInt(d(rng), d(rng), disc)};
            if (is_zero_triple(v)) continue;
            QuadInt c(d(rng), d(rng), disc);
            if (is_zero(c)) continue;
            auto n = normalized(v);
            EXPECT_EQ(normalized(n), n);
            EXPECT_EQ(normalized(Triple<QuadInt>{v[0] * c, v[1] * c, v[2] * c}), n);
            std::size_t k = 0;
            while (is_zero(n[k])) ++k;
            EXPECT_EQ(n[k].b, 0);
            EXPECT_GT(n[k].a, 0);
        }
    }
}

TEST(Cross, OrthogonalToInputs) {
    Triple<Integer> a{1, 2, 3}, b{-2, 0, 5};
    auto c = cross(a, b);
    EXPECT_EQ(c[0] * a[0] + c[1] * a[1] + c[2] * a[2], 0);
    EXPECT_EQ(c[0] * b[0] + c[1] * b[1] + c[2] * b[2], 0);
    EXPECT_EQ(triple_to_string(a), "[1:2:3]");
}
