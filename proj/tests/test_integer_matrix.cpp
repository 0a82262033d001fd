#include <gtest/gtest.h>

#include <random>

#include "k3dyn/matrix.hpp"

using namespace k3dyn;

namespace {

// Cofactor expansion, independent of the Bareiss elimination under test.
Integer laplace_det(const IntMatrix& a) {
    const std::size_t n = a.rows();
    if (n == 1) return a(0, 0);
    Integer acc = 0;
    for (std::size_t c = 0; c < n; ++c) {
        IntMatrix minor(n - 1, n - 1);
        for (std::size_t i = 1; i < n; ++i)
            for (std::size_t j = 0, jj = 0; j < n; ++j)
                if (j != c) minor(i - 1, jj++) = a(i, j);
        Integer term = a(0, c) * laplace_det(minor);
        acc += (c % 2 == 0) ? term : Integer(-term);
    }
    return acc;
}

IntMatrix random_matrix(std::mt19937& rng, std::size_t n, long lo, long hi) {
    std::uniform_int_distribution<long> d(lo, hi);
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = d(rng);
    return m;
}

}  // namespace

TEST(Integer, FactorizeRecomposes) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        Integer n = Integer(static_cast<unsigned long>(rng() % 1000000007ULL)) * Integer(static_cast<unsigned long>(rng() % 100003ULL)) + 2;
        Integer back = 1;
        for (const auto& [p, e] : factorize(n)) {
            EXPECT_NE(mpz_probab_prime_p(p.get_mpz_t(), 25), 0) << p.get_str();
            for (unsigned k = 0; k < e; ++k) back *= p;
        }
        EXPECT_EQ(back, n);
    }
}

TEST(Integer, FactorizeLargeSemiprime) {
    // Two primes beyond the trial-division range.
    Integer p("1000000007"), q("998244353");
    auto f = factorize(p * q);
    ASSERT_EQ(f.size(), 2u);
    EXPECT_EQ(f.begin()->first, q);
    EXPECT_EQ(f.rbegin()->first, p);
}

TEST(Integer, DivisorsMatchTrialDivision) {
    for (long n : {1L, 12L, 36L, 97L, 360L, 1001L}) {
        std::vector<Integer> expected;
        for (long d = 1; d <= n; ++d)
            if (n % d == 0) expected.push_back(d);
        auto got = divisors(n);
        std::sort(got.begin(), got.end());
        EXPECT_EQ(got, expected) << n;
    }
}

TEST(Integer, SquareDecomposition) {
    auto check = [](long n, long m, long d) {
        auto [mm, dd] = square_decomposition(n);
        EXPECT_EQ(mm, m) << n;
        EXPECT_EQ(dd, d) << n;
    };
    check(12, 2, 3);
    check(-12, 2, -3);
    check(72, 6, 2);
    check(7, 1, 7);
    check(-1, 1, -1);
    check(49, 7, 1);
}

TEST(Integer, IsPrimeSmall) {
    std::vector<std::uint64_t> primes;
    for (std::uint64_t n = 0; n < 200; ++n) {
        bool brute = n >= 2;
        for (std::uint64_t d = 2; d * d <= n; ++d)
            if (n % d == 0) brute = false;
        EXPECT_EQ(is_prime(n), brute) << n;
    }
}

TEST(Integer, MakePrimitive) {
    std::vector<Integer> v{6, -9, 0};
    make_primitive(v);
    EXPECT_EQ(v, (std::vector<Integer>{2, -3, 0}));
    std::vector<Rational> r{Rational(1, 2), Rational(-1, 3), Rational(0)};
    EXPECT_EQ(primitive_from_rational(r), (std::vector<Integer>{3, -2, 0}));
}

TEST(Matrix, DeterminantMatchesCofactorExpansion) {
    std::mt19937 rng(11);
    for (std::size_t n = 1; n <= 5; ++n)
        for (int trial = 0; trial < 40; ++trial) {
            auto m = random_matrix(rng, n, -6, 6);
            EXPECT_EQ(determinant(m), laplace_det(m));
        }
}

TEST(Matrix, KernelVectorsAreAnnihilated) {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 60; ++trial) {
        auto m = random_matrix(rng, 4, -3, 3);
        // Force rank deficiency by copying a combination of rows.
        for (std::size_t j = 0; j < 4; ++j) m(3, j) = m(0, j) * 2 - m(1, j);
        RatMatrix r = to_rational(m);
        auto ker = kernel_basis(r);
        EXPECT_EQ(ker.size() + rank(r), 4u);
        for (const auto& v : ker) {
            auto img = m * v;
            for (const auto& c : img) EXPECT_EQ(c, 0);
            EXPECT_EQ(content(v), 1);
        }
    }
}

TEST(Matrix, InverseAndPower) {
    IntMatrix a{{2, 1}, {1, 1}};
    auto inv = inverse(to_rational(a));
    ASSERT_TRUE(inv);
    EXPECT_EQ(*inv * to_rational(a), RatMatrix::identity(2));
    EXPECT_EQ(power(a, 0), IntMatrix::identity(2));
    EXPECT_EQ(power(a, 5), a * a * a * a * a);
    EXPECT_FALSE(inverse(to_rational(IntMatrix{{1, 2}, {2, 4}})));
}

TEST(Matrix, ShapeErrors) {
    IntMatrix a(2, 3), b(2, 3);
    EXPECT_THROW(a * b, DimensionMismatch);
    EXPECT_THROW(determinant(a), DimensionMismatch);
}
