#include <gtest/gtest.h>

#include <cmath>

#include "k3dyn/io.hpp"
#include "k3dyn/wehler.hpp"

using namespace k3dyn;

namespace {

const WehlerSurface& s0() {
    static const WehlerSurface s = load_surface(std::string(K3DYN_DATA_DIR) + "/surface_s0.json");
    return s;
}

/// Rational points of S0 with positive canonical height (every found point except the fixed one).
std::vector<RationalPoint> wandering_points(std::size_t count) {
    const auto p0 = parse_rational_point("[1:0:0]x[0:1:0]");
    std::vector<RationalPoint> out;
    for (const auto& p : search_points(s0(), 2).rational) {
        if (p == p0) continue;
        out.push_back(p);
        if (out.size() == count) break;
    }
    return out;
}

double hhat(const RationalPoint& p, unsigned n, HeightWalk walk = HeightWalk::Involutions) {
    return canonical_height(s0(), p, n, {walk, std::nullopt}).value;
}

const double kAlpha = 2.0 + std::sqrt(3.0);

}  // namespace

TEST(CanonicalHeight, RejectsOddDepth) {
    auto p = wandering_points(1).at(0);
    EXPECT_THROW(canonical_height(s0(), p, 5), InvalidArgument);
}

TEST(CanonicalHeight, DepthZeroIsNaiveHeight) {
    for (const auto& p : wandering_points(5)) EXPECT_DOUBLE_EQ(hhat(p, 0), naive_height(p));
}

TEST(CanonicalHeight, MatchesDirectWordAverage) {
    // Average over all 2^N words in {ι1, ι2}, evaluated literally.
    auto surf = over_rationals(s0());
    for (const auto& p : wandering_points(3)) {
        for (unsigned n : {2u, 4u, 6u}) {
            double acc = 0.0;
            for (unsigned w = 0; w < (1u << n); ++w) {
                RationalPoint q = p;
                for (unsigned k = 0; k < n; ++k) q = surf.involution(q, ((w >> k) & 1u) ? 2 : 1);
                acc += naive_height(q);
            }
            EXPECT_NEAR(hhat(p, n), acc / std::pow(4.0, n), 1e-9) << to_string(p) << " N=" << n;
        }
    }
}

TEST(CanonicalHeight, SigmaWalkMatchesDirectWordAverage) {
    auto surf = over_rationals(s0());
    for (const auto& p : wandering_points(3)) {
        const unsigned n = 4;
        double acc = 0.0;
        for (unsigned w = 0; w < (1u << n); ++w) {
            RationalPoint q = p;
            for (unsigned k = 0; k < n; ++k) q = ((w >> k) & 1u) ? surf.sigma(q) : surf.sigma_inverse(q);
            acc += naive_height(q);
        }
        EXPECT_NEAR(hhat(p, n, HeightWalk::Sigma), acc / std::pow(14.0, n), 1e-9);
    }
}

TEST(CanonicalHeight, ConvergesAndIsNonnegative) {
    for (const auto& p : wandering_points(12)) {
        double h4 = hhat(p, 4), h6 = hhat(p, 6), h8 = hhat(p, 8);
        EXPECT_LT(std::fabs(h8 - h6), std::fabs(h6 - h4)) << to_string(p);
        EXPECT_GE(h8, 0.0);
        auto est = canonical_height(s0(), p, 8);
        ASSERT_TRUE(est.delta);
        EXPECT_DOUBLE_EQ(*est.delta, std::fabs(h8 - h6));
        EXPECT_EQ(est.q, 4);
    }
}

TEST(CanonicalHeight, TwoWalksAgree) {
    // Both averages converge to the same limit; at N = 10 (ι-walk) and N = 4
    // (σ-walk) each is within about 1e-3 of it on S0.
    for (const auto& p : wandering_points(8)) {
        double a = hhat(p, 10);
        double b = hhat(p, 4, HeightWalk::Sigma);
        EXPECT_NEAR(a, b, 5e-3 * std::max(1.0, a)) << to_string(p);
    }
}

TEST(CanonicalHeight, FunctionalEquations) {
    auto surf = over_rationals(s0());
    for (const auto& p : wandering_points(6)) {
        double prev_i = INFINITY, prev_s = INFINITY;
        for (unsigned n : {4u, 6u, 8u}) {
            double h = hhat(p, n);
            double ri = std::fabs(hhat(surf.involution(p, 1), n) + hhat(surf.involution(p, 2), n) - 4.0 * h);
            double rs = std::fabs(hhat(surf.sigma(p), n) + hhat(surf.sigma_inverse(p), n) - 14.0 * h);
            EXPECT_LT(ri, prev_i) << to_string(p) << " N=" << n;
            EXPECT_LT(rs, prev_s) << to_string(p) << " N=" << n;
            prev_i = ri;
            prev_s = rs;
        }
        EXPECT_LT(prev_i, 0.05 * std::max(1.0, hhat(p, 8)));
    }
}

TEST(CanonicalHeight, FixedPointHasHeightZero) {
    auto p0 = parse_rational_point("[1:0:0]x[0:1:0]");
    for (unsigned n : {2u, 4u, 8u}) {
        EXPECT_EQ(hhat(p0, n), 0.0);
        EXPECT_EQ(hhat(p0, n, HeightWalk::Sigma), 0.0);
    }
}

TEST(CanonicalHeight, Truncation) {
    auto p = wandering_points(1).at(0);
    auto full = canonical_height(s0(), p, 8);
    auto same = canonical_height(s0(), p, 8, {HeightWalk::Involutions, 8u});
    EXPECT_DOUBLE_EQ(full.value, same.value);
    EXPECT_EQ(same.dropped_mass, 0.0);
    auto cut = canonical_height(s0(), p, 8, {HeightWalk::Involutions, 4u});
    // Positions ±6 and ±8 are dropped: (1 + 8 + 8 + 1) / 256 of the mass.
    EXPECT_DOUBLE_EQ(cut.dropped_mass, 18.0 / 256.0);
    EXPECT_LE(cut.value, full.value);
    ASSERT_TRUE(cut.delta);
    EXPECT_GE(*cut.delta, cut.dropped_mass);
}

TEST(HeightGrowth, SigmaStepMultipliesByAlphaSquared) {
    // Moving away from the lowest point of an orbit, h(σ^k P) grows by about
    // α² = 7 + 4√3 per step once the height dominates the O(1) error.
    const double a2 = kAlpha * kAlpha;
    std::size_t checked = 0;
    for (const auto& p : wandering_points(20)) {
        auto seg = orbit_segment(s0(), p, 4);
        long bottom = 0;
        for (long k = -4; k <= 4; ++k)
            if (naive_height(seg.at(k)) < naive_height(seg.at(bottom))) bottom = k;
        for (long k = -4; k <= 4; ++k) {
            long next = k > bottom ? k + 1 : k - 1;
            if (k == bottom || next < -4 || next > 4) continue;
            double lo = naive_height(seg.at(k)), hi = naive_height(seg.at(next));
            if (lo < 10.0) continue;
            EXPECT_GT(hi / lo, a2 / 2) << to_string(p) << " k=" << k;
            EXPECT_LT(hi / lo, a2 * 2) << to_string(p) << " k=" << k;
            ++checked;
        }
    }
    EXPECT_GT(checked, 20u);
}
