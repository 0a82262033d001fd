#include <gtest/gtest.h>

#include <set>

#include "k3dyn/io.hpp"
#include "k3dyn/wehler.hpp"

using namespace k3dyn;

namespace {

const WehlerSurface& s0() {
    static const WehlerSurface s = load_surface(std::string(K3DYN_DATA_DIR) + "/surface_s0.json");
    return s;
}

const std::vector<RationalPoint>& s0_points() {
    static const std::vector<RationalPoint> pts = search_points(s0(), 2).rational;
    return pts;
}

/// S0 with one coefficient of G changed, keeping F.
WehlerSurface with_g(std::size_t a, std::size_t b, long v) {
    WehlerSurface s = s0();
    s.G[a][b] = v;
    return s;
}

}  // namespace

TEST(Surface, FixtureIsNondegenerate) {
    auto diag = validate_surface(s0());
    EXPECT_FALSE(diag.degenerate()) << diag.summary();
    EXPECT_EQ(diag.summary(), "no degeneracy found");
}

TEST(Surface, VanishingFormsAreReported) {
    WehlerSurface s = s0();
    for (auto& row : s.F)
        for (auto& c : row) c = 0;
    auto diag = validate_surface(s);
    EXPECT_TRUE(diag.degenerate());
    EXPECT_NE(diag.summary().find("degenerate: F vanishes"), std::string::npos);
    WehlerSurface t = s0();
    for (auto& row : t.G)
        for (auto& c : row) c = 0;
    EXPECT_NE(validate_surface(t).summary().find("degenerate: G vanishes"), std::string::npos);
}

TEST(Search, FindsOnlySurfacePoints) {
    const auto& pts = s0_points();
    EXPECT_EQ(pts.size(), 39u);
    std::set<std::string> seen;
    for (const auto& p : pts) {
        EXPECT_TRUE(on_surface(s0(), p)) << to_string(p);
        EXPECT_TRUE(seen.insert(to_string(p)).second) << "duplicate " << to_string(p);
        EXPECT_EQ(normalized(p.x), p.x);
        EXPECT_EQ(normalized(p.y), p.y);
    }
    for (std::size_t k = 1; k < pts.size(); ++k) EXPECT_LE(naive_height(pts[k - 1]), naive_height(pts[k]));
}

TEST(Search, CompleteAgainstBruteForceOverBoxes) {
    // Independent oracle: every (x, y) with both coordinates in small boxes
    // that satisfies F = G = 0 must be reported for bound 1.
    auto found = search_points(s0(), 1).rational;
    std::set<std::string> reported;
    for (const auto& p : found) reported.insert(to_string(p));
    auto surf = over_rationals(s0());
    std::size_t hits = 0;
    for (const auto& x : projective_box(1))
        for (const auto& y : projective_box(4)) {
            RationalPoint p{x, y};
            if (!surf.contains(p)) continue;
            ++hits;
            EXPECT_TRUE(reported.count(to_string(p))) << to_string(p);
        }
    EXPECT_GT(hits, 5u);
}

TEST(Search, RejectsNonpositiveBound) { EXPECT_THROW(search_points(s0(), 0), InvalidArgument); }

TEST(Involutions, RationalPointsOfTheSearch) {
    auto surf = over_rationals(s0());
    for (const auto& p : s0_points()) {
        auto a = surf.involution(p, 1);
        auto b = surf.involution(p, 2);
        EXPECT_EQ(a.x, p.x);
        EXPECT_EQ(b.y, p.y);
        EXPECT_TRUE(surf.contains(a));
        EXPECT_TRUE(surf.contains(b));
        EXPECT_EQ(surf.involution(a, 1), p);
        EXPECT_EQ(surf.involution(b, 2), p);
        EXPECT_EQ(surf.sigma_inverse(surf.sigma(p)), p);
        EXPECT_EQ(surf.sigma(surf.sigma_inverse(p)), p);
        EXPECT_EQ(sigma(s0(), p), involution_2(s0(), involution_1(s0(), p)));
    }
}

TEST(Involutions, FiberHasExactlyTwoPointsCountedWithMultiplicity) {
    // Over x, the y's on S are the roots of the binary form on the fiber line.
    auto surf = over_rationals(s0());
    for (const auto& p : s0_points()) {
        auto fb = surf.fiber(p.x, 1);
        EXPECT_EQ(fb.linear(p.y), 0);
        EXPECT_EQ(fb.quadric(p.y), 0);
        auto q = surf.involution(p, 1);
        EXPECT_EQ(fb.linear(q.y), 0);
        EXPECT_EQ(fb.quadric(q.y), 0);
        if (q == p) {
            // Ramification: the polar form vanishes, i.e. the fiber line is tangent.
            auto basis = line_basis(fb.line);
            ASSERT_TRUE(basis);
            auto [a, b, c] = binary_form(fb, basis->first, basis->second);
            EXPECT_EQ(b * b - 4 * a * c, 0) << to_string(p);
        }
    }
}

TEST(Involutions, CommonFixedPoint) {
    auto p0 = parse_rational_point("[1:0:0]x[0:1:0]");
    ASSERT_TRUE(on_surface(s0(), p0));
    EXPECT_EQ(involution_1(s0(), p0), p0);
    EXPECT_EQ(involution_2(s0(), p0), p0);
    EXPECT_EQ(detect_periodic(s0(), p0, 10, 100.0), 1u);
}

TEST(Involutions, QuadraticPoints) {
    auto res = search_points(s0(), 1, true);
    ASSERT_GE(res.quadratic.size(), 4u);
    ASSERT_EQ(res.quadratic.size() % 2, 0u);
    std::size_t checked = 0;
    for (std::size_t k = 0; k < res.quadratic.size(); k += 2) {
        const auto& p = res.quadratic[k];
        const auto& conj = res.quadratic[k + 1];
        EXPECT_EQ(p.x, conj.x);
        Triple<QuadInt> y_bar{p.y[0].conjugate(), p.y[1].conjugate(), p.y[2].conjugate()};
        EXPECT_EQ(normalized(y_bar), conj.y);
        EXPECT_TRUE(on_surface(s0(), p)) << to_string(p);
        auto surf = over(s0(), p);
        try {
            auto a = surf.involution(p, 1);
            EXPECT_EQ(a, conj);  // the conjugate is the other point of the x-fiber
            auto b = surf.involution(p, 2);
            EXPECT_TRUE(surf.contains(b));
            EXPECT_EQ(surf.involution(b, 2), p);
            EXPECT_EQ(surf.sigma_inverse(surf.sigma(p)), p);
            ++checked;
        } catch (const DegenerateFiber&) {
        }
    }
    EXPECT_GT(checked, 0u);
}

TEST(Involutions, LinearFormVanishingOnFiber) {
    // F without its x0 row: the fiber over x = [1:0:0] is the whole conic.
    WehlerSurface s = with_g(0, 0, 0);
    s.F[0] = {0, 0, 0};
    RationalPoint p{{1, 0, 0}, {1, 0, 0}};
    ASSERT_TRUE(on_surface(s, p));
    try {
        involution_1(s, p);
        FAIL() << "expected DegenerateFiber";
    } catch (const DegenerateFiber& e) {
        EXPECT_EQ(e.projection(), 1);
        EXPECT_NE(std::string(e.what()).find("linear form vanishes"), std::string::npos);
    }
}

TEST(Involutions, LineInsideConic) {
    // G's x0² row is y0·y1: over x = [1:0:0] the fiber line y0 = 0 lies on the conic.
    WehlerSurface s = s0();
    s.G[0] = {0, 1, 0, 0, 0, 0};
    RationalPoint p{{1, 0, 0}, {0, 1, 0}};
    ASSERT_TRUE(on_surface(s, p));
    EXPECT_THROW(involution_1(s, p), DegenerateFiber);
    try {
        orbit_segment(s, p, 3);
        FAIL() << "expected DegenerateFiber";
    } catch (const DegenerateFiber& e) {
        ASSERT_TRUE(e.step());
        EXPECT_EQ(std::labs(*e.step()), 1);
        EXPECT_NE(std::string(e.what()).find("lies on the conic"), std::string::npos);
    }
}

TEST(Orbits, SegmentAndChainIndexing) {
    const auto& p = s0_points().at(6);
    auto seg = orbit_segment(s0(), p, 3);
    auto chain = involution_chain(s0(), p, 6);
    EXPECT_EQ(seg.at(0), p);
    for (long k = -3; k < 3; ++k) EXPECT_EQ(seg.at(k + 1), sigma(s0(), seg.at(k)));
    for (long m = -3; m <= 3; ++m) {
        EXPECT_EQ(chain.at(2 * m), seg.at(m));
        if (m < 3) {
            EXPECT_EQ(chain.at(2 * m + 1), involution_1(s0(), seg.at(m)));
        }
    }
    for (long k = -6; k < 6; ++k) {
        auto next = chain.at(k + 1);
        EXPECT_TRUE(next == involution_1(s0(), chain.at(k)) || next == involution_2(s0(), chain.at(k)));
    }
    EXPECT_THROW(orbit_segment(s0(), p, -1), InvalidArgument);
}

TEST(Heights, NaiveHeight) {
    EXPECT_DOUBLE_EQ(naive_height(RationalPoint{{1, 2, -3}, {1, 0, 0}}), std::log(3.0));
    EXPECT_DOUBLE_EQ(naive_height(RationalPoint{{1, 0, 0}, {0, 1, 0}}), 0.0);
    RationalPoint big{{Integer("1000000000000000000000"), 1, 0}, {7, 1, 1}};
    EXPECT_NEAR(naive_height(big), 21 * std::log(10.0) + std::log(7.0), 1e-9);
}

TEST(Periodic, NonPeriodicPointGivesUp) {
    for (const auto& p : s0_points()) {
        if (p == parse_rational_point("[1:0:0]x[0:1:0]")) continue;
        auto per = detect_periodic(s0(), p, 6, 1e6);
        if (per) {
            EXPECT_EQ(orbit_segment(s0(), p, static_cast<long>(*per)).at(static_cast<long>(*per)), p);
        }
    }
}
