#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "k3dyn/io.hpp"
#include "k3dyn/measures.hpp"

using namespace k3dyn;

namespace {

PointCloud single(double u1, double u2, double v1, double v2, const std::string& tag = "t") {
    PointCloud c;
    c.rows.push_back({tag, 0, {u1, u2, v1, v2}, "x0y0"});
    return c;
}

PointCloud random_cloud(std::mt19937& rng, std::size_t n, double shift) {
    std::normal_distribution<double> d(shift, 1.0);
    PointCloud c;
    for (std::size_t k = 0; k < n; ++k) c.rows.push_back({"r", 0, {d(rng), d(rng), d(rng), d(rng)}, "x0y0"});
    return c;
}

}  // namespace

TEST(Discrepancy, IdenticalCloudsAreZero) {
    std::mt19937 rng(1);
    auto a = random_cloud(rng, 200, 0.0);
    for (unsigned g : {1u, 2u, 5u, 17u}) EXPECT_EQ(box_discrepancy(a, a, g), 0.0);
}

TEST(Discrepancy, SeparatedSinglePointsAreOne) {
    auto a = single(0, 0, 0, 0), b = single(5, 5, 5, 5);
    for (unsigned g : {2u, 4u, 10u}) EXPECT_EQ(box_discrepancy(a, b, g), 1.0);
    // Separation in the chart alone also counts.
    auto c = single(0, 0, 0, 0);
    c.rows[0].chart = "x1y0";
    EXPECT_EQ(box_discrepancy(a, c, 1), 1.0);
}

TEST(Discrepancy, SymmetricAndBounded) {
    std::mt19937 rng(2);
    for (int trial = 0; trial < 20; ++trial) {
        auto a = random_cloud(rng, 50 + trial, 0.0);
        auto b = random_cloud(rng, 80, 0.3 * trial);
        for (unsigned g : {2u, 4u, 8u}) {
            double ab = box_discrepancy(a, b, g), ba = box_discrepancy(b, a, g);
            EXPECT_NEAR(ab, ba, 1e-12);
            EXPECT_GE(ab, 0.0);
            EXPECT_LE(ab, 1.0);
        }
    }
}

TEST(Discrepancy, TriangleInequalityOnACommonGrid) {
    std::mt19937 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        auto a = random_cloud(rng, 60, 0.0), b = random_cloud(rng, 70, 0.5), c = random_cloud(rng, 40, 1.0);
        Box box = Box::bounding({&a, &b, &c});
        double ab = box_discrepancy(a, b, 4, box), bc = box_discrepancy(b, c, 4, box),
               ac = box_discrepancy(a, c, 4, box);
        EXPECT_LE(ac, ab + bc + 1e-12);
    }
}

TEST(Discrepancy, Errors) {
    PointCloud empty;
    auto a = single(0, 0, 0, 0);
    EXPECT_THROW(box_discrepancy(empty, a, 4), InvalidArgument);
    EXPECT_THROW(box_discrepancy(a, a, 0), InvalidArgument);
}

TEST(Cloud, RationalExportUsesAffineChart) {
    std::vector<RationalPoint> pts{{{2, 1, -4}, {3, 0, 6}}, {{0, 1, 2}, {1, 1, 1}}};
    auto cloud = export_cloud(pts, "q");
    ASSERT_EQ(cloud.size(), 2u);
    EXPECT_EQ(cloud.rows[0].chart, "x0y0");
    EXPECT_DOUBLE_EQ(cloud.rows[0].coords[0], 0.5);
    EXPECT_DOUBLE_EQ(cloud.rows[0].coords[1], -2.0);
    EXPECT_DOUBLE_EQ(cloud.rows[0].coords[2], 0.0);
    EXPECT_DOUBLE_EQ(cloud.rows[0].coords[3], 2.0);
    // x0 = 0 falls back to the first nonzero coordinate.
    EXPECT_EQ(cloud.rows[1].chart, "x1y0");
    EXPECT_DOUBLE_EQ(cloud.rows[1].coords[0], 0.0);
    EXPECT_DOUBLE_EQ(cloud.rows[1].coords[1], 2.0);
    auto other = export_cloud(pts, "q", Chart::parse("x2y2"));
    EXPECT_EQ(other.rows[0].chart, "x2y2");
    EXPECT_DOUBLE_EQ(other.rows[0].coords[0], -0.5);
    EXPECT_THROW(export_cloud(pts, "bad,tag"), InvalidArgument);
    EXPECT_THROW(Chart::parse("x3y0"), FormatError);
}

TEST(Cloud, QuadraticExportGivesBothEmbeddings) {
    // x = [1 : √2 : 0], y = [1 : 1 : 1] over Q(√2).
    QuadraticPoint p{{QuadInt(1, 0, 2), QuadInt(0, 1, 2), QuadInt(0, 0, 2)},
                     {QuadInt(1, 0, 2), QuadInt(1, 0, 2), QuadInt(1, 0, 2)}};
    auto cloud = export_cloud(std::vector<QuadraticPoint>{p}, "quad");
    ASSERT_EQ(cloud.size(), 2u);
    EXPECT_EQ(cloud.rows[0].embedding, 0);
    EXPECT_EQ(cloud.rows[1].embedding, 1);
    EXPECT_NEAR(cloud.rows[0].coords[0], std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(cloud.rows[1].coords[0], -std::sqrt(2.0), 1e-15);
    EXPECT_EQ(cloud.rows[0].coords[3], 1.0);

    QuadraticPoint imag{{QuadInt(1, 0, -1), QuadInt(0, 1, -1), QuadInt(0, 0, -1)},
                        {QuadInt(1, 0, -1), QuadInt(0, 0, -1), QuadInt(0, 0, -1)}};
    EXPECT_THROW(export_cloud(std::vector<QuadraticPoint>{imag}, "i"), InvalidArgument);
}

TEST(Cloud, HugeCoordinatesStayFinite) {
    Integer big("123456789012345678901234567890123456789012345678901234567890");
    std::vector<RationalPoint> pts{{{big, big + 1, 1}, {1, 0, 0}}};
    auto cloud = export_cloud(pts, "big");
    EXPECT_NEAR(cloud.rows[0].coords[0], 1.0, 1e-15);
    EXPECT_GE(cloud.rows[0].coords[1], 0.0);
    EXPECT_LT(cloud.rows[0].coords[1], 1e-50);
}

TEST(Csv, RoundTripIsExact) {
    std::mt19937 rng(4);
    auto a = random_cloud(rng, 30, 0.0);
    std::ostringstream os;
    write_cloud_csv(os, a);
    std::istringstream is(os.str());
    auto b = read_cloud_csv(is);
    ASSERT_EQ(b.size(), a.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        EXPECT_EQ(a.rows[k].coords, b.rows[k].coords);
        EXPECT_EQ(a.rows[k].chart, b.rows[k].chart);
        EXPECT_EQ(a.rows[k].tag, b.rows[k].tag);
    }
}

TEST(Csv, ErrorsCarryLineAndField) {
    auto expect_error = [](const std::string& text, const std::string& where) {
        std::istringstream is(text);
        try {
            read_cloud_csv(is, "f.csv");
            ADD_FAILURE() << "no error for " << text;
        } catch (const FormatError& e) {
            EXPECT_EQ(e.where(), where) << e.what();
        }
    };
    expect_error("tag,emb,u1,u2,v1\n", "f.csv:1");
    expect_error("tag,emb,u1,u2,v1,v2,chart\na,0,1,2,3,4,x0y0\nb,0,1,zz,3,4,x0y0\n", "f.csv:3 field u2");
    expect_error("tag,emb,u1,u2,v1,v2,chart\na,x,1,2,3,4,x0y0\n", "f.csv:2 field emb");
    expect_error("tag,emb,u1,u2,v1,v2,chart\na,0,1,2,3\n", "f.csv:2");
    expect_error("", "f.csv");
}
