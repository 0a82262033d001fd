#pragma once

// Empirical measures at the archimedean place: each exact point becomes one
// row of affine coordinates per real embedding, and two clouds are compared
// by the largest difference of mass over the cells of a uniform grid.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "k3dyn/errors.hpp"
#include "k3dyn/integer.hpp"
#include "k3dyn/rings.hpp"
#include "k3dyn/wehler.hpp"

namespace k3dyn {

/// Affine chart: x is divided by x[x_den], y by y[y_den].
struct Chart {
    int x_den = 0;
    int y_den = 0;

    std::string id() const { return "x" + std::to_string(x_den) + "y" + std::to_string(y_den); }
    friend bool operator==(const Chart&, const Chart&) = default;

    static Chart parse(const std::string& s) {
        if (s.size() != 4 || s[0] != 'x' || s[2] != 'y' || s[1] < '0' || s[1] > '2' || s[3] < '0' || s[3] > '2')
            throw FormatError("chart", "expected x<i>y<j> with i, j in 0..2, got '" + s + "'");
        return {s[1] - '0', s[3] - '0'};
    }
};

struct CloudRow {
    std::string tag;
    int embedding = 0;
    std::array<double, 4> coords{};  // u1, u2, v1, v2
    std::string chart;
};

struct PointCloud {
    std::vector<CloudRow> rows;
    bool empty() const noexcept { return rows.empty(); }
    std::size_t size() const noexcept { return rows.size(); }
};

namespace detail {

inline void check_tag(const std::string& tag) {
    if (tag.find_first_of(",\n\r\"") != std::string::npos)
        throw InvalidArgument("cloud tag '" + tag + "' may not contain commas, quotes or newlines");
}

/// Index of the preferred denominator, or the first nonzero coordinate.
template <class T>
int pick_denominator(const Triple<T>& v, int preferred) {
    if (!is_zero(v[static_cast<std::size_t>(preferred)])) return preferred;
    for (int k = 0; k < 3; ++k)
        if (!is_zero(v[static_cast<std::size_t>(k)])) return k;
    throw InvalidArgument("zero projective triple");
}

/// Real value of a + b√d under √d ↦ sign·√|d|, for d > 0.
inline mpf_class embed(const QuadInt& v, int sign, mp_bitcnt_t prec) {
    mpf_class a(v.a, prec), b(v.b, prec), r(v.d, prec);
    r = sqrt(r);
    return sign > 0 ? mpf_class(a + b * r, prec) : mpf_class(a - b * r, prec);
}

inline mp_bitcnt_t precision_for(const Triple<QuadInt>& v) {
    std::size_t bits = 64;
    for (const auto& c : v) bits = std::max({bits, mpz_sizeinbase(c.a.get_mpz_t(), 2), mpz_sizeinbase(c.b.get_mpz_t(), 2)});
    return static_cast<mp_bitcnt_t>(2 * bits + 128);
}

}  // namespace detail

inline PointCloud export_cloud(const std::vector<RationalPoint>& points, const std::string& tag,
                               Chart chart = {}) {
    detail::check_tag(tag);
    PointCloud cloud;
    for (const auto& pt : points) {
        int xd = detail::pick_denominator(pt.x, chart.x_den);
        int yd = detail::pick_denominator(pt.y, chart.y_den);
        CloudRow row{tag, 0, {}, Chart{xd, yd}.id()};
        std::size_t slot = 0;
        for (int k = 0; k < 3; ++k)
            if (k != xd) row.coords[slot++] = ratio_to_double(pt.x[static_cast<std::size_t>(k)], pt.x[static_cast<std::size_t>(xd)]);
        for (int k = 0; k < 3; ++k)
            if (k != yd) row.coords[slot++] = ratio_to_double(pt.y[static_cast<std::size_t>(k)], pt.y[static_cast<std::size_t>(yd)]);
        cloud.rows.push_back(std::move(row));
    }
    return cloud;
}

/// Two rows per point, one per real embedding (emb 0: √d > 0, emb 1: √d < 0).
/// A coordinate vanishing under one embedding vanishes under both, so the
/// chart is the same for the pair.
inline PointCloud export_cloud(const std::vector<QuadraticPoint>& points, const std::string& tag, Chart chart = {}) {
    detail::check_tag(tag);
    PointCloud cloud;
    for (const auto& pt : points) {
        long d = pt.x[0].d;
        if (d < 0)
            throw InvalidArgument("point " + to_string(pt) + " lies over an imaginary quadratic field; "
                                  "only real embeddings are exported");
        int xd = detail::pick_denominator(pt.x, chart.x_den);
        int yd = detail::pick_denominator(pt.y, chart.y_den);
        mp_bitcnt_t prec = std::max(detail::precision_for(pt.x), detail::precision_for(pt.y));
        for (int emb = 0; emb < 2; ++emb) {
            int sign = emb == 0 ? 1 : -1;
            CloudRow row{tag, emb, {}, Chart{xd, yd}.id()};
            std::size_t slot = 0;
            for (const auto* v : {&pt.x, &pt.y}) {
                int den = (v == &pt.x) ? xd : yd;
                mpf_class dv = detail::embed((*v)[static_cast<std::size_t>(den)], sign, prec);
                for (int k = 0; k < 3; ++k) {
                    if (k == den) continue;
                    mpf_class nv = detail::embed((*v)[static_cast<std::size_t>(k)], sign, prec);
                    mpf_class q(nv / dv, prec);
                    row.coords[slot++] = q.get_d();
                }
            }
            cloud.rows.push_back(std::move(row));
        }
    }
    return cloud;
}

/// Axis-aligned box in the four affine coordinates.
struct Box {
    std::array<double, 4> lo{};
    std::array<double, 4> hi{};

    static Box bounding(std::initializer_list<const PointCloud*> clouds) {
        Box b;
        b.lo.fill(std::numeric_limits<double>::infinity());
        b.hi.fill(-std::numeric_limits<double>::infinity());
        for (const auto* c : clouds)
            for (const auto& row : c->rows)
                for (std::size_t k = 0; k < 4; ++k) {
                    b.lo[k] = std::min(b.lo[k], row.coords[k]);
                    b.hi[k] = std::max(b.hi[k], row.coords[k]);
                }
        return b;
    }
};

/// Max over grid cells of |fraction of A − fraction of B|, using g cells per
/// axis over `box` (default: the bounding box of A ∪ B). Rows in different
/// charts never share a cell.
inline double box_discrepancy(const PointCloud& a, const PointCloud& b, unsigned g,
                              std::optional<Box> box = std::nullopt) {
    if (a.empty() || b.empty()) throw InvalidArgument("box discrepancy needs two nonempty clouds");
    if (g == 0) throw InvalidArgument("grid resolution must be positive");
    const Box bx = box ? *box : Box::bounding({&a, &b});

    using Cell = std::pair<std::string, std::array<unsigned, 4>>;
    auto cell_of = [&](const CloudRow& row) {
        Cell c{row.chart, {}};
        for (std::size_t k = 0; k < 4; ++k) {
            double width = bx.hi[k] - bx.lo[k];
            double t = width > 0 ? (row.coords[k] - bx.lo[k]) / width : 0.0;
            long idx = static_cast<long>(std::floor(t * g));
            c.second[k] = static_cast<unsigned>(std::clamp<long>(idx, 0, static_cast<long>(g) - 1));
        }
        return c;
    };
    std::map<Cell, std::pair<std::size_t, std::size_t>> counts;
    for (const auto& row : a.rows) ++counts[cell_of(row)].first;
    for (const auto& row : b.rows) ++counts[cell_of(row)].second;
    double worst = 0.0;
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    for (const auto& [cell, c] : counts)
        worst = std::max(worst, std::fabs(static_cast<double>(c.first) / na - static_cast<double>(c.second) / nb));
    return worst;
}

// ---------------------------------------------------------------------------
// CSV

inline constexpr const char* kCloudHeader = "tag,emb,u1,u2,v1,v2,chart";

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_cloud_csv(std::ostream& os, const PointCloud& cloud) {
    os << kCloudHeader << '\n';
    for (const auto& r : cloud.rows) {
        os << r.tag << ',' << r.embedding;
        for (double c : r.coords) os << ',' << format_double(c);
        os << ',' << r.chart << '\n';
    }
}

inline PointCloud read_cloud_csv(std::istream& is, const std::string& source = "cloud") {
    PointCloud cloud;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string where = source + ":" + std::to_string(lineno);
        if (lineno == 1) {
            if (line != kCloudHeader) throw FormatError(where, "expected header '" + std::string(kCloudHeader) + "'");
            continue;
        }
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(f);
        if (fields.size() != 7) throw FormatError(where, "expected 7 fields, got " + std::to_string(fields.size()));
        CloudRow row;
        row.tag = fields[0];
        try {
            std::size_t used = 0;
            row.embedding = std::stoi(fields[1], &used);
            if (used != fields[1].size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw FormatError(where + " field emb", "not an integer: '" + fields[1] + "'");
        }
        static const char* names[] = {"u1", "u2", "v1", "v2"};
        for (std::size_t k = 0; k < 4; ++k) {
            try {
                std::size_t used = 0;
                row.coords[k] = std::stod(fields[k + 2], &used);
                if (used != fields[k + 2].size()) throw std::invalid_argument("trailing");
            } catch (const std::exception&) {
                throw FormatError(where + " field " + names[k], "not a number: '" + fields[k + 2] + "'");
            }
        }
        Chart::parse(fields[6]);
        row.chart = fields[6];
        cloud.rows.push_back(std::move(row));
    }
    if (lineno == 0) throw FormatError(source, "empty file");
    return cloud;
}

}  // namespace k3dyn
