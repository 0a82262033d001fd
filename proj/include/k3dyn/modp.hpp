#pragma once

// Reduction of a Wehler surface modulo p: exhaustive point enumeration and
// the cycle structure of σ on the locus where σ and σ^-1 are defined and
// which σ maps into itself. Over a finite field every point of that locus is
// periodic; the census is empirical evidence only.

#include <algorithm>
#include <cstdint>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "k3dyn/errors.hpp"
#include "k3dyn/rings.hpp"
#include "k3dyn/wehler.hpp"

namespace k3dyn {

inline constexpr std::uint32_t kMaxPrime = 1u << 16;

inline void check_prime(std::uint32_t p) {
    if (p >= kMaxPrime) throw InvalidArgument("p = " + std::to_string(p) + " exceeds the supported bound 2^16");
    if (!is_prime(p)) throw InvalidArgument(std::to_string(p) + " is not prime");
}

/// Points of P²(F_p), each with first nonzero coordinate 1.
inline std::vector<Triple<Fp>> projective_plane(std::uint32_t p) {
    std::vector<Triple<Fp>> pts;
    pts.reserve(static_cast<std::size_t>(p) * p + p + 1);
    for (std::uint32_t a = 0; a < p; ++a)
        for (std::uint32_t b = 0; b < p; ++b) pts.push_back({Fp(1, p), Fp(a, p), Fp(b, p)});
    for (std::uint32_t b = 0; b < p; ++b) pts.push_back({Fp(0, p), Fp(1, p), Fp(b, p)});
    pts.push_back({Fp(0, p), Fp(0, p), Fp(1, p)});
    return pts;
}

/// Throws DegenerateReduction when F or G vanishes identically mod p.
inline SurfaceOver<Fp> reduce_surface(const WehlerSurface& s, std::uint32_t p) {
    check_prime(p);
    auto all_divisible = [p](const auto& rows) {
        for (const auto& row : rows)
            for (const auto& c : row)
                if (mpz_fdiv_ui(c.get_mpz_t(), p) != 0) return false;
        return true;
    };
    if (all_divisible(s.F)) throw DegenerateReduction("F vanishes mod " + std::to_string(p));
    if (all_divisible(s.G)) throw DegenerateReduction("G vanishes mod " + std::to_string(p));
    return SurfaceOver<Fp>(s, Fp(0, p));
}

/// All points of S(F_p), fiber by fiber over x ∈ P²(F_p).
inline std::vector<ModPoint> enumerate_points(const WehlerSurface& s, std::uint32_t p) {
    auto surf = reduce_surface(s, p);
    auto plane = projective_plane(p);
    std::vector<ModPoint> out;
    for (const auto& x : plane) {
        Fiber<Fp> fb = surf.fiber(x, 1);
        auto basis = line_basis(fb.line);
        if (!basis) {
            // F(x,·) ≡ 0: the whole conic lies over x.
            for (const auto& y : plane)
                if (is_zero(fb.quadric(y))) out.push_back({x, y});
            continue;
        }
        const auto& [z1, z2] = *basis;
        auto consider = [&](Fp sc, Fp tc) {
            Triple<Fp> y{sc * z1[0] + tc * z2[0], sc * z1[1] + tc * z2[1], sc * z1[2] + tc * z2[2]};
            if (is_zero(fb.quadric(y))) {
                normalize(y);
                out.push_back({x, y});
            }
        };
        consider(Fp(1, p), Fp(0, p));
        for (std::uint32_t t = 0; t < p; ++t) consider(Fp(t, p), Fp(1, p));
    }
    return out;
}

namespace detail {

inline std::uint64_t encode(const ModPoint& pt) {
    std::uint64_t key = 0;
    for (const auto& c : pt.x) key = key * kMaxPrime + c.v;
    for (const auto& c : pt.y) key = key * kMaxPrime + c.v;
    return key;  // 96 bits folded; collisions resolved below
}

struct PointIndex {
    std::unordered_multimap<std::uint64_t, std::size_t> map;
    const std::vector<ModPoint>* points = nullptr;

    explicit PointIndex(const std::vector<ModPoint>& pts) : points(&pts) {
        map.reserve(pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) map.emplace(encode(pts[i]), i);
    }

    std::optional<std::size_t> find(const ModPoint& pt) const {
        auto [lo, hi] = map.equal_range(encode(pt));
        for (auto it = lo; it != hi; ++it)
            if ((*points)[it->second] == pt) return it->second;
        return std::nullopt;
    }
};

}  // namespace detail

struct BadPoint {
    ModPoint point;
    std::string reason;
};

struct CyclePartition {
    std::uint32_t p = 0;
    std::size_t total_points = 0;
    /// Size of the locus on which σ acts as a bijection.
    std::size_t good_points = 0;
    std::vector<std::size_t> cycle_lengths;  // ascending
    std::vector<BadPoint> bad_points;

    std::vector<ModPoint> points;
    /// Index of σ(points[i]), or nullopt when σ is undefined there.
    std::vector<std::optional<std::size_t>> sigma_index;
    std::vector<bool> in_locus;
    /// Length of the σ-cycle through points[i] (0 outside the locus).
    std::vector<std::size_t> cycle_length_of;

    std::size_t cycle_count() const noexcept { return cycle_lengths.size(); }
};

inline CyclePartition sigma_permutation(const WehlerSurface& s, std::uint32_t p) {
    CyclePartition cp;
    cp.p = p;
    cp.points = enumerate_points(s, p);
    cp.total_points = cp.points.size();
    auto surf = reduce_surface(s, p);
    detail::PointIndex index(cp.points);

    const std::size_t n = cp.points.size();
    cp.sigma_index.assign(n, std::nullopt);
    std::vector<std::optional<std::size_t>> inverse_index(n);
    std::vector<std::string> reason(n);
    for (std::size_t i = 0; i < n; ++i) {
        try {
            cp.sigma_index[i] = index.find(surf.sigma(cp.points[i]));
            if (!cp.sigma_index[i]) reason[i] = "sigma image not among enumerated points";
        } catch (const DegenerateFiber& e) {
            reason[i] = "sigma undefined: " + e.reason() + " (projection " + std::to_string(e.projection()) + ")";
        }
        try {
            inverse_index[i] = index.find(surf.sigma_inverse(cp.points[i]));
            if (!inverse_index[i] && reason[i].empty()) reason[i] = "sigma^-1 image not among enumerated points";
        } catch (const DegenerateFiber& e) {
            if (reason[i].empty())
                reason[i] = "sigma^-1 undefined: " + e.reason() + " (projection " + std::to_string(e.projection()) + ")";
        }
    }

    // Largest subset closed under σ and σ^-1.
    cp.in_locus.assign(n, false);
    for (std::size_t i = 0; i < n; ++i) cp.in_locus[i] = cp.sigma_index[i] && inverse_index[i];
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (!cp.in_locus[i]) continue;
            if (!cp.in_locus[*cp.sigma_index[i]] || !cp.in_locus[*inverse_index[i]]) {
                cp.in_locus[i] = false;
                reason[i] = "orbit leaves the locus where sigma is defined";
                changed = true;
            }
        }
    }

    std::vector<std::size_t> in_degree(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (!cp.in_locus[i]) continue;
        ++in_degree[*cp.sigma_index[i]];
        if (*inverse_index[*cp.sigma_index[i]] != i)
            throw Error("sigma^-1 does not invert sigma at " + to_string(cp.points[i]));
    }
    for (std::size_t i = 0; i < n; ++i)
        if (cp.in_locus[i] && in_degree[i] != 1)
            throw Error("sigma is not a bijection on the good locus mod " + std::to_string(p));

    cp.cycle_length_of.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (!cp.in_locus[i]) {
            cp.bad_points.push_back({cp.points[i], reason[i]});
            continue;
        }
        ++cp.good_points;
        if (cp.cycle_length_of[i] != 0) continue;
        std::vector<std::size_t> cycle{i};
        for (std::size_t j = *cp.sigma_index[i]; j != i; j = *cp.sigma_index[j]) cycle.push_back(j);
        for (auto j : cycle) cp.cycle_length_of[j] = cycle.size();
        cp.cycle_lengths.push_back(cycle.size());
    }
    std::sort(cp.cycle_lengths.begin(), cp.cycle_lengths.end());
    return cp;
}

struct ReportRow {
    std::uint32_t p = 0;
    std::size_t total = 0;
    std::size_t good = 0;
    std::size_t bad = 0;
    std::size_t cycles = 0;
    std::size_t max_cycle = 0;
    double mean_cycle = 0.0;
};

struct PeriodicReport {
    std::vector<ReportRow> rows;
    std::vector<std::string> warnings;
};

inline PeriodicReport periodic_report(const WehlerSurface& s, const std::vector<std::uint32_t>& primes) {
    PeriodicReport report;
    std::set<std::uint32_t> seen;
    for (auto p : primes) {
        if (!seen.insert(p).second) {
            report.warnings.push_back("prime " + std::to_string(p) + " repeated; ignoring duplicate");
            continue;
        }
        try {
            auto cp = sigma_permutation(s, p);
            ReportRow row;
            row.p = p;
            row.total = cp.total_points;
            row.good = cp.good_points;
            row.bad = cp.total_points - cp.good_points;
            row.cycles = cp.cycle_count();
            row.max_cycle = cp.cycle_lengths.empty() ? 0 : cp.cycle_lengths.back();
            row.mean_cycle = cp.cycle_lengths.empty() ? 0.0
                                                      : static_cast<double>(cp.good_points) /
                                                            static_cast<double>(cp.cycle_lengths.size());
            report.rows.push_back(row);
        } catch (const Error& e) {
            report.warnings.push_back("prime " + std::to_string(p) + " skipped: " + e.what());
        }
    }
    return report;
}

inline void write_report_csv(std::ostream& os, const PeriodicReport& report) {
    os << "p,total,good,bad,cycles,max_cycle,mean_cycle\n";
    for (const auto& r : report.rows) {
        std::ostringstream mean;
        mean << std::fixed << std::setprecision(4) << r.mean_cycle;
        os << r.p << ',' << r.total << ',' << r.good << ',' << r.bad << ',' << r.cycles << ',' << r.max_cycle << ','
           << mean.str() << '\n';
    }
}

}  // namespace k3dyn
