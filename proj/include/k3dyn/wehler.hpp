#pragma once

// Dynamics on a Wehler K3 surface S = {F = 0} ∩ {G = 0} ⊂ P2 x P2, where F has
// bidegree (1,1) and G bidegree (2,2). Each projection is 2:1 on S; swapping
// the two points of a fiber gives the involutions ι1 (fixes x) and ι2 (fixes
// y), and σ = ι2∘ι1.
//
// The other point of a fiber is found with a Vieta step: on the fiber line
// through the known point y pick a second point z; then
//   Q(s·y + t·z) = t·(s·B(y,z) + t·Q(z))
// because Q(y) = 0, so the second intersection is Q(z)·y − B(y,z)·z. Only ring
// operations are used, hence the step stays in Z, Z[√d] and F_p alike.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <cstddef>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "k3dyn/errors.hpp"
#include "k3dyn/integer.hpp"
#include "k3dyn/rings.hpp"

namespace k3dyn {

/// Degree-2 monomials in three variables, in the order
/// x0², x0x1, x0x2, x1², x1x2, x2².
inline constexpr std::array<std::pair<int, int>, 6> kQuadraticMonomials{
    {{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}}};

struct WehlerSurface {
    /// F[i][j] is the coefficient of x_i·y_j.
    std::array<std::array<Integer, 3>, 3> F{};
    /// G[a][b] is the coefficient of m_a(x)·m_b(y) over kQuadraticMonomials.
    std::array<std::array<Integer, 6>, 6> G{};

    bool f_vanishes() const {
        for (const auto& row : F)
            for (const auto& c : row)
                if (sgn(c) != 0) return false;
        return true;
    }
    bool g_vanishes() const {
        for (const auto& row : G)
            for (const auto& c : row)
                if (sgn(c) != 0) return false;
        return true;
    }

    friend bool operator==(const WehlerSurface&, const WehlerSurface&) = default;
};

template <class T>
struct SurfacePoint {
    Triple<T> x;
    Triple<T> y;

    friend bool operator==(const SurfacePoint& a, const SurfacePoint& b) { return a.x == b.x && a.y == b.y; }
};

using RationalPoint = SurfacePoint<Integer>;
using QuadraticPoint = SurfacePoint<QuadInt>;
using ModPoint = SurfacePoint<Fp>;

struct GroundField {
    enum class Kind { Rationals, Quadratic, Prime };
    Kind kind = Kind::Rationals;
    long parameter = 0;  // d for Q(√d), p for F_p

    std::string describe() const {
        switch (kind) {
            case Kind::Rationals: return "Q";
            case Kind::Quadratic: return "Q(sqrt " + std::to_string(parameter) + ")";
            case Kind::Prime: return "F_" + std::to_string(parameter);
        }
        return "?";
    }
};

inline GroundField field_of(const RationalPoint&) { return {}; }
inline GroundField field_of(const QuadraticPoint& p) { return {GroundField::Kind::Quadratic, p.x[0].d}; }
inline GroundField field_of(const ModPoint& p) { return {GroundField::Kind::Prime, static_cast<long>(p.x[0].p)}; }

template <class T>
std::string to_string(const SurfacePoint<T>& p) {
    std::string s = triple_to_string(p.x) + "x" + triple_to_string(p.y);
    if constexpr (std::is_same_v<T, QuadInt>) s += ";d=" + std::to_string(p.x[0].d);
    if constexpr (std::is_same_v<T, Fp>) s += " mod " + std::to_string(p.x[0].p);
    return s;
}

template <class T>
void normalize(SurfacePoint<T>& p) {
    normalize(p.x);
    normalize(p.y);
}

template <class T>
std::array<T, 6> monomials(const Triple<T>& v) {
    return {v[0] * v[0], v[0] * v[1], v[0] * v[2], v[1] * v[1], v[1] * v[2], v[2] * v[2]};
}

/// Restriction of S to one fiber: the line {v : Σ line_j v_j = 0} and the
/// conic {v : Σ conic_b m_b(v) = 0}.
template <class T>
struct Fiber {
    Triple<T> line;
    std::array<T, 6> conic;

    T quadric(const Triple<T>& v) const {
        auto m = monomials(v);
        T acc = conic[0] * m[0];
        for (std::size_t b = 1; b < 6; ++b) acc = acc + conic[b] * m[b];
        return acc;
    }

    /// Polar form B(v,w) = Q(v+w) − Q(v) − Q(w).
    T polar(const Triple<T>& v, const Triple<T>& w) const {
        T acc = v[0] - v[0];
        for (std::size_t b = 0; b < 6; ++b) {
            auto [i, j] = kQuadraticMonomials[b];
            T term = v[i] * w[j];
            term = term + v[j] * w[i];
            acc = acc + conic[b] * term;
        }
        return acc;
    }

    T linear(const Triple<T>& v) const { return line[0] * v[0] + line[1] * v[1] + line[2] * v[2]; }
};

/// Two spanning points of the line with normal `line`, or nullopt when the
/// linear form vanishes.
template <class T>
std::optional<std::pair<Triple<T>, Triple<T>>> line_basis(const Triple<T>& line) {
    if (is_zero_triple(line)) return std::nullopt;
    const T zero = line[0] - line[0];
    const T one = lift(Integer(1), line[0]);
    std::optional<Triple<T>> first;
    for (int k = 0; k < 3; ++k) {
        Triple<T> e{zero, zero, zero};
        e[k] = one;
        Triple<T> z = cross(line, e);
        if (is_zero_triple(z)) continue;
        if (!first) {
            first = z;
        } else if (!is_zero_triple(cross(*first, z))) {
            return std::make_pair(*first, z);
        }
    }
    return std::nullopt;  // unreachable for a nonzero line over a field
}

/// The surface with coefficients lifted into the coordinate ring of T.
template <class T>
class SurfaceOver {
public:
    SurfaceOver(const WehlerSurface& s, const T& like) {
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) f_[i][j] = lift(s.F[i][j], like);
        for (int a = 0; a < 6; ++a)
            for (int b = 0; b < 6; ++b) g_[a][b] = lift(s.G[a][b], like);
        zero_ = lift(Integer(0), like);
    }

    T eval_f(const Triple<T>& x, const Triple<T>& y) const {
        T acc = zero_;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (!is_zero(f_[i][j])) acc = acc + f_[i][j] * x[i] * y[j];
        return acc;
    }

    T eval_g(const Triple<T>& x, const Triple<T>& y) const {
        auto mx = monomials(x);
        auto my = monomials(y);
        T acc = zero_;
        for (int a = 0; a < 6; ++a)
            for (int b = 0; b < 6; ++b)
                if (!is_zero(g_[a][b])) acc = acc + g_[a][b] * mx[a] * my[b];
        return acc;
    }

    bool contains(const SurfacePoint<T>& p) const {
        return !is_zero_triple(p.x) && !is_zero_triple(p.y) && is_zero(eval_f(p.x, p.y)) &&
               is_zero(eval_g(p.x, p.y));
    }

    /// Fiber of projection 1 over x (a curve in the y-plane) or of
    /// projection 2 over y (a curve in the x-plane).
    Fiber<T> fiber(const Triple<T>& base, int projection) const {
        Fiber<T> fb;
        auto m = monomials(base);
        for (int k = 0; k < 3; ++k) {
            T acc = zero_;
            for (int i = 0; i < 3; ++i)
                if (!is_zero(projection == 1 ? f_[i][k] : f_[k][i]))
                    acc = acc + (projection == 1 ? f_[i][k] : f_[k][i]) * base[i];
            fb.line[k] = acc;
        }
        for (int c = 0; c < 6; ++c) {
            T acc = zero_;
            for (int a = 0; a < 6; ++a) {
                const T& coeff = projection == 1 ? g_[a][c] : g_[c][a];
                if (!is_zero(coeff)) acc = acc + coeff * m[a];
            }
            fb.conic[c] = acc;
        }
        return fb;
    }

    /// ι1 (projection 1: keep x) or ι2 (projection 2: keep y).
    SurfacePoint<T> involution(const SurfacePoint<T>& p, int projection) const {
        const Triple<T>& base = projection == 1 ? p.x : p.y;
        const Triple<T>& moving = projection == 1 ? p.y : p.x;
        Fiber<T> fb = fiber(base, projection);
        if (is_zero_triple(fb.line))
            throw DegenerateFiber(projection, to_string(p), "the linear form vanishes identically on the fiber");
        Triple<T> z = second_point_on_line(fb.line, moving);
        T qz = fb.quadric(z);
        T bz = fb.polar(moving, z);
        if (is_zero(qz) && is_zero(bz))
            throw DegenerateFiber(projection, to_string(p), "the fiber line lies on the conic");
        // bz == 0 is a double root: the output equals the input.
        Triple<T> other{qz * moving[0] - bz * z[0], qz * moving[1] - bz * z[1], qz * moving[2] - bz * z[2]};
        normalize(other);
        return projection == 1 ? SurfacePoint<T>{base, std::move(other)} : SurfacePoint<T>{std::move(other), base};
    }

    SurfacePoint<T> sigma(const SurfacePoint<T>& p) const { return involution(involution(p, 1), 2); }
    SurfacePoint<T> sigma_inverse(const SurfacePoint<T>& p) const { return involution(involution(p, 2), 1); }

private:
    /// A point of the line other than `known`.
    Triple<T> second_point_on_line(const Triple<T>& line, const Triple<T>& known) const {
        const T one = zero_ + lift(Integer(1), zero_);
        for (int k = 0; k < 3; ++k) {
            Triple<T> e{zero_, zero_, zero_};
            e[k] = one;
            Triple<T> z = cross(line, e);
            if (!is_zero_triple(z) && !is_zero_triple(cross(z, known))) return z;
        }
        throw InvalidArgument("point " + triple_to_string(known) + " is not on its fiber line");
    }

    std::array<std::array<T, 3>, 3> f_;
    std::array<std::array<T, 6>, 6> g_;
    T zero_;
};

template <class T>
SurfaceOver<T> over(const WehlerSurface& s, const SurfacePoint<T>& like) {
    return SurfaceOver<T>(s, like.x[0]);
}

inline SurfaceOver<Integer> over_rationals(const WehlerSurface& s) { return SurfaceOver<Integer>(s, Integer(0)); }

template <class T>
bool on_surface(const WehlerSurface& s, const SurfacePoint<T>& p) {
    return over(s, p).contains(p);
}

template <class T>
SurfacePoint<T> involution_1(const WehlerSurface& s, const SurfacePoint<T>& p) {
    return over(s, p).involution(p, 1);
}

template <class T>
SurfacePoint<T> involution_2(const WehlerSurface& s, const SurfacePoint<T>& p) {
    return over(s, p).involution(p, 2);
}

template <class T>
SurfacePoint<T> sigma(const WehlerSurface& s, const SurfacePoint<T>& p) {
    return over(s, p).sigma(p);
}

template <class T>
SurfacePoint<T> sigma_inverse(const WehlerSurface& s, const SurfacePoint<T>& p) {
    return over(s, p).sigma_inverse(p);
}

// ---------------------------------------------------------------------------
// Orbits

/// Points indexed by k = −n..n around a centre point (k = 0).
template <class T>
struct Segment {
    long n = 0;
    std::vector<SurfacePoint<T>> points;  // points[k + n]

    const SurfacePoint<T>& at(long k) const { return points.at(static_cast<std::size_t>(k + n)); }
    std::size_t size() const noexcept { return points.size(); }
};

namespace detail {

/// Walk `n` steps in each direction, alternating the maps in `forward_steps`
/// going up and `backward_steps` going down.
template <class T, class Step>
Segment<T> walk(const SurfacePoint<T>& p, long n, Step&& step) {
    Segment<T> seg;
    seg.n = n;
    seg.points.resize(static_cast<std::size_t>(2 * n + 1));
    seg.points[static_cast<std::size_t>(n)] = p;
    for (int dir : {1, -1}) {
        SurfacePoint<T> cur = p;
        for (long k = 1; k <= n; ++k) {
            try {
                cur = step(cur, dir, k);
            } catch (const DegenerateFiber& e) {
                throw e.at_step(dir * k);
            }
            seg.points[static_cast<std::size_t>(n + dir * k)] = cur;
        }
    }
    return seg;
}

}  // namespace detail

/// σ^k(P) for k = −n..n.
template <class T>
Segment<T> orbit_segment(const WehlerSurface& s, const SurfacePoint<T>& p, long n) {
    if (n < 0) throw InvalidArgument("orbit length must be nonnegative");
    auto surf = over(s, p);
    return detail::walk(p, n, [&](const SurfacePoint<T>& q, int dir, long) {
        return dir > 0 ? surf.sigma(q) : surf.sigma_inverse(q);
    });
}

/// The alternating involution chain: position 2m is σ^m(P) and position
/// 2m+1 is ι1σ^m(P). Consecutive positions differ by one involution, so a word
/// of length N in {ι1, ι2} applied to P lands on position 2j − N.
template <class T>
Segment<T> involution_chain(const WehlerSurface& s, const SurfacePoint<T>& p, long n) {
    if (n < 0) throw InvalidArgument("chain length must be nonnegative");
    auto surf = over(s, p);
    return detail::walk(p, n, [&](const SurfacePoint<T>& q, int dir, long k) {
        // Going up: ι1, ι2, ι1, ...; going down: ι2, ι1, ι2, ...
        int projection = ((k % 2 == 1) == (dir > 0)) ? 1 : 2;
        return surf.involution(q, projection);
    });
}

// ---------------------------------------------------------------------------
// Heights

/// log max|x_i| + log max|y_j| for coprime integer coordinates.
inline double naive_height(const RationalPoint& p) {
    auto part = [](const Triple<Integer>& v) {
        const Integer* best = &v[0];
        for (const auto& c : v)
            if (cmp(abs(c), abs(*best)) > 0) best = &c;
        return log_abs(*best);
    };
    return part(p.x) + part(p.y);
}

struct HeightEstimate {
    double value = 0.0;
    unsigned depth = 0;
    std::optional<double> delta;
    double dropped_mass = 0.0;
    Rational q;
};

/// Which monoid average to evaluate. Words in {ι1, ι2} collapse onto the
/// involution chain with q = 4; words in {σ, σ^-1} collapse onto the σ-orbit
/// with q = 14 = 4² − 2. Both converge to the same canonical height.
enum class HeightWalk { Involutions, Sigma };

struct HeightOptions {
    HeightWalk walk = HeightWalk::Involutions;
    /// Drop terms whose walk position exceeds this in absolute value.
    std::optional<unsigned> truncate;
};

inline Rational walk_degree(HeightWalk walk) { return walk == HeightWalk::Involutions ? Rational(4) : Rational(14); }

namespace detail {

/// q^-N Σ_j C(N,j)·h(2j − N) over the kept positions; also the dropped mass
/// Σ_dropped C(N,j) / 2^N.
inline std::pair<double, double> binomial_average(const std::vector<double>& heights_by_pos, long centre,
                                                  unsigned depth, const Rational& q,
                                                  std::optional<unsigned> truncate) {
    long double acc = 0.0L;
    long double dropped = 0.0L;
    Integer qn;
    mpz_pow_ui(qn.get_mpz_t(), q.get_num_mpz_t(), depth);
    Integer two_n;
    mpz_ui_pow_ui(two_n.get_mpz_t(), 2, depth);
    for (unsigned j = 0; j <= depth; ++j) {
        long pos = 2 * static_cast<long>(j) - static_cast<long>(depth);
        Integer binom;
        mpz_bin_uiui(binom.get_mpz_t(), depth, j);
        if (truncate && static_cast<unsigned long>(std::labs(pos)) > *truncate) {
            dropped += ratio_to_double(binom, two_n);
            continue;
        }
        acc += static_cast<long double>(ratio_to_double(binom, qn)) *
               heights_by_pos.at(static_cast<std::size_t>(centre + pos));
    }
    return {static_cast<double>(acc), static_cast<double>(dropped)};
}

}  // namespace detail

/// Canonical height estimate ĥ_N(P) = q^-N Σ_{words of length N} h(word(P)).
inline HeightEstimate canonical_height(const WehlerSurface& s, const RationalPoint& p, unsigned depth,
                                       const HeightOptions& opts = {}) {
    if (depth % 2 != 0) throw InvalidArgument("canonical height depth must be even, got " + std::to_string(depth));
    long reach = static_cast<long>(depth);
    if (opts.truncate) reach = std::min<long>(reach, static_cast<long>(*opts.truncate));
    Segment<Integer> seg = opts.walk == HeightWalk::Involutions ? involution_chain(s, p, reach)
                                                                : orbit_segment(s, p, reach);
    // Positions beyond `reach` are never read (their weight is dropped).
    std::vector<double> heights(static_cast<std::size_t>(2 * depth + 1), 0.0);
    const long centre = static_cast<long>(depth);
    for (long k = -reach; k <= reach; ++k)
        heights[static_cast<std::size_t>(centre + k)] = naive_height(seg.at(k));

    const Rational q = walk_degree(opts.walk);
    HeightEstimate est;
    est.depth = depth;
    est.q = q;
    auto [value, dropped] = detail::binomial_average(heights, centre, depth, q, opts.truncate);
    est.value = value;
    est.dropped_mass = dropped;
    if (depth >= 2) {
        auto [prev, prev_dropped] = detail::binomial_average(heights, centre, depth - 2, q, opts.truncate);
        (void)prev_dropped;
        est.delta = std::fabs(value - prev) + dropped;
    }
    return est;
}

// ---------------------------------------------------------------------------
// Periodicity

/// Smallest m ≤ n_max with σ^m(P) = P. Gives up once the naive height exceeds h_max.
inline std::optional<unsigned long> detect_periodic(const WehlerSurface& s, const RationalPoint& p,
                                                    unsigned long n_max, double h_max) {
    auto surf = over(s, p);
    RationalPoint cur = p;
    for (unsigned long m = 1; m <= n_max; ++m) {
        cur = surf.sigma(cur);
        if (cur == p) return m;
        if (naive_height(cur) > h_max) return std::nullopt;
    }
    return std::nullopt;
}

inline std::optional<unsigned long> detect_periodic(const WehlerSurface& s, const ModPoint& p, unsigned long n_max) {
    auto surf = over(s, p);
    ModPoint cur = p;
    for (unsigned long m = 1; m <= n_max; ++m) {
        cur = surf.sigma(cur);
        if (cur == p) return m;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Point search over Q and Q(√d)

/// Coefficients (a, b, c) of Q(s·z1 + t·z2) = a s² + b st + c t².
template <class T>
std::array<T, 3> binary_form(const Fiber<T>& fb, const Triple<T>& z1, const Triple<T>& z2) {
    return {fb.quadric(z1), fb.polar(z1, z2), fb.quadric(z2)};
}

struct SearchResult {
    std::vector<RationalPoint> rational;
    std::vector<QuadraticPoint> quadratic;  // Galois-conjugate pairs, adjacent
    std::size_t degenerate_fibers = 0;
};

/// Primitive x ∈ P²(Q) with integer coordinates in [−bound, bound], first
/// nonzero coordinate positive, in lexicographic order.
inline std::vector<Triple<Integer>> projective_box(long bound) {
    std::vector<Triple<Integer>> out;
    for (long a = -bound; a <= bound; ++a)
        for (long b = -bound; b <= bound; ++b)
            for (long c = -bound; c <= bound; ++c) {
                Triple<Integer> v{a, b, c};
                if (is_zero_triple(v)) continue;
                if (content(v) != 1) continue;
                long first = a != 0 ? a : (b != 0 ? b : c);
                if (first < 0) continue;
                out.push_back(v);
            }
    return out;
}

inline SearchResult search_points(const WehlerSurface& s, long bound, bool include_quadratic = false) {
    if (bound < 1) throw InvalidArgument("search bound must be positive");
    auto surf = over_rationals(s);
    SearchResult res;
    for (const auto& x : projective_box(bound)) {
        Fiber<Integer> fb = surf.fiber(x, 1);
        auto basis = line_basis(fb.line);
        if (!basis) {
            ++res.degenerate_fibers;
            continue;
        }
        const auto& [z1, z2] = *basis;
        auto [a, b, c] = binary_form(fb, z1, z2);
        if (sgn(a) == 0 && sgn(b) == 0 && sgn(c) == 0) {
            ++res.degenerate_fibers;
            continue;
        }
        auto emit = [&](const Integer& sc, const Integer& tc) {
            Triple<Integer> y{sc * z1[0] + tc * z2[0], sc * z1[1] + tc * z2[1], sc * z1[2] + tc * z2[2]};
            normalize(y);
            RationalPoint pt{x, y};
            if (std::find(res.rational.begin(), res.rational.end(), pt) == res.rational.end())
                res.rational.push_back(std::move(pt));
        };
        if (sgn(a) == 0) {
            emit(1, 0);
            if (sgn(b) != 0) emit(-c, b);
            continue;
        }
        Integer disc = b * b - 4 * a * c;
        if (sgn(disc) == 0) {
            emit(-b, 2 * a);
        } else if (sgn(disc) > 0 && mpz_perfect_square_p(disc.get_mpz_t()) != 0) {
            Integer r = sqrt(disc);
            emit(-b + r, 2 * a);
            emit(-b - r, 2 * a);
        } else if (include_quadratic) {
            auto [m, d] = square_decomposition(disc);
            if (!d.fits_slong_p()) continue;
            long dl = d.get_si();
            for (int sign : {1, -1}) {
                // (−b ± m√d)·z1 + 2a·z2
                Triple<QuadInt> y;
                Triple<QuadInt> xq;
                for (int i = 0; i < 3; ++i) {
                    y[i] = QuadInt(-b * z1[i] + 2 * a * z2[i], sign * m * z1[i], dl);
                    xq[i] = QuadInt(x[i], 0, dl);
                }
                normalize(y);
                res.quadratic.push_back({xq, y});
            }
        }
    }
    std::stable_sort(res.rational.begin(), res.rational.end(), [](const RationalPoint& l, const RationalPoint& r) {
        return naive_height(l) < naive_height(r);
    });
    return res;
}

// ---------------------------------------------------------------------------
// Diagnostics

struct SurfaceDiagnostics {
    std::vector<std::string> findings;
    bool degenerate() const noexcept { return !findings.empty(); }
    std::string summary() const {
        if (findings.empty()) return "no degeneracy found";
        std::string s;
        for (const auto& f : findings) s += (s.empty() ? "" : "; ") + f;
        return s;
    }
};

/// Reports vanishing forms and probes random fibers of both projections.
/// Does not certify smoothness.
inline SurfaceDiagnostics validate_surface(const WehlerSurface& s, unsigned probes = 64, unsigned seed = 0x5eed) {
    SurfaceDiagnostics diag;
    if (s.f_vanishes()) diag.findings.push_back("degenerate: F vanishes");
    if (s.g_vanishes()) diag.findings.push_back("degenerate: G vanishes");
    if (diag.degenerate()) return diag;

    auto surf = over_rationals(s);
    std::mt19937 rng(seed);
    std::uniform_int_distribution<long> coord(-9, 9);
    for (unsigned k = 0; k < probes; ++k) {
        Triple<Integer> base{coord(rng), coord(rng), coord(rng)};
        if (is_zero_triple(base)) continue;
        for (int projection : {1, 2}) {
            Fiber<Integer> fb = surf.fiber(base, projection);
            auto basis = line_basis(fb.line);
            std::string where = (projection == 1 ? "x=" : "y=") + triple_to_string(base);
            if (!basis) {
                diag.findings.push_back("degenerate fiber over " + where + ": linear form vanishes");
                continue;
            }
            auto [a, b, c] = binary_form(fb, basis->first, basis->second);
            if (sgn(a) == 0 && sgn(b) == 0 && sgn(c) == 0)
                diag.findings.push_back("degenerate fiber over " + where + ": line lies on the conic");
        }
    }
    return diag;
}

}  // namespace k3dyn
