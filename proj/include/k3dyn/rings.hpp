#pragma once

// Coordinate rings for projective points: the integers (points over Q with
// cleared denominators), Z[√d] (points over Q(√d)), and F_p. Every element
// type supports + − * and is_zero(); lift() embeds an integer coefficient
// into the ring of a reference element, which carries d or p.

#include <array>
#include <cstdint>
#include <string>
#include <type_traits>

#include "k3dyn/errors.hpp"
#include "k3dyn/integer.hpp"

namespace k3dyn {

template <class T>
using Triple = std::array<T, 3>;

// ---------------------------------------------------------------------------
// F_p, p < 2^16 so products fit in 32 bits.

struct Fp {
    std::uint32_t v = 0;
    std::uint32_t p = 0;

    Fp() = default;
    Fp(std::int64_t value, std::uint32_t modulus) : v(reduce(value, modulus)), p(modulus) {}

    static std::uint32_t reduce(std::int64_t value, std::uint32_t modulus) {
        std::int64_t r = value % static_cast<std::int64_t>(modulus);
        return static_cast<std::uint32_t>(r < 0 ? r + modulus : r);
    }

    friend Fp operator+(Fp a, Fp b) { return {static_cast<std::int64_t>(a.v) + b.v, a.p}; }
    friend Fp operator-(Fp a, Fp b) { return {static_cast<std::int64_t>(a.v) - b.v, a.p}; }
    friend Fp operator*(Fp a, Fp b) { return {static_cast<std::int64_t>(a.v) * b.v, a.p}; }
    friend Fp operator-(Fp a) { return {-static_cast<std::int64_t>(a.v), a.p}; }
    friend bool operator==(Fp a, Fp b) { return a.v == b.v; }

    Fp inverse() const {
        if (v == 0) throw InvalidArgument("inverse of zero in F_" + std::to_string(p));
        // Fermat: v^(p-2)
        std::uint64_t result = 1, base = v, e = p - 2;
        while (e) {
            if (e & 1) result = result * base % p;
            base = base * base % p;
            e >>= 1;
        }
        return {static_cast<std::int64_t>(result), p};
    }
};

inline bool is_zero(const Fp& a) { return a.v == 0; }
inline Fp lift(const Integer& c, const Fp& like) {
    return {static_cast<std::int64_t>(mpz_fdiv_ui(c.get_mpz_t(), like.p)), like.p};
}
inline std::string to_string(const Fp& a) { return std::to_string(a.v); }

// ---------------------------------------------------------------------------
// Z[√d], d squarefree, d != 0, 1.

struct QuadInt {
    Integer a;
    Integer b;
    long d = 0;

    QuadInt() = default;
    QuadInt(Integer a_, Integer b_, long d_) : a(std::move(a_)), b(std::move(b_)), d(d_) {}

    friend QuadInt operator+(const QuadInt& x, const QuadInt& y) { return {x.a + y.a, x.b + y.b, field(x, y)}; }
    friend QuadInt operator-(const QuadInt& x, const QuadInt& y) { return {x.a - y.a, x.b - y.b, field(x, y)}; }
    friend QuadInt operator-(const QuadInt& x) { return {-x.a, -x.b, x.d}; }
    friend QuadInt operator*(const QuadInt& x, const QuadInt& y) {
        long d = field(x, y);
        return {x.a * y.a + d * (x.b * y.b), x.a * y.b + x.b * y.a, d};
    }
    friend bool operator==(const QuadInt& x, const QuadInt& y) { return x.a == y.a && x.b == y.b; }

    QuadInt conjugate() const { return {a, -b, d}; }
    Integer norm() const { return a * a - d * (b * b); }

private:
    static long field(const QuadInt& x, const QuadInt& y) {
        if (x.d != y.d) throw InvalidArgument("mixing Q(sqrt " + std::to_string(x.d) + ") and Q(sqrt " +
                                              std::to_string(y.d) + ")");
        return x.d;
    }
};

inline bool is_zero(const QuadInt& x) { return sgn(x.a) == 0 && sgn(x.b) == 0; }
inline QuadInt lift(const Integer& c, const QuadInt& like) { return {c, 0, like.d}; }

inline std::string to_string(const QuadInt& x) {
    if (sgn(x.b) == 0) return x.a.get_str();
    std::string rb = (x.b == 1) ? "r" : (x.b == -1) ? "-r" : x.b.get_str() + "*r";
    if (sgn(x.a) == 0) return rb;
    return x.a.get_str() + (sgn(x.b) > 0 ? "+" : "") + rb;
}

// ---------------------------------------------------------------------------
// Integers (points over Q).

inline bool is_zero(const Integer& x) { return sgn(x) == 0; }
inline Integer lift(const Integer& c, const Integer&) { return c; }

// ---------------------------------------------------------------------------
// Projective normalization.

template <class T>
bool is_zero_triple(const Triple<T>& v) {
    return is_zero(v[0]) && is_zero(v[1]) && is_zero(v[2]);
}

/// Coprime integers, first nonzero coordinate positive.
inline void normalize(Triple<Integer>& v) {
    Integer g = content(v);
    if (g == 0) return;
    std::size_t k = 0;
    while (sgn(v[k]) == 0) ++k;
    if (sgn(v[k]) < 0) g = -g;
    if (g == 1) return;
    for (auto& c : v) mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), g.get_mpz_t());
}

/// First nonzero coordinate 1.
inline void normalize(Triple<Fp>& v) {
    for (const auto& c : v) {
        if (!is_zero(c)) {
            Fp inv = c.inverse();
            for (auto& x : v) x = x * inv;
            return;
        }
    }
}

/// Scale so the first nonzero coordinate is a positive rational integer
/// (multiply by the conjugate of that coordinate), then divide by the content
/// of all rational and irrational parts. This form is unique per projective point.
inline void normalize(Triple<QuadInt>& v) {
    std::size_t k = 0;
    while (k < 3 && is_zero(v[k])) ++k;
    if (k == 3) return;
    if (sgn(v[k].b) != 0) {
        QuadInt c = v[k].conjugate();
        for (auto& x : v) x = x * c;
    }
    std::array<Integer, 6> parts{v[0].a, v[0].b, v[1].a, v[1].b, v[2].a, v[2].b};
    Integer g = content(parts);
    if (sgn(v[k].a) < 0) g = -g;
    for (auto& x : v) {
        mpz_divexact(x.a.get_mpz_t(), x.a.get_mpz_t(), g.get_mpz_t());
        mpz_divexact(x.b.get_mpz_t(), x.b.get_mpz_t(), g.get_mpz_t());
    }
}

template <class T>
Triple<T> normalized(Triple<T> v) {
    normalize(v);
    return v;
}

template <class T>
Triple<T> cross(const Triple<T>& a, const Triple<T>& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

template <class T>
std::string triple_to_string(const Triple<T>& v) {
    using k3dyn::to_string;
    if constexpr (std::is_same_v<T, Integer>)
        return "[" + v[0].get_str() + ":" + v[1].get_str() + ":" + v[2].get_str() + "]";
    else
        return "[" + to_string(v[0]) + ":" + to_string(v[1]) + ":" + to_string(v[2]) + "]";
}

}  // namespace k3dyn
