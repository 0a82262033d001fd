#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace k3dyn {

using Integer = mpz_class;
using Rational = mpq_class;

inline std::string to_string(const Integer& v) { return v.get_str(); }

inline std::string to_string(const Rational& v) {
    Rational c = v;
    c.canonicalize();
    return c.get_den() == 1 ? c.get_num().get_str() : c.get_str();
}

/// Natural log of |v| for v != 0, valid for integers far beyond double range.
inline double log_abs(const Integer& v) {
    long exp = 0;
    double mant = mpz_get_d_2exp(&exp, v.get_mpz_t());
    return std::log(std::fabs(mant)) + static_cast<double>(exp) * std::log(2.0);
}

/// a / b as a double without overflowing on huge operands.
inline double ratio_to_double(const Integer& a, const Integer& b) {
    if (sgn(a) == 0) return 0.0;
    long ea = 0, eb = 0;
    double ma = mpz_get_d_2exp(&ea, a.get_mpz_t());
    double mb = mpz_get_d_2exp(&eb, b.get_mpz_t());
    return std::ldexp(ma / mb, static_cast<int>(ea - eb));
}

/// Greatest common divisor of all entries (nonnegative; 0 for an all-zero span).
inline Integer content(std::span<const Integer> v) {
    Integer g = 0;
    for (const auto& c : v) {
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
        if (g == 1) break;
    }
    return g;
}

/// Divide by the content and make the first nonzero entry positive.
inline void make_primitive(std::vector<Integer>& v) {
    Integer g = content(v);
    if (g == 0) return;
    auto first = std::find_if(v.begin(), v.end(), [](const Integer& c) { return sgn(c) != 0; });
    if (sgn(*first) < 0) g = -g;
    if (g != 1)
        for (auto& c : v) mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), g.get_mpz_t());
}

/// Clear denominators of a rational vector, then make it primitive.
inline std::vector<Integer> primitive_from_rational(std::span<const Rational> v) {
    Integer l = 1;
    for (const auto& c : v) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
    std::vector<Integer> out;
    out.reserve(v.size());
    for (const auto& c : v) out.emplace_back(Integer(c.get_num() * (l / c.get_den())));
    make_primitive(out);
    return out;
}

namespace detail {

inline Integer pollard_brent(const Integer& n) {
    if (n % 2 == 0) return 2;
    gmp_randclass rng(gmp_randinit_default);
    rng.seed(0x4b33);
    for (;;) {
        Integer y = rng.get_z_range(n - 1) + 1;
        Integer c = rng.get_z_range(n - 1) + 1;
        Integer m = 128, g = 1, r = 1, q = 1, x, ys;
        while (g == 1) {
            x = y;
            for (Integer i = 0; i < r; ++i) y = (y * y + c) % n;
            Integer k = 0;
            while (k < r && g == 1) {
                ys = y;
                Integer lim = std::min(m, Integer(r - k));
                for (Integer i = 0; i < lim; ++i) {
                    y = (y * y + c) % n;
                    q = (q * abs(x - y)) % n;
                }
                g = gcd(q, n);
                k += m;
            }
            r *= 2;
        }
        if (g == n) {
            do {
                ys = (ys * ys + c) % n;
                g = gcd(abs(x - ys), n);
            } while (g == 1);
        }
        if (g != n) return g;
    }
}

inline void factor_into(const Integer& n, std::map<Integer, unsigned>& out) {
    if (n == 1) return;
    if (mpz_probab_prime_p(n.get_mpz_t(), 30) != 0) {
        ++out[n];
        return;
    }
    Integer d = pollard_brent(n);
    factor_into(d, out);
    factor_into(Integer(n / d), out);
}

}  // namespace detail

/// Prime factorization of |n| (n != 0): trial division, then Pollard-Brent.
inline std::map<Integer, unsigned> factorize(Integer n) {
    std::map<Integer, unsigned> out;
    n = abs(n);
    for (unsigned long p = 2; p < 10000 && n > 1; p += (p == 2 ? 1 : 2)) {
        while (mpz_divisible_ui_p(n.get_mpz_t(), p) != 0) {
            ++out[Integer(p)];
            n /= p;
        }
    }
    detail::factor_into(n, out);
    return out;
}

/// Positive divisors of |n| (n != 0), ascending.
inline std::vector<Integer> divisors(const Integer& n) {
    std::vector<Integer> ds{1};
    for (const auto& [p, e] : factorize(n)) {
        std::size_t base = ds.size();
        Integer pk = 1;
        for (unsigned k = 1; k <= e; ++k) {
            pk *= p;
            for (std::size_t i = 0; i < base; ++i) ds.push_back(ds[i] * pk);
        }
    }
    std::sort(ds.begin(), ds.end());
    return ds;
}

/// Write n = m^2 * d with d squarefree (sign carried by d). n != 0.
inline std::pair<Integer, Integer> square_decomposition(const Integer& n) {
    Integer m = 1, d = sgn(n) < 0 ? -1 : 1;
    for (const auto& [p, e] : factorize(n)) {
        for (unsigned k = 0; k < e / 2; ++k) m *= p;
        if (e % 2 == 1) d *= p;
    }
    return {m, d};
}

inline bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

}  // namespace k3dyn
