#pragma once

// Exact linear algebra on a Picard lattice with a chosen basis L_1..L_n.
// Line-bundle classes are written additively: tensor product is vector sum
// and L^{⊗q} is the scalar multiple q·L. A pullback map stores the image of
// basis class L_j as its column j.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "k3dyn/errors.hpp"
#include "k3dyn/integer.hpp"
#include "k3dyn/matrix.hpp"

namespace k3dyn {

struct PicardClass {
    std::vector<Integer> coeffs;

    PicardClass() = default;
    explicit PicardClass(std::vector<Integer> c) : coeffs(std::move(c)) {}
    PicardClass(std::initializer_list<long> c) : coeffs(c.begin(), c.end()) {}

    std::size_t rank() const noexcept { return coeffs.size(); }
    bool is_trivial() const {
        return std::all_of(coeffs.begin(), coeffs.end(), [](const Integer& v) { return sgn(v) == 0; });
    }

    friend bool operator==(const PicardClass&, const PicardClass&) = default;
};

inline std::string to_string(const PicardClass& c);

struct PullbackMap {
    IntMatrix matrix;
    std::string label;
    /// Set when the map is the pullback of an automorphism; then det = ±1.
    bool automorphism = false;

    PullbackMap() = default;
    PullbackMap(IntMatrix m, std::string l, bool is_automorphism = false)
        : matrix(std::move(m)), label(std::move(l)), automorphism(is_automorphism) {
        validate();
    }

    std::size_t rank() const noexcept { return matrix.rows(); }

    void validate() const {
        if (!matrix.square())
            throw DimensionMismatch("pullback '" + label + "' is not square (" + std::to_string(matrix.rows()) +
                                    "x" + std::to_string(matrix.cols()) + ")");
        if (automorphism) {
            Integer d = determinant(matrix);
            if (d != 1 && d != -1)
                throw NotUnimodular("pullback '" + label + "' of an automorphism has determinant " + to_string(d));
        }
    }

    bool unimodular() const {
        Integer d = determinant(matrix);
        return d == 1 || d == -1;
    }
};

struct MorphismSystem {
    std::size_t rank = 0;
    std::vector<PullbackMap> maps;

    MorphismSystem() = default;
    MorphismSystem(std::size_t n, std::vector<PullbackMap> ms) : rank(n), maps(std::move(ms)) { validate(); }

    std::size_t size() const noexcept { return maps.size(); }

    void validate() const {
        if (rank == 0) throw InvalidArgument("lattice rank must be positive");
        if (maps.empty()) throw InvalidArgument("a morphism system needs at least one map");
        for (const auto& m : maps) {
            m.validate();
            if (m.rank() != rank)
                throw DimensionMismatch("map '" + m.label + "' has rank " + std::to_string(m.rank()) +
                                        ", system rank is " + std::to_string(rank));
        }
    }
};

/// Proxy for the ample cone: the nonnegative orthant, or the cone spanned by
/// finitely many generators.
struct Cone {
    std::vector<PicardClass> generators;  // empty means positive orthant

    static Cone positive_orthant() { return {}; }
    static Cone generated_by(std::vector<PicardClass> gens) {
        if (gens.empty()) throw InvalidArgument("generated cone needs at least one generator");
        for (const auto& g : gens)
            if (g.is_trivial()) throw InvalidArgument("cone generators must be nonzero");
        return Cone{std::move(gens)};
    }

    bool is_positive_orthant() const noexcept { return generators.empty(); }

    /// Columns are the generators (identity for the orthant).
    IntMatrix generator_matrix(std::size_t rank) const {
        if (is_positive_orthant()) return IntMatrix::identity(rank);
        IntMatrix g(rank, generators.size());
        for (std::size_t k = 0; k < generators.size(); ++k) {
            if (generators[k].rank() != rank)
                throw DimensionMismatch("cone generator " + std::to_string(k) + " has length " +
                                        std::to_string(generators[k].rank()) + ", lattice rank is " +
                                        std::to_string(rank));
            for (std::size_t i = 0; i < rank; ++i) g(i, k) = generators[k].coeffs[i];
        }
        return g;
    }
};

struct PolarizationCertificate {
    Rational q;
    std::vector<PicardClass> eigenbasis;
    PicardClass witness;
    bool verified = false;
};

/// One rational eigenvalue of the tensor-sum operator, as reported in diagnostics.
struct EigenspaceReport {
    Rational eigenvalue;
    std::size_t multiplicity = 0;
    std::vector<PicardClass> basis;
    std::optional<PicardClass> cone_witness;
};

struct PolarizationResult {
    std::size_t map_count = 0;
    std::vector<PolarizationCertificate> certificates;
    std::vector<EigenspaceReport> diagnostics;

    bool polarizable() const noexcept { return !certificates.empty(); }
};

// ---------------------------------------------------------------------------
// Operations

inline std::string to_string(const PicardClass& c) {
    std::string s = "(";
    for (std::size_t i = 0; i < c.coeffs.size(); ++i) {
        if (i) s += ",";
        s += c.coeffs[i].get_str();
    }
    return s + ")";
}

inline PicardClass apply_pullback(const PullbackMap& map, const PicardClass& c) {
    if (c.rank() != map.rank())
        throw DimensionMismatch("class of length " + std::to_string(c.rank()) + " vs map '" + map.label +
                                "' of rank " + std::to_string(map.rank()));
    return PicardClass(map.matrix * c.coeffs);
}

/// Matrix that applies `inner_applied_first` and then `outer_applied_last`.
/// Under contravariance the pullback of f∘g is compose_pullbacks(g^*, f^*).
inline PullbackMap compose_pullbacks(const PullbackMap& outer_applied_last, const PullbackMap& inner_applied_first) {
    if (outer_applied_last.rank() != inner_applied_first.rank())
        throw DimensionMismatch("cannot compose pullbacks of rank " + std::to_string(outer_applied_last.rank()) +
                                " and " + std::to_string(inner_applied_first.rank()));
    return PullbackMap(outer_applied_last.matrix * inner_applied_first.matrix,
                       outer_applied_last.label + "*" + inner_applied_first.label,
                       outer_applied_last.automorphism && inner_applied_first.automorphism);
}

/// Pullback of the composite morphism φ_k∘…∘φ_1 given the pullbacks of φ_1..φ_k
/// in application order: (φ_k∘…∘φ_1)^* = φ_1^*∘…∘φ_k^*, so φ_k^* acts first.
inline PullbackMap pullback_of_composite(std::span<const PullbackMap> application_order, std::string label) {
    if (application_order.empty()) throw InvalidArgument("empty composite");
    PullbackMap acc = application_order.front();
    for (std::size_t k = 1; k < application_order.size(); ++k) acc = compose_pullbacks(acc, application_order[k]);
    acc.label = std::move(label);
    return acc;
}

inline IntMatrix tensor_sum(const MorphismSystem& system) {
    IntMatrix s(system.rank, system.rank);
    for (const auto& m : system.maps) s = s + m.matrix;
    return s;
}

/// Coefficients c_0..c_n of det(λI − A), c_n = 1 (Faddeev–LeVerrier; every
/// division is exact over the integers).
inline std::vector<Integer> characteristic_polynomial(const IntMatrix& a) {
    if (!a.square()) throw DimensionMismatch("characteristic polynomial of a non-square matrix");
    const std::size_t n = a.rows();
    std::vector<Integer> c(n + 1);
    c[n] = 1;
    IntMatrix m(n, n);
    const IntMatrix id = IntMatrix::identity(n);
    for (std::size_t k = 1; k <= n; ++k) {
        m = a * m + c[n - k + 1] * id;
        Integer t = (a * m).trace();
        mpz_divexact_ui(t.get_mpz_t(), t.get_mpz_t(), k);
        c[n - k] = -t;
    }
    return c;
}

namespace detail {

inline Rational evaluate(const std::vector<Integer>& poly, const Rational& x) {
    Rational acc = 0;
    for (std::size_t k = poly.size(); k-- > 0;) acc = acc * x + poly[k];
    return acc;
}

/// Divide by (den·x − num); the caller guarantees num/den is a root.
inline std::vector<Integer> deflate(const std::vector<Integer>& poly, const Rational& root) {
    const std::size_t n = poly.size() - 1;
    std::vector<Rational> q(n);
    Rational carry = 0;
    for (std::size_t k = n; k-- > 0;) {
        carry = carry * root + poly[k + 1];
        q[k] = carry;
    }
    // q has rational entries with denominators dividing a power of root's den;
    // scale back to a primitive integer polynomial, roots unchanged.
    return primitive_from_rational(q);
}

}  // namespace detail

/// All rational roots of an integer polynomial (coefficients low to high),
/// with multiplicity, ascending. Candidates come from the rational root theorem.
inline std::vector<Rational> rational_roots(std::vector<Integer> poly) {
    while (!poly.empty() && poly.back() == 0) poly.pop_back();
    std::vector<Rational> roots;
    if (poly.size() <= 1) return roots;
    std::size_t zeros = 0;
    while (poly[zeros] == 0) ++zeros;
    roots.insert(roots.end(), zeros, Rational(0));
    poly.erase(poly.begin(), poly.begin() + static_cast<std::ptrdiff_t>(zeros));

    while (poly.size() > 1) {
        bool found = false;
        auto nums = divisors(poly.front());
        auto dens = divisors(poly.back());
        for (const auto& p : nums) {
            for (const auto& q : dens) {
                for (int s : {1, -1}) {
                    Rational r(s * p, q);
                    r.canonicalize();
                    if (r.get_den() != q) continue;  // visited with a smaller denominator
                    if (detail::evaluate(poly, r) == 0) {
                        roots.push_back(r);
                        poly = detail::deflate(poly, r);
                        found = true;
                        break;
                    }
                }
                if (found) break;
            }
            if (found) break;
        }
        if (!found) break;
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

inline std::vector<Rational> rational_eigenvalues(const IntMatrix& s) {
    return rational_roots(characteristic_polynomial(s));
}

inline std::vector<PicardClass> eigenspace_basis(const IntMatrix& s, const Rational& q) {
    RatMatrix m = to_rational(s);
    for (std::size_t i = 0; i < m.rows(); ++i) m(i, i) -= q;
    std::vector<PicardClass> out;
    for (auto& v : kernel_basis(m)) out.emplace_back(std::move(v));
    return out;
}

namespace detail {

inline bool next_combination(std::vector<std::size_t>& idx, std::size_t n) {
    const std::size_t k = idx.size();
    for (std::size_t i = k; i-- > 0;) {
        if (idx[i] < n - k + i) {
            ++idx[i];
            for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
            return true;
        }
    }
    return false;
}

}  // namespace detail

/// A primitive integral class in eigenspace(q) ∩ cone, or nullopt when the
/// intersection is {0}. The extreme rays of {λ ≥ 0 : (S − qI)Gλ = 0} are
/// enumerated exactly; the witness is the primitive part of G·Σ rays, which
/// lies in the relative interior of the intersection.
inline std::optional<PicardClass> cone_witness(const IntMatrix& s, const Rational& q, const Cone& cone) {
    const std::size_t n = s.rows();
    const IntMatrix g = cone.generator_matrix(n);
    const std::size_t r = g.cols();
    RatMatrix shifted = to_rational(s);
    for (std::size_t i = 0; i < n; ++i) shifted(i, i) -= q;
    const RatMatrix constraint = shifted * to_rational(g);

    const std::size_t dim = kernel_basis(constraint).size();
    if (dim == 0) return std::nullopt;

    std::vector<std::vector<Integer>> rays;
    auto consider = [&](const std::vector<std::size_t>& zero_set) {
        RatMatrix m(constraint.rows() + zero_set.size(), r);
        for (std::size_t i = 0; i < constraint.rows(); ++i)
            for (std::size_t j = 0; j < r; ++j) m(i, j) = constraint(i, j);
        for (std::size_t k = 0; k < zero_set.size(); ++k) m(constraint.rows() + k, zero_set[k]) = 1;
        auto ker = kernel_basis(m);
        if (ker.size() != 1) return;
        auto v = ker.front();
        bool nonneg = std::all_of(v.begin(), v.end(), [](const Integer& c) { return sgn(c) >= 0; });
        bool nonpos = std::all_of(v.begin(), v.end(), [](const Integer& c) { return sgn(c) <= 0; });
        if (!nonneg && !nonpos) return;
        if (nonpos)
            for (auto& c : v) c = -c;
        auto image = g * v;
        if (std::all_of(image.begin(), image.end(), [](const Integer& c) { return sgn(c) == 0; })) return;
        if (std::find(rays.begin(), rays.end(), v) == rays.end()) rays.push_back(std::move(v));
    };

    std::vector<std::size_t> idx(dim - 1);
    for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = k;
    if (idx.size() <= r) {
        do {
            consider(idx);
        } while (!idx.empty() && detail::next_combination(idx, r));
    }
    if (rays.empty()) return std::nullopt;

    std::vector<Integer> lambda(r);
    for (const auto& ray : rays)
        for (std::size_t j = 0; j < r; ++j) lambda[j] += ray[j];
    auto w = g * lambda;
    if (std::all_of(w.begin(), w.end(), [](const Integer& c) { return sgn(c) == 0; })) w = g * rays.front();
    // Content only: flipping the sign could leave a generated cone.
    Integer c = content(w);
    for (auto& v : w) mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), c.get_mpz_t());
    return PicardClass(std::move(w));
}

inline PolarizationResult find_polarizations(const MorphismSystem& system, const Cone& cone = Cone::positive_orthant()) {
    system.validate();
    const IntMatrix s = tensor_sum(system);
    const Rational t = static_cast<unsigned long>(system.size());

    PolarizationResult result;
    result.map_count = system.size();
    auto eigenvalues = rational_eigenvalues(s);
    for (std::size_t i = 0; i < eigenvalues.size();) {
        std::size_t j = i;
        while (j < eigenvalues.size() && eigenvalues[j] == eigenvalues[i]) ++j;
        EigenspaceReport report;
        report.eigenvalue = eigenvalues[i];
        report.multiplicity = j - i;
        report.basis = eigenspace_basis(s, report.eigenvalue);
        report.cone_witness = cone_witness(s, report.eigenvalue, cone);

        if (report.eigenvalue > t && report.cone_witness) {
            PolarizationCertificate cert;
            cert.q = report.eigenvalue;
            cert.eigenbasis = report.basis;
            cert.witness = *report.cone_witness;
            std::vector<Rational> lhs = to_rational(s) * std::vector<Rational>(cert.witness.coeffs.begin(),
                                                                               cert.witness.coeffs.end());
            cert.verified = true;
            for (std::size_t k = 0; k < lhs.size(); ++k)
                if (lhs[k] != cert.q * cert.witness.coeffs[k]) cert.verified = false;
            if (cert.verified) result.certificates.push_back(std::move(cert));
        }
        result.diagnostics.push_back(std::move(report));
        i = j;
    }
    // Largest degree first.
    std::reverse(result.certificates.begin(), result.certificates.end());
    return result;
}

/// The two-map system {A^m, A^{-m}} for the pullback A of an automorphism.
inline MorphismSystem power_pair(const PullbackMap& sigma_pullback, unsigned long m) {
    if (m == 0) throw InvalidArgument("power_pair needs m >= 1");
    if (!sigma_pullback.matrix.square()) throw DimensionMismatch("pullback '" + sigma_pullback.label + "' is not square");
    if (!sigma_pullback.unimodular())
        throw NotUnimodular("pullback '" + sigma_pullback.label + "' is not unimodular; its inverse is not integral");
    const std::size_t n = sigma_pullback.rank();
    auto inv = inverse(to_rational(sigma_pullback.matrix));
    IntMatrix inv_int(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) inv_int(i, j) = (*inv)(i, j).get_num();
    std::string suffix = "^" + std::to_string(m);
    return MorphismSystem(n, {PullbackMap(power(sigma_pullback.matrix, m), sigma_pullback.label + suffix, true),
                              PullbackMap(power(inv_int, m), sigma_pullback.label + "^-" + std::to_string(m), true)});
}

/// Degree q_m of the pair {σ^m, σ^-m} given q for {σ, σ^-1}:
/// q_0 = 2, q_1 = q, q_{m+1} = q·q_m − q_{m−1}.
inline Rational chebyshev_degree(const Rational& q, unsigned long m) {
    Rational prev = 2, cur = q;
    if (m == 0) return prev;
    for (unsigned long k = 1; k < m; ++k) {
        Rational next = q * cur - prev;
        prev = std::move(cur);
        cur = std::move(next);
    }
    return cur;
}

}  // namespace k3dyn
