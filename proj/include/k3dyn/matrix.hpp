#pragma once

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include "k3dyn/errors.hpp"
#include "k3dyn/integer.hpp"

namespace k3dyn {

/// Dense row-major matrix over an exact scalar (Integer or Rational).
template <class Scalar>
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    Matrix(std::initializer_list<std::initializer_list<long>> init) {
        rows_ = init.size();
        cols_ = rows_ == 0 ? 0 : init.begin()->size();
        data_.reserve(rows_ * cols_);
        for (const auto& row : init) {
            if (row.size() != cols_) throw DimensionMismatch("ragged matrix literal");
            for (long v : row) data_.emplace_back(v);
        }
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool square() const noexcept { return rows_ == cols_; }

    Scalar& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Scalar& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::vector<Scalar> column(std::size_t j) const {
        std::vector<Scalar> c(rows_);
        for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
        return c;
    }

    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

    friend Matrix operator+(const Matrix& a, const Matrix& b) {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw DimensionMismatch("matrix sum shape mismatch");
        Matrix r = a;
        for (std::size_t k = 0; k < r.data_.size(); ++k) r.data_[k] += b.data_[k];
        return r;
    }

    friend Matrix operator-(const Matrix& a, const Matrix& b) {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw DimensionMismatch("matrix difference shape mismatch");
        Matrix r = a;
        for (std::size_t k = 0; k < r.data_.size(); ++k) r.data_[k] -= b.data_[k];
        return r;
    }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_)
            throw DimensionMismatch("matrix product: " + std::to_string(a.cols_) + " columns vs " +
                                    std::to_string(b.rows_) + " rows");
        Matrix r(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const Scalar& aik = a(i, k);
                if (sgn(aik) == 0) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) r(i, j) += aik * b(k, j);
            }
        return r;
    }

    friend Matrix operator*(const Scalar& s, const Matrix& a) {
        Matrix r = a;
        for (auto& v : r.data_) v *= s;
        return r;
    }

    std::vector<Scalar> operator*(const std::vector<Scalar>& v) const {
        if (v.size() != cols_)
            throw DimensionMismatch("matrix-vector product: " + std::to_string(cols_) + " columns vs length " +
                                    std::to_string(v.size()));
        std::vector<Scalar> r(rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) r[i] += (*this)(i, j) * v[j];
        return r;
    }

    Scalar trace() const {
        Scalar t = 0;
        for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
        return t;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Scalar> data_;
};

using IntMatrix = Matrix<Integer>;
using RatMatrix = Matrix<Rational>;

inline RatMatrix to_rational(const IntMatrix& m) {
    RatMatrix r(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = m(i, j);
    return r;
}

/// Determinant by fraction-free Bareiss elimination.
inline Integer determinant(const IntMatrix& a) {
    if (!a.square()) throw DimensionMismatch("determinant of a non-square matrix");
    const std::size_t n = a.rows();
    if (n == 0) return 1;
    IntMatrix m = a;
    Integer prev = 1;
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (m(k, k) == 0) {
            std::size_t p = k + 1;
            while (p < n && m(p, k) == 0) ++p;
            if (p == n) return 0;
            for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(p, j));
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) {
                Integer v = m(i, j) * m(k, k) - m(i, k) * m(k, j);
                mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
                m(i, j) = v;
            }
        prev = m(k, k);
    }
    return sign * m(n - 1, n - 1);
}

/// Reduced row echelon form in place; returns the pivot columns.
inline std::vector<std::size_t> row_reduce(RatMatrix& m) {
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
        std::size_t p = r;
        while (p < m.rows() && m(p, c) == 0) ++p;
        if (p == m.rows()) continue;
        for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(r, j), m(p, j));
        Rational inv = 1 / m(r, c);
        for (std::size_t j = 0; j < m.cols(); ++j) m(r, j) *= inv;
        for (std::size_t i = 0; i < m.rows(); ++i) {
            if (i == r || m(i, c) == 0) continue;
            Rational f = m(i, c);
            for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) -= f * m(r, j);
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

inline std::size_t rank(const RatMatrix& m) {
    RatMatrix w = m;
    return row_reduce(w).size();
}

/// Integral basis of the right kernel; every vector primitive with first
/// nonzero entry positive. Basis vector k has a 1-pattern on free column k.
inline std::vector<std::vector<Integer>> kernel_basis(const RatMatrix& m) {
    RatMatrix w = m;
    auto pivots = row_reduce(w);
    std::vector<bool> is_pivot(m.cols(), false);
    for (auto c : pivots) is_pivot[c] = true;
    std::vector<std::vector<Integer>> basis;
    for (std::size_t f = 0; f < m.cols(); ++f) {
        if (is_pivot[f]) continue;
        std::vector<Rational> v(m.cols());
        v[f] = 1;
        for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -w(r, f);
        basis.push_back(primitive_from_rational(v));
    }
    return basis;
}

/// Exact inverse; nullopt when singular.
inline std::optional<RatMatrix> inverse(const RatMatrix& a) {
    if (!a.square()) throw DimensionMismatch("inverse of a non-square matrix");
    const std::size_t n = a.rows();
    RatMatrix aug(n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) aug(i, j) = a(i, j);
        aug(i, n + i) = 1;
    }
    auto pivots = row_reduce(aug);
    if (pivots.size() < n || pivots[n - 1] != n - 1) return std::nullopt;
    RatMatrix inv(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) inv(i, j) = aug(i, n + j);
    return inv;
}

inline IntMatrix power(const IntMatrix& a, unsigned long e) {
    IntMatrix result = IntMatrix::identity(a.rows());
    IntMatrix base = a;
    while (e > 0) {
        if (e & 1UL) result = result * base;
        e >>= 1;
        if (e > 0) base = base * base;
    }
    return result;
}

}  // namespace k3dyn
