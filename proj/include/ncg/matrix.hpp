#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "ncg/scalar.hpp"

namespace ncg {

/// Dense row-major matrix over any backend scalar.
template <class S>
class Matrix {
public:
    using Traits = scalar_traits<S>;

    Matrix() = default;
    Matrix(size_t rows, size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, Traits::zero()) {}

    static Matrix identity(size_t n) {
        Matrix m(n, n);
        for (size_t i = 0; i < n; ++i) m(i, i) = Traits::one();
        return m;
    }
    static Matrix diagonal(const std::vector<S>& d) {
        Matrix m(d.size(), d.size());
        for (size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
        return m;
    }

    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    S& operator()(size_t i, size_t j) { return data_[i * cols_ + j]; }
    const S& operator()(size_t i, size_t j) const { return data_[i * cols_ + j]; }

    Matrix adjoint() const {
        Matrix r(cols_, rows_);
        for (size_t i = 0; i < rows_; ++i)
            for (size_t j = 0; j < cols_; ++j) r(j, i) = Traits::conj((*this)(i, j));
        return r;
    }

    Matrix block(size_t r0, size_t c0, size_t nr, size_t nc) const {
        Matrix r(nr, nc);
        for (size_t i = 0; i < nr; ++i)
            for (size_t j = 0; j < nc; ++j) r(i, j) = (*this)(r0 + i, c0 + j);
        return r;
    }
    void set_block(size_t r0, size_t c0, const Matrix& b) {
        for (size_t i = 0; i < b.rows(); ++i)
            for (size_t j = 0; j < b.cols(); ++j) (*this)(r0 + i, c0 + j) = b(i, j);
    }

    Matrix& operator+=(const Matrix& o) {
        check_same(o, "+");
        for (size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
        return *this;
    }
    Matrix& operator-=(const Matrix& o) {
        check_same(o, "-");
        for (size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
        return *this;
    }
    Matrix& operator*=(const S& s) {
        for (auto& v : data_) v *= s;
        return *this;
    }
    Matrix operator-() const {
        Matrix r(*this);
        for (auto& v : r.data_) v = -v;
        return r;
    }

    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator*(Matrix a, const S& s) { return a *= s; }
    friend Matrix operator*(const S& s, Matrix a) { return a *= s; }
    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_)
            throw ValidationError("matrix product shape mismatch " + a.shape() + " * " + b.shape());
        Matrix r(a.rows_, b.cols_);
        for (size_t i = 0; i < a.rows_; ++i)
            for (size_t k = 0; k < a.cols_; ++k) {
                const S& aik = a(i, k);
                if (Traits::is_exact && Traits::is_zero(aik)) continue;
                for (size_t j = 0; j < b.cols_; ++j) {
                    const S& bkj = b(k, j);
                    if (Traits::is_exact && Traits::is_zero(bkj)) continue;
                    r(i, j) += aik * bkj;
                }
            }
        return r;
    }

    // Exact equality on exact backends, entrywise within epsilon on float.
    friend bool operator==(const Matrix& a, const Matrix& b) {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_) return false;
        for (size_t k = 0; k < a.data_.size(); ++k)
            if (!Traits::equal(a.data_[k], b.data_[k])) return false;
        return true;
    }

    bool is_zero() const {
        return std::all_of(data_.begin(), data_.end(), [](const S& v) { return Traits::is_zero(v); });
    }

    S trace() const {
        S t = Traits::zero();
        for (size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
        return t;
    }

    std::string shape() const { return std::to_string(rows_) + "x" + std::to_string(cols_); }

    const std::vector<S>& data() const { return data_; }

private:
    void check_same(const Matrix& o, const char* op) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw ValidationError(std::string("matrix shape mismatch in ") + op + ": " + shape() +
                                  " vs " + o.shape());
    }

    size_t rows_ = 0;
    size_t cols_ = 0;
    std::vector<S> data_;
};

template <class S>
Matrix<S> direct_sum(const Matrix<S>& a, const Matrix<S>& b) {
    Matrix<S> r(a.rows() + b.rows(), a.cols() + b.cols());
    r.set_block(0, 0, a);
    r.set_block(a.rows(), a.cols(), b);
    return r;
}

template <class S>
Matrix<S> kron(const Matrix<S>& a, const Matrix<S>& b) {
    Matrix<S> r(a.rows() * b.rows(), a.cols() * b.cols());
    for (size_t i = 0; i < a.rows(); ++i)
        for (size_t j = 0; j < a.cols(); ++j)
            for (size_t k = 0; k < b.rows(); ++k)
                for (size_t l = 0; l < b.cols(); ++l) r(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
    return r;
}

template <class S>
Eigen::MatrixXcd to_eigen(const Matrix<S>& m) {
    Eigen::MatrixXcd e(m.rows(), m.cols());
    for (size_t i = 0; i < m.rows(); ++i)
        for (size_t j = 0; j < m.cols(); ++j) e(i, j) = scalar_traits<S>::to_complex(m(i, j));
    return e;
}

/// Largest singular value (computed in double precision on every backend).
template <class S>
double operator_norm(const Matrix<S>& m) {
    if (m.rows() == 0 || m.cols() == 0) return 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(to_eigen(m));
    return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

template <class S>
double max_abs(const Matrix<S>& m) {
    double r = 0;
    for (const auto& v : m.data()) r = std::max(r, scalar_traits<S>::abs(v));
    return r;
}

// ---------------------------------------------------------------------------
// Gaussian elimination

template <class S>
struct Echelon {
    Matrix<S> reduced;            // reduced row echelon form
    std::vector<size_t> pivots;   // pivot column of each nonzero row
};

/// Reduced row echelon form. Exact backends pick the first nonzero pivot;
/// float picks the largest entry and treats |x| <= epsilon as zero.
template <class S>
Echelon<S> rref(Matrix<S> a, size_t max_pivot_col = static_cast<size_t>(-1)) {
    using T = scalar_traits<S>;
    const size_t rows = a.rows(), cols = a.cols();
    const size_t limit = std::min(cols, max_pivot_col);
    std::vector<size_t> pivots;
    size_t r = 0;
    for (size_t c = 0; c < limit && r < rows; ++c) {
        size_t best = rows;
        if constexpr (T::is_exact) {
            for (size_t i = r; i < rows; ++i)
                if (!T::is_zero(a(i, c))) {
                    best = i;
                    break;
                }
        } else {
            double bv = epsilon();
            for (size_t i = r; i < rows; ++i)
                if (T::abs(a(i, c)) > bv) {
                    bv = T::abs(a(i, c));
                    best = i;
                }
        }
        if (best == rows) continue;
        if (best != r)
            for (size_t j = 0; j < cols; ++j) std::swap(a(best, j), a(r, j));
        S inv = T::one() / a(r, c);
        for (size_t j = c; j < cols; ++j) a(r, j) *= inv;
        if constexpr (!T::is_exact) a(r, c) = T::one();
        for (size_t i = 0; i < rows; ++i) {
            if (i == r || T::is_zero(a(i, c))) continue;
            S f = a(i, c);
            for (size_t j = c; j < cols; ++j) {
                if (T::is_exact && T::is_zero(a(r, j))) continue;
                a(i, j) -= f * a(r, j);
            }
            if constexpr (!T::is_exact) a(i, c) = T::zero();
        }
        pivots.push_back(c);
        ++r;
    }
    if constexpr (!T::is_exact) {
        for (size_t i = 0; i < rows; ++i)
            for (size_t j = 0; j < cols; ++j)
                if (T::is_zero(a(i, j))) a(i, j) = T::zero();
    }
    return {std::move(a), std::move(pivots)};
}

template <class S>
size_t rank(const Matrix<S>& a) {
    return rref(a).pivots.size();
}

/// Basis of the null space, one vector per column.
template <class S>
Matrix<S> nullspace(const Matrix<S>& a) {
    using T = scalar_traits<S>;
    auto e = rref(a);
    const size_t n = a.cols();
    std::vector<bool> is_pivot(n, false);
    for (size_t p : e.pivots) is_pivot[p] = true;
    std::vector<size_t> free_cols;
    for (size_t j = 0; j < n; ++j)
        if (!is_pivot[j]) free_cols.push_back(j);
    Matrix<S> basis(n, free_cols.size());
    for (size_t k = 0; k < free_cols.size(); ++k) {
        size_t f = free_cols[k];
        basis(f, k) = T::one();
        for (size_t r = 0; r < e.pivots.size(); ++r) basis(e.pivots[r], k) = -e.reduced(r, f);
    }
    return basis;
}

template <class S>
Matrix<S> inverse(const Matrix<S>& a) {
    if (!a.square()) throw ValidationError("inverse of non-square matrix " + a.shape());
    const size_t n = a.rows();
    Matrix<S> aug(n, 2 * n);
    aug.set_block(0, 0, a);
    aug.set_block(0, n, Matrix<S>::identity(n));
    auto e = rref(std::move(aug), n);
    if (e.pivots.size() != n) throw DomainError("matrix is singular");
    return e.reduced.block(0, n, n, n);
}

/// Orthogonal projection onto the span of the columns of V (assumed independent).
template <class S>
Matrix<S> column_projection(const Matrix<S>& v) {
    if (v.cols() == 0) return Matrix<S>(v.rows(), v.rows());
    Matrix<S> vh = v.adjoint();
    return v * inverse(vh * v) * vh;
}

/// Orthogonal projection onto ker(A).
template <class S>
Matrix<S> kernel_projection(const Matrix<S>& a) {
    return column_projection(nullspace(a));
}

template <class S>
Matrix<S> stack_rows(const std::vector<Matrix<S>>& parts, size_t cols) {
    size_t rows = 0;
    for (const auto& p : parts) rows += p.rows();
    Matrix<S> r(rows, cols);
    size_t off = 0;
    for (const auto& p : parts) {
        if (p.cols() != cols) throw ValidationError("stack_rows: column mismatch");
        r.set_block(off, 0, p);
        off += p.rows();
    }
    return r;
}

/// Incrementally maintained span with echelon-reduced stored vectors.
template <class S>
class IncrementalSpan {
public:
    using T = scalar_traits<S>;
    explicit IncrementalSpan(size_t dim) : dim_(dim) {}

    size_t rank() const { return rows_.size(); }

    /// Inserts v; returns true iff v was independent of the current span.
    bool insert(std::vector<S> v) {
        reduce(v);
        size_t p = first_nonzero(v);
        if (p == dim_) return false;
        S inv = T::one() / v[p];
        for (size_t j = p; j < dim_; ++j)
            if (!T::is_zero(v[j])) v[j] *= inv;
        rows_.push_back(std::move(v));
        pivots_.push_back(p);
        return true;
    }

    bool contains(std::vector<S> v) const {
        reduce(v);
        return first_nonzero(v) == dim_;
    }

private:
    void reduce(std::vector<S>& v) const {
        for (size_t k = 0; k < rows_.size(); ++k) {
            const S f = v[pivots_[k]];
            if (T::is_zero(f)) continue;
            const auto& row = rows_[k];
            for (size_t j = pivots_[k]; j < dim_; ++j)
                if (!T::is_zero(row[j])) v[j] -= f * row[j];
            if constexpr (!T::is_exact) v[pivots_[k]] = T::zero();
        }
    }
    size_t first_nonzero(const std::vector<S>& v) const {
        for (size_t j = 0; j < dim_; ++j)
            if (!T::is_zero(v[j])) return j;
        return dim_;
    }

    size_t dim_;
    std::vector<std::vector<S>> rows_;
    std::vector<size_t> pivots_;
};

}  // namespace ncg
