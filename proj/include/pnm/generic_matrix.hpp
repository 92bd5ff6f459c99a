#pragma once

// Small dense matrix over an arbitrary ring-like scalar (cplx or Jet), used to
// evaluate built-in functions natively on jets. Numerics on plain doubles go
// through Eigen instead.

#include "pnm/jet.hpp"
#include "pnm/matcore.hpp"

#include <cmath>
#include <vector>

namespace pnm {

template <class T>
class GMatrix {
public:
    GMatrix() = default;
    GMatrix(int rows, int cols, const T& fill)
        : rows_(rows), cols_(cols), zero_(fill * 0.0), a_(static_cast<std::size_t>(rows) * cols, fill) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    T& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
    const T& operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

    GMatrix transpose() const {
        GMatrix t(cols_, rows_, zero_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    GMatrix block(int r0, int c0, int nr, int nc) const {
        GMatrix b(nr, nc, zero_);
        for (int i = 0; i < nr; ++i)
            for (int j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
        return b;
    }

    T zero() const { return zero_; }

private:
    int rows_ = 0;
    int cols_ = 0;
    T zero_{};
    std::vector<T> a_;
};

template <class T>
GMatrix<T> operator*(const GMatrix<T>& a, const GMatrix<T>& b) {
    GMatrix<T> out(a.rows(), b.cols(), a.zero());
    for (int i = 0; i < a.rows(); ++i)
        for (int k = 0; k < a.cols(); ++k)
            for (int j = 0; j < b.cols(); ++j) out(i, j) += a(i, k) * b(k, j);
    return out;
}

template <class T>
GMatrix<T> operator+(GMatrix<T> a, const GMatrix<T>& b) {
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) a(i, j) += b(i, j);
    return a;
}

template <class T>
GMatrix<T> operator-(GMatrix<T> a, const GMatrix<T>& b) {
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) a(i, j) -= b(i, j);
    return a;
}

template <class T, class S>
GMatrix<T> scaled(GMatrix<T> a, const S& s) {
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) a(i, j) = a(i, j) * s;
    return a;
}

// Real matrix lifted into the scalar type of `proto`.
template <class T>
GMatrix<T> lift(const Matrix& m, const T& proto) {
    const T zero = proto * 0.0;
    GMatrix<T> out(static_cast<int>(m.rows()), static_cast<int>(m.cols()), zero);
    for (int i = 0; i < out.rows(); ++i)
        for (int j = 0; j < out.cols(); ++j) out(i, j) = zero + cplx(m(i, j));
    return out;
}

template <class T>
GMatrix<T> identity_like(int n, const T& proto) {
    const T zero = proto * 0.0;
    GMatrix<T> out(n, n, zero);
    for (int i = 0; i < n; ++i) out(i, i) = zero + cplx(1.0);
    return out;
}

// Gaussian elimination with pivots chosen by the magnitude of the value part.
template <class T>
T determinant(GMatrix<T> m) {
    const int n = m.rows();
    T det = m.zero() + cplx(1.0);
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(value_of(m(i, k))) > std::abs(value_of(m(piv, k)))) piv = i;
        if (std::abs(value_of(m(piv, k))) == 0.0) return m.zero();
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(m(k, j), m(piv, j));
            det = -det;
        }
        det = det * m(k, k);
        for (int i = k + 1; i < n; ++i) {
            const T f = m(i, k) / m(k, k);
            for (int j = k + 1; j < n; ++j) m(i, j) -= f * m(k, j);
        }
    }
    return det;
}

template <class T>
GMatrix<T> inverse(GMatrix<T> m) {
    const int n = m.rows();
    GMatrix<T> inv = identity_like(n, m.zero());
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(value_of(m(i, k))) > std::abs(value_of(m(piv, k)))) piv = i;
        if (piv != k) {
            for (int j = 0; j < n; ++j) {
                std::swap(m(k, j), m(piv, j));
                std::swap(inv(k, j), inv(piv, j));
            }
        }
        const T p = m(k, k);
        for (int j = 0; j < n; ++j) {
            m(k, j) = m(k, j) / p;
            inv(k, j) = inv(k, j) / p;
        }
        for (int i = 0; i < n; ++i) {
            if (i == k) continue;
            const T f = m(i, k);
            for (int j = 0; j < n; ++j) {
                m(i, j) -= f * m(k, j);
                inv(i, j) -= f * inv(k, j);
            }
        }
    }
    return inv;
}

template <class T>
std::vector<T> leading_minors_of(const GMatrix<T>& y) {
    std::vector<T> out;
    for (int j = 1; j <= y.rows(); ++j) out.push_back(determinant(y.block(0, 0, j, j)));
    return out;
}

template <class T>
T trace(const GMatrix<T>& m) {
    T t = m.zero();
    for (int i = 0; i < m.rows(); ++i) t += m(i, i);
    return t;
}

template <class T>
Matrix real_part(const GMatrix<T>& m) {
    Matrix out(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) out(i, j) = value_of(m(i, j)).real();
    return out;
}

}  // namespace pnm
