#pragma once

// Coordinate systems on P_{n,m} and on the unit-determinant slice, plus the
// chart maps between coordinates and matrices. Chart maps are templates so the
// same code runs on plain values and on jets.

#include "pnm/errors.hpp"
#include "pnm/generic_matrix.hpp"

#include <span>
#include <string>
#include <vector>

namespace pnm {

enum class ChartKind {
    Cone,        // y_ij (i <= j, row-major) then v_ab (row-major)
    SlIwasawa,   // recursive partial Iwasawa (v, x_1..x_{n-1}, chart of W), then v_ab
};

struct CoordinateSystem {
    ChartKind kind = ChartKind::Cone;
    int n = 1;
    int m = 0;

    static CoordinateSystem cone(int n, int m = 0) { return {ChartKind::Cone, n, m}; }
    static CoordinateSystem sl_iwasawa(int n, int m = 0) { return {ChartKind::SlIwasawa, n, m}; }

    int y_dim() const { return kind == ChartKind::Cone ? n * (n + 1) / 2 : n * (n + 1) / 2 - 1; }
    int dim() const { return y_dim() + m * n; }
    // Index of y_ij (any order of i, j) in the cone chart.
    int y_index(int i, int j) const;
    int v_index(int a, int b) const { return y_dim() + a * n + b; }
    std::vector<std::string> names() const;

    bool operator==(const CoordinateSystem&) const = default;
};

std::string to_string(const CoordinateSystem& cs);

template <class T>
struct MatrixPair {
    GMatrix<T> Y;
    GMatrix<T> V;  // m×n; empty when m = 0
};

// Unit-determinant Y from the recursive partial-Iwasawa chart of size n.
// The chart of size n occupies n(n+1)/2 - 1 coordinates: v, x_1..x_{n-1}, then
// the chart of W (size n-1).
template <class T>
GMatrix<T> sl_chart_to_Y(std::span<const T> c, int n, const T& proto) {
    if (n == 1) return identity_like(1, proto);
    const T& v = c[0];
    const int rest = (n - 1) * n / 2 - 1;
    const GMatrix<T> W = sl_chart_to_Y<T>(c.subspan(n, rest), n - 1, proto);
    const T inv_v = cplx(1.0) / v;
    const T w_scale = pow(v, cplx(1.0 / (n - 1)));
    GMatrix<T> Y(n, n, proto * 0.0);
    Y(0, 0) = inv_v;
    for (int j = 1; j < n; ++j) {
        Y(0, j) = c[j] * inv_v;
        Y(j, 0) = Y(0, j);
    }
    for (int i = 1; i < n; ++i)
        for (int j = 1; j < n; ++j) Y(i, j) = c[i] * c[j] * inv_v + w_scale * W(i - 1, j - 1);
    return Y;
}

template <class T>
void Y_to_sl_chart(const GMatrix<T>& Y, std::vector<T>& out) {
    const int n = Y.rows();
    if (n == 1) return;
    const T v = cplx(1.0) / Y(0, 0);
    out.push_back(v);
    for (int j = 1; j < n; ++j) out.push_back(Y(0, j) / Y(0, 0));
    const T w_scale = pow(v, cplx(-1.0 / (n - 1)));
    GMatrix<T> W(n - 1, n - 1, Y(0, 0) * 0.0);
    for (int i = 1; i < n; ++i)
        for (int j = 1; j < n; ++j) W(i - 1, j - 1) = w_scale * (Y(i, j) - Y(i, 0) * Y(0, j) / Y(0, 0));
    Y_to_sl_chart(W, out);
}

template <class T>
MatrixPair<T> coords_to_matrices(const CoordinateSystem& cs, std::span<const T> c) {
    if (static_cast<int>(c.size()) != cs.dim()) throw DimensionMismatch("coordinate vector length");
    const T zero = c.empty() ? T{} : c[0] * 0.0;
    MatrixPair<T> out;
    if (cs.kind == ChartKind::Cone) {
        out.Y = GMatrix<T>(cs.n, cs.n, zero);
        for (int i = 0; i < cs.n; ++i)
            for (int j = i; j < cs.n; ++j) {
                out.Y(i, j) = c[cs.y_index(i, j)];
                out.Y(j, i) = out.Y(i, j);
            }
    } else {
        out.Y = sl_chart_to_Y<T>(c.subspan(0, cs.y_dim()), cs.n, zero);
    }
    out.V = GMatrix<T>(cs.m, cs.n, zero);
    for (int a = 0; a < cs.m; ++a)
        for (int b = 0; b < cs.n; ++b) out.V(a, b) = c[cs.v_index(a, b)];
    return out;
}

template <class T>
std::vector<T> matrices_to_coords(const CoordinateSystem& cs, const GMatrix<T>& Y, const GMatrix<T>* V) {
    std::vector<T> out;
    out.reserve(cs.dim());
    if (cs.kind == ChartKind::Cone) {
        for (int i = 0; i < cs.n; ++i)
            for (int j = i; j < cs.n; ++j) out.push_back(Y(i, j));
    } else {
        Y_to_sl_chart(Y, out);
    }
    for (int a = 0; a < cs.m; ++a)
        for (int b = 0; b < cs.n; ++b) out.push_back((*V)(a, b));
    return out;
}

// Real-valued helpers for the plain-double paths.
std::vector<double> point_coords(const CoordinateSystem& cs, const Matrix& Y, const Matrix& V);
std::pair<Matrix, Matrix> coords_to_point(const CoordinateSystem& cs, std::span<const double> c);
// Coordinates of (A Y ᵗA, (V + a) ᵗA) for the point with coordinates c.
std::vector<double> act_on_chart(const CoordinateSystem& cs, const Matrix& A, const Matrix& a,
                                 std::span<const double> c);

}  // namespace pnm
