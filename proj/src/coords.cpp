#include "pnm/coords.hpp"

namespace pnm {

int CoordinateSystem::y_index(int i, int j) const {
    if (i > j) std::swap(i, j);
    // Row-major upper triangle: rows before i contribute n, n-1, ...
    return i * n - i * (i - 1) / 2 + (j - i);
}

std::vector<std::string> CoordinateSystem::names() const {
    std::vector<std::string> out;
    if (kind == ChartKind::Cone) {
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) out.push_back("y" + std::to_string(i + 1) + std::to_string(j + 1));
    } else {
        for (int k = n; k >= 2; --k) {
            out.push_back("v" + std::to_string(k));
            for (int j = 1; j < k; ++j) out.push_back("x" + std::to_string(k) + "_" + std::to_string(j));
        }
    }
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < n; ++b) out.push_back("v" + std::to_string(a + 1) + std::to_string(b + 1));
    return out;
}

std::string to_string(const CoordinateSystem& cs) {
    return std::string(cs.kind == ChartKind::Cone ? "cone" : "sl_iwasawa") + "(n=" + std::to_string(cs.n) +
           ",m=" + std::to_string(cs.m) + ")";
}

std::vector<double> point_coords(const CoordinateSystem& cs, const Matrix& Y, const Matrix& V) {
    const GMatrix<cplx> y = lift(Y, cplx{});
    const GMatrix<cplx> v = lift(V, cplx{});
    const std::vector<cplx> c = matrices_to_coords(cs, y, &v);
    std::vector<double> out(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) out[i] = c[i].real();
    return out;
}

std::pair<Matrix, Matrix> coords_to_point(const CoordinateSystem& cs, std::span<const double> c) {
    std::vector<cplx> cc(c.begin(), c.end());
    const auto mp = coords_to_matrices<cplx>(cs, cc);
    Matrix V(cs.m, cs.n);
    for (int a = 0; a < cs.m; ++a)
        for (int b = 0; b < cs.n; ++b) V(a, b) = mp.V(a, b).real();
    return {real_part(mp.Y), V};
}

std::vector<double> act_on_chart(const CoordinateSystem& cs, const Matrix& A, const Matrix& a,
                                 std::span<const double> c) {
    const auto [Y, V] = coords_to_point(cs, c);
    const Matrix Y2 = A * Y * A.transpose();
    const Matrix V2 = cs.m > 0 ? Matrix((V + a) * A.transpose()) : V;
    return point_coords(cs, Matrix(0.5 * (Y2 + Y2.transpose())), V2);
}

}  // namespace pnm
