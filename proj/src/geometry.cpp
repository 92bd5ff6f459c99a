#include "pnm/geometry.hpp"

#include "pnm/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/zeta.hpp>

#include <cmath>
#include <numbers>

namespace pnm {

double metric_eval(const SpdPoint& Y, const Tangent& t1, const Tangent& t2, const MetricParams& params,
                   MetricSpace space) {
    const int n = Y.n();
    if (t1.dY.rows() != n || t1.dY.cols() != n || t2.dY.rows() != n || t2.dY.cols() != n)
        throw DimensionMismatch("dY must be n×n");
    const Matrix Yinv = Y.dense().inverse();
    const double yy = (Yinv * t1.dY * Yinv * t2.dY).trace();
    if (space == MetricSpace::Cone) return params.c * yy;
    if (t1.dV.cols() != n || t2.dV.cols() != n || t1.dV.rows() != t2.dV.rows())
        throw DimensionMismatch("dV must be m×n");
    const double vv = (Yinv * t1.dV.transpose() * t2.dV).trace();
    return params.A * yy + params.B * vv;
}

Tangent push_tangent(const Matrix& A, const Tangent& t) {
    Tangent out{A * t.dY * A.transpose(), t.dV.size() ? Matrix(t.dV * A.transpose()) : t.dV};
    return out;
}

DensitySpace parse_density_space(const std::string& name) {
    if (name == "cone_dv_n") return DensitySpace::ConeDv;
    if (name == "sl_dmu_n") return DensitySpace::SlDmu;
    if (name == "goldfeld_dstar") return DensitySpace::GoldfeldDstar;
    if (name == "pnm_dv") return DensitySpace::PnmDv;
    throw DomainError("unknown density space '" + name + "'");
}

int density_dim(DensitySpace space, int n, int m) {
    switch (space) {
        case DensitySpace::ConeDv: return n * (n + 1) / 2;
        case DensitySpace::PnmDv: return n * (n + 1) / 2 + m * n;
        case DensitySpace::SlDmu: return n * (n + 1) / 2 - 1;
        case DensitySpace::GoldfeldDstar: return n * (n - 1) / 2 + (n - 1);
    }
    return 0;
}

double volume_density(DensitySpace space, int n, int m, std::span<const double> coords, GoldfeldExponent conv) {
    if (static_cast<int>(coords.size()) != density_dim(space, n, m)) throw DimensionMismatch("density coordinates");
    switch (space) {
        case DensitySpace::ConeDv:
        case DensitySpace::PnmDv: {
            const int mm = space == DensitySpace::PnmDv ? m : 0;
            const auto [Y, V] = coords_to_point(CoordinateSystem::cone(n, mm), coords);
            const Vector minors = leading_minors(Y);
            for (int i = 0; i < n; ++i)
                if (!(minors(i) > 0.0)) throw ChartViolation("Y is not positive definite");
            return std::pow(minors(n - 1), -(n + mm + 1) / 2.0);
        }
        case DensitySpace::SlDmu: {
            double d = 1.0;
            int offset = 0;
            for (int k = n; k >= 2; --k) {
                const double v = coords[offset];
                if (!(v > 0.0)) throw ChartViolation("v must be positive");
                d *= std::pow(v, -(k + 2) / 2.0);
                offset += k;
            }
            return d;
        }
        case DensitySpace::GoldfeldDstar: {
            const int nx = n * (n - 1) / 2;
            double d = 1.0;
            for (int k = 1; k <= n - 1; ++k) {
                const double y = coords[nx + k - 1];
                if (!(y > 0.0)) throw ChartViolation("y_k must be positive");
                const double e = conv == GoldfeldExponent::Invariant ? -k * (n - k) - 1.0 : -n * (n - k) - 1.0;
                d *= std::pow(y, e);
            }
            return d;
        }
    }
    return 0.0;
}

std::vector<double> act_in_density_coords(DensitySpace space, int n, int m, const Matrix& A, const Matrix& a,
                                          std::span<const double> coords) {
    switch (space) {
        case DensitySpace::ConeDv:
        case DensitySpace::PnmDv:
        case DensitySpace::SlDmu: {
            CoordinateSystem cs = space == DensitySpace::SlDmu ? CoordinateSystem::sl_iwasawa(n)
                                  : space == DensitySpace::PnmDv ? CoordinateSystem::cone(n, m)
                                                                 : CoordinateSystem::cone(n);
            if (space == DensitySpace::SlDmu && std::abs(A.determinant() - 1.0) > 1e-9)
                throw DomainError("unit-determinant chart requires an SL group element");
            return act_on_chart(cs, A, space == DensitySpace::PnmDv ? a : Matrix(0, n), coords);
        }
        case DensitySpace::GoldfeldDstar:
            return goldfeld_act(A, GoldfeldPoint::from_coords(n, coords)).coords();
    }
    return {};
}

Matrix numeric_jacobian(const std::function<std::vector<double>(std::span<const double>)>& f,
                        std::span<const double> point, double h) {
    const int d = static_cast<int>(point.size());
    std::vector<double> p(point.begin(), point.end());
    const int out_dim = static_cast<int>(f(p).size());
    Matrix J(out_dim, d);
    for (int j = 0; j < d; ++j) {
        const double step = h * std::max(1.0, std::abs(point[j]));
        // Fourth-order central stencil.
        std::vector<std::vector<double>> vals;
        for (double k : {-2.0, -1.0, 1.0, 2.0}) {
            p[j] = point[j] + k * step;
            vals.push_back(f(p));
        }
        p[j] = point[j];
        for (int i = 0; i < out_dim; ++i)
            J(i, j) = (vals[0][i] - 8.0 * vals[1][i] + 8.0 * vals[2][i] - vals[3][i]) / (12.0 * step);
    }
    return J;
}

double siegel_volume(int n) {
    if (n < 1) throw DomainError("siegel_volume needs n >= 1");
    double v = n * std::pow(2.0, n - 1);
    for (int k = 2; k <= n; ++k) {
        const double sphere = 2.0 * std::pow(std::numbers::pi, k / 2.0) / boost::math::tgamma(k / 2.0);
        v *= boost::math::zeta(static_cast<double>(k)) / sphere;
    }
    return v;
}

SpdPoint geodesic_point(const SpdPoint& Y, double t) {
    return sym_exp(SymmetricMatrix(Matrix(t * sym_log(Y).dense())));
}

double geodesic_distance(const SpdPoint& Y) { return spectral_decompose(Y).a.norm(); }

double geodesic_distance(const SpdPoint& Y, const SpdPoint& Z) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(Z.dense(), Y.dense());
    if (es.info() != Eigen::Success) throw ConvergenceFailure("generalized eigen-solver");
    return es.eigenvalues().array().log().matrix().norm();
}

PartialIwasawaCoords partial_iwasawa(const UnitDetSpdPoint& Yp) {
    const Matrix& Y = Yp.dense();
    const int n = Yp.n();
    if (n < 2) throw DomainError("partial Iwasawa needs n >= 2");
    PartialIwasawaCoords c;
    c.v = 1.0 / Y(0, 0);
    c.x = Y.block(0, 1, 1, n - 1).transpose() / Y(0, 0);
    const Matrix schur = Y.block(1, 1, n - 1, n - 1) - Y.block(1, 0, n - 1, 1) * Y.block(0, 1, 1, n - 1) / Y(0, 0);
    c.W = std::pow(c.v, -1.0 / (n - 1)) * schur;
    c.W = Matrix(0.5 * (c.W + c.W.transpose()));
    return c;
}

UnitDetSpdPoint partial_iwasawa_inverse(const PartialIwasawaCoords& c) {
    const int n = static_cast<int>(c.x.size()) + 1;
    if (!(c.v > 0.0)) throw ChartViolation("v must be positive");
    if (c.W.rows() != n - 1 || c.W.cols() != n - 1) throw DimensionMismatch("W must be (n-1)×(n-1)");
    Matrix Y(n, n);
    Y(0, 0) = 1.0 / c.v;
    Y.block(0, 1, 1, n - 1) = c.x.transpose() / c.v;
    Y.block(1, 0, n - 1, 1) = c.x / c.v;
    Y.block(1, 1, n - 1, n - 1) = c.x * c.x.transpose() / c.v + std::pow(c.v, 1.0 / (n - 1)) * c.W;
    return UnitDetSpdPoint(Y);
}

FullIwasawaCoords full_iwasawa(const UnitDetSpdPoint& Yp) {
    const int n = Yp.n();
    if (n < 2) throw DomainError("full Iwasawa needs n >= 2");
    const Matrix T = cholesky_upper(Yp.base());
    FullIwasawaCoords c;
    c.y.resize(n - 1);
    for (int k = 0; k < n - 1; ++k) c.y(k) = T(k + 1, k + 1) / T(k, k);
    c.X = T.diagonal().cwiseInverse().asDiagonal() * T;
    for (int i = 0; i < n; ++i) c.X(i, i) = 1.0;
    c.ydet = 1.0;
    for (int k = 1; k <= n - 1; ++k) c.ydet *= std::pow(c.y(k - 1), 2 * (n - k));
    return c;
}

namespace {

Matrix iwasawa_diagonal_bracket(const FullIwasawaCoords& c) {
    const int n = static_cast<int>(c.X.rows());
    Vector d(n);
    d(0) = 1.0;
    for (int k = 1; k < n; ++k) {
        if (!(c.y(k - 1) > 0.0)) throw ChartViolation("y_k must be positive");
        d(k) = d(k - 1) * c.y(k - 1) * c.y(k - 1);
    }
    Matrix Y = c.X.transpose() * d.asDiagonal() * c.X;
    return 0.5 * (Y + Y.transpose());
}

}  // namespace

UnitDetSpdPoint full_iwasawa_inverse(const FullIwasawaCoords& c) {
    const int n = static_cast<int>(c.X.rows());
    return UnitDetSpdPoint(Matrix(std::pow(c.ydet, -1.0 / n) * iwasawa_diagonal_bracket(c)));
}

SpdPoint full_iwasawa_inverse_as_printed(const FullIwasawaCoords& c) {
    return SpdPoint(Matrix(iwasawa_diagonal_bracket(c) / c.ydet));
}

Matrix GoldfeldPoint::y_matrix() const {
    const int n = this->n();
    Vector d(n);
    d(n - 1) = 1.0;
    for (int i = n - 2; i >= 0; --i) d(i) = d(i + 1) * y(n - 2 - i);
    return d.asDiagonal();
}

std::vector<double> GoldfeldPoint::coords() const {
    const int n = this->n();
    std::vector<double> c;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) c.push_back(x(i, j));
    for (int k = 0; k < n - 1; ++k) c.push_back(y(k));
    return c;
}

GoldfeldPoint GoldfeldPoint::from_coords(int n, std::span<const double> c) {
    GoldfeldPoint z;
    z.x = Matrix::Identity(n, n);
    std::size_t idx = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) z.x(i, j) = c[idx++];
    z.y.resize(n - 1);
    for (int k = 0; k < n - 1; ++k) {
        z.y(k) = c[idx++];
        if (!(z.y(k) > 0.0)) throw ChartViolation("y_k must be positive");
    }
    return z;
}

namespace {

// S = U·ᵗU with U upper triangular and positive diagonal.
Matrix upper_lower_factor(const Matrix& S) {
    const int n = static_cast<int>(S.rows());
    Eigen::PermutationMatrix<Eigen::Dynamic> P(n);
    for (int i = 0; i < n; ++i) P.indices()(i) = n - 1 - i;
    const Matrix R = P * S * P.transpose();
    Eigen::LLT<Matrix> llt(R);
    if (llt.info() != Eigen::Success) throw NotPositiveDefinite("upper-lower factorization");
    const Matrix L = llt.matrixL();
    return P.transpose() * L * P;
}

GoldfeldPoint goldfeld_from_factor(const Matrix& U, double& r) {
    const int n = static_cast<int>(U.rows());
    r = U(n - 1, n - 1);
    const Matrix zr = U / r;
    GoldfeldPoint z;
    z.y.resize(n - 1);
    for (int i = 0; i < n - 1; ++i) z.y(n - 2 - i) = zr(i, i) / zr(i + 1, i + 1);
    z.x = zr * zr.diagonal().cwiseInverse().asDiagonal();
    for (int i = 0; i < n; ++i) {
        z.x(i, i) = 1.0;
        for (int j = 0; j < i; ++j) z.x(i, j) = 0.0;
    }
    return z;
}

}  // namespace

GoldfeldDecomposition goldfeld_decompose(const Matrix& g) {
    if (g.rows() != g.cols()) throw DimensionMismatch("g must be square");
    const int n = static_cast<int>(g.rows());
    if (std::abs(g.determinant()) <= 1e-14 * std::pow(std::max(1.0, max_abs(g)), n)) throw Singular("g");
    const Matrix U = upper_lower_factor(g * g.transpose());
    GoldfeldDecomposition out;
    out.z = goldfeld_from_factor(U, out.r);
    out.k = (out.z.z() * out.r).inverse() * g;
    return out;
}

UnitDetSpdPoint goldfeld_to_spd(const GoldfeldPoint& z) {
    const Matrix zz = z.z() * z.z().transpose();
    const int n = z.n();
    Matrix Y = zz / std::pow(zz.determinant(), 1.0 / n);
    Y = Matrix(0.5 * (Y + Y.transpose()));
    return UnitDetSpdPoint(Y);
}

GoldfeldPoint goldfeld_from_spd(const SpdPoint& Y) {
    double r = 0.0;
    return goldfeld_from_factor(upper_lower_factor(Y.dense()), r);
}

GoldfeldPoint goldfeld_act(const Matrix& g, const GoldfeldPoint& z) { return goldfeld_decompose(g * z.z()).z; }

UnitDetSpdPoint random_unit_spd(int n, Rng& rng, double spread) {
    const Matrix G = random_gaussian(n, n, rng) * spread;
    const Matrix S = G * G.transpose() + 0.1 * Matrix::Identity(n, n);
    return UnitDetSpdPoint::normalize(SpdPoint(Matrix(0.5 * (S + S.transpose()))));
}

}  // namespace pnm
