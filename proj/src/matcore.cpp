#include "pnm/matcore.hpp"

#include "pnm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace pnm {

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      0x9e3779b9u};
    engine_.seed(seq);
}

double Rng::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

long long Rng::uniform_int(long long lo, long long hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<long long>(engine_() % span);
}

SymmetricMatrix::SymmetricMatrix(const Matrix& m) {
    if (m.rows() != m.cols() || m.rows() < 1)
        throw DimensionMismatch("symmetric matrix must be square and nonempty");
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = i + 1; j < m.cols(); ++j)
            if (!(std::abs(m(i, j) - m(j, i)) <= kSymmetryTol))
                throw NotSymmetric("entry (" + std::to_string(i) + "," + std::to_string(j) + ")");
    m_ = m.triangularView<Eigen::Upper>();
    m_.triangularView<Eigen::StrictlyLower>() = m_.transpose().triangularView<Eigen::StrictlyLower>();
}

SymmetricMatrix SymmetricMatrix::identity(int n) { return SymmetricMatrix(Matrix::Identity(n, n)); }
SymmetricMatrix SymmetricMatrix::zero(int n) { return SymmetricMatrix(Matrix::Zero(n, n)); }
SymmetricMatrix SymmetricMatrix::diagonal(const Vector& d) { return SymmetricMatrix(Matrix(d.asDiagonal())); }

SpdPoint::SpdPoint(SymmetricMatrix base) : base_(std::move(base)) {
    (void)cholesky_upper(base_.dense());
}

double SpdPoint::det() const {
    const Matrix t = cholesky_upper(dense());
    double d = 1.0;
    for (int i = 0; i < n(); ++i) d *= t(i, i) * t(i, i);
    return d;
}

UnitDetSpdPoint::UnitDetSpdPoint(SpdPoint base) : base_(std::move(base)) {
    const double d = base_.det();
    if (!(std::abs(d - 1.0) <= kUnitDetTol))
        throw DomainError("unit-determinant point has det " + std::to_string(d));
}

UnitDetSpdPoint UnitDetSpdPoint::normalize(const SpdPoint& y) {
    const double scale = std::pow(y.det(), -1.0 / y.n());
    return UnitDetSpdPoint(SpdPoint(Matrix(scale * y.dense())));
}

ComplexSymmetricMatrix::ComplexSymmetricMatrix(const CMatrix& m) {
    if (m.rows() != m.cols() || m.rows() < 1)
        throw DimensionMismatch("complex symmetric matrix must be square and nonempty");
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = i + 1; j < m.cols(); ++j)
            if (!(std::abs(m(i, j) - m(j, i)) <= kSymmetryTol))
                throw NotSymmetric("complex entry (" + std::to_string(i) + "," + std::to_string(j) + ")");
    m_ = m.triangularView<Eigen::Upper>();
    m_.triangularView<Eigen::StrictlyLower>() = m_.transpose().triangularView<Eigen::StrictlyLower>();
}

Matrix SpectralData::reconstruct() const {
    return k.transpose() * a.array().exp().matrix().asDiagonal() * k;
}

Matrix cholesky_upper(const Matrix& y) {
    const Eigen::Index n = y.rows();
    if (y.cols() != n) throw DimensionMismatch("cholesky of non-square matrix");
    const double scale = std::max(max_abs(y), 1e-300);
    const double pivot_tol = 1e-14 * scale;
    Matrix t = Matrix::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double d = y(j, j);
        for (Eigen::Index k = 0; k < j; ++k) d -= t(k, j) * t(k, j);
        if (!(d > pivot_tol)) throw NotPositiveDefinite("pivot " + std::to_string(j) + " is " + std::to_string(d));
        t(j, j) = std::sqrt(d);
        for (Eigen::Index i = j + 1; i < n; ++i) {
            double s = y(j, i);
            for (Eigen::Index k = 0; k < j; ++k) s -= t(k, j) * t(k, i);
            t(j, i) = s / t(j, j);
        }
    }
    return t;
}

Matrix cholesky_upper(const SpdPoint& y) { return cholesky_upper(y.dense()); }

Vector leading_minors(const Matrix& y) {
    const Eigen::Index n = y.rows();
    Vector out(n);
    for (Eigen::Index j = 1; j <= n; ++j) out(j - 1) = y.topLeftCorner(j, j).determinant();
    return out;
}

Vector leading_minors(const SymmetricMatrix& y) { return leading_minors(y.dense()); }

namespace {

SpectralData eigen_spd(const Matrix& y) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(y);
    if (solver.info() != Eigen::Success) throw ConvergenceFailure("symmetric eigen-solver");
    const Vector& lambda = solver.eigenvalues();
    if (lambda.minCoeff() <= 0.0) throw NotPositiveDefinite("nonpositive eigenvalue");
    SpectralData out;
    out.a = lambda.array().log().matrix();
    out.k = solver.eigenvectors().transpose();
    for (Eigen::Index r = 0; r < out.k.rows(); ++r) {
        for (Eigen::Index c = 0; c < out.k.cols(); ++c) {
            if (std::abs(out.k(r, c)) > 1e-12) {
                if (out.k(r, c) < 0) out.k.row(r) *= -1.0;
                break;
            }
        }
    }
    return out;
}

}  // namespace

SpectralData spectral_decompose(const SpdPoint& y) { return eigen_spd(y.dense()); }

SpdPoint sym_exp(const SymmetricMatrix& s) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(s.dense());
    if (solver.info() != Eigen::Success) throw ConvergenceFailure("symmetric eigen-solver");
    const Matrix& q = solver.eigenvectors();
    Matrix e = q * solver.eigenvalues().array().exp().matrix().asDiagonal() * q.transpose();
    return SpdPoint(Matrix(0.5 * (e + e.transpose())));
}

SymmetricMatrix sym_log(const SpdPoint& y) {
    const SpectralData sd = eigen_spd(y.dense());
    Matrix l = sd.k.transpose() * sd.a.asDiagonal() * sd.k;
    return SymmetricMatrix(Matrix(0.5 * (l + l.transpose())));
}

Matrix random_gaussian(int rows, int cols, Rng& rng) {
    Matrix g(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) g(i, j) = rng.normal();
    return g;
}

SpdPoint random_spd(int n, std::uint64_t seed, double spread) {
    if (n < 1) throw DomainError("random_spd needs n >= 1");
    Rng rng(seed);
    const Matrix g = spread * random_gaussian(n, n, rng);
    Matrix y = g * g.transpose() + 0.1 * Matrix::Identity(n, n);
    return SpdPoint(Matrix(0.5 * (y + y.transpose())));
}

Matrix random_orthogonal_haar(int n, Rng& rng) {
    if (n < 1) throw DomainError("random_orthogonal_haar needs n >= 1");
    const Matrix g = random_gaussian(n, n, rng);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(n, n);
    const Matrix r = qr.matrixQR();
    for (int j = 0; j < n; ++j)
        if (r(j, j) < 0) q.col(j) *= -1.0;
    return q;
}

Matrix random_orthogonal_haar(int n, std::uint64_t seed) {
    Rng rng(seed);
    return random_orthogonal_haar(n, rng);
}

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

bool is_orthogonal(const Matrix& k, double tol) {
    if (k.rows() != k.cols()) return false;
    return max_abs(k.transpose() * k - Matrix::Identity(k.rows(), k.cols())) <= tol;
}

}  // namespace pnm
