#pragma once

// Dense real/complex matrix kernel for the positive-definite cone.
//
// Conventions used throughout the library:
//   * Siegel bracket B[A] = ᵗA·B·A.
//   * Cholesky is upper: Y = ᵗT·T, so T(j,j)² = det Y_j / det Y_{j-1}.
//   * Spectral data: Y = ᵗk·diag(exp a)·k, eigenvalues ascending, each row of k
//     has its first nonzero component positive.

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <random>

namespace pnm {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using IntMatrix = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>;

inline constexpr double kSymmetryTol = 1e-10;
inline constexpr double kUnitDetTol = 1e-10;

// Seeded generator with a portable normal sampler, so a fixed seed gives the
// same stream on every standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    Rng(std::uint64_t seed, std::uint64_t stream);

    double uniform();  // [0, 1)
    double normal();
    std::uint64_t next_u64() { return engine_(); }
    long long uniform_int(long long lo, long long hi);  // inclusive

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

class SymmetricMatrix {
public:
    // Rejects inputs whose asymmetry exceeds kSymmetryTol; the accepted value is
    // stored with the upper triangle mirrored.
    explicit SymmetricMatrix(const Matrix& m);

    static SymmetricMatrix identity(int n);
    static SymmetricMatrix zero(int n);
    static SymmetricMatrix diagonal(const Vector& d);

    int n() const { return static_cast<int>(m_.rows()); }
    double operator()(int i, int j) const { return m_(i, j); }
    const Matrix& dense() const { return m_; }

private:
    Matrix m_;
};

class SpdPoint {
public:
    explicit SpdPoint(SymmetricMatrix base);
    explicit SpdPoint(const Matrix& m) : SpdPoint(SymmetricMatrix(m)) {}

    static SpdPoint identity(int n) { return SpdPoint(SymmetricMatrix::identity(n)); }

    int n() const { return base_.n(); }
    const SymmetricMatrix& base() const { return base_; }
    const Matrix& dense() const { return base_.dense(); }
    double det() const;

private:
    SymmetricMatrix base_;
};

class UnitDetSpdPoint {
public:
    // Requires |det - 1| <= kUnitDetTol.
    explicit UnitDetSpdPoint(SpdPoint base);
    explicit UnitDetSpdPoint(const Matrix& m) : UnitDetSpdPoint(SpdPoint(m)) {}

    // Explicit renormalization Y / det(Y)^{1/n}.
    static UnitDetSpdPoint normalize(const SpdPoint& y);
    static UnitDetSpdPoint identity(int n) { return UnitDetSpdPoint(SpdPoint::identity(n)); }

    int n() const { return base_.n(); }
    const SpdPoint& base() const { return base_; }
    const Matrix& dense() const { return base_.dense(); }

private:
    SpdPoint base_;
};

class ComplexSymmetricMatrix {
public:
    explicit ComplexSymmetricMatrix(const CMatrix& m);

    int n() const { return static_cast<int>(m_.rows()); }
    const CMatrix& dense() const { return m_; }

private:
    CMatrix m_;
};

struct SpectralData {
    Matrix k;  // orthogonal
    Vector a;  // log-eigenvalues, ascending

    Matrix reconstruct() const;
};

// Upper-triangular T with positive diagonal and Y = ᵗT·T.
Matrix cholesky_upper(const SpdPoint& y);
// Same factorization on a raw matrix; throws NotPositiveDefinite.
Matrix cholesky_upper(const Matrix& y);

// (det Y_1, ..., det Y_n) for the upper-left j×j blocks.
Vector leading_minors(const SymmetricMatrix& y);
Vector leading_minors(const Matrix& y);

SpectralData spectral_decompose(const SpdPoint& y);

SpdPoint sym_exp(const SymmetricMatrix& s);
SymmetricMatrix sym_log(const SpdPoint& y);

// G·ᵗG + 0.1·I with G Gaussian scaled by `spread`.
SpdPoint random_spd(int n, std::uint64_t seed, double spread = 1.0);
// QR of a Gaussian matrix with the sign of diag(R) folded into Q.
Matrix random_orthogonal_haar(int n, std::uint64_t seed);
Matrix random_orthogonal_haar(int n, Rng& rng);
Matrix random_gaussian(int rows, int cols, Rng& rng);

double max_abs(const Matrix& m);
bool is_orthogonal(const Matrix& k, double tol);

}  // namespace pnm
