#include "pnm/errors.hpp"
#include "pnm/matcore.hpp"

#include <doctest.h>

#include <cmath>

using namespace pnm;

namespace {

Matrix diag(std::initializer_list<double> d) {
    Vector v(static_cast<int>(d.size()));
    int i = 0;
    for (double x : d) v(i++) = x;
    return v.asDiagonal();
}

// Determinant by cofactor expansion, independent of the library's LU paths.
double cofactor_det(const Matrix& m) {
    const int n = static_cast<int>(m.rows());
    if (n == 0) return 1.0;
    if (n == 1) return m(0, 0);
    double det = 0.0;
    for (int j = 0; j < n; ++j) {
        Matrix minor(n - 1, n - 1);
        for (int r = 1; r < n; ++r)
            for (int c = 0, cc = 0; c < n; ++c)
                if (c != j) minor(r - 1, cc++) = m(r, c);
        det += (j % 2 ? -1.0 : 1.0) * m(0, j) * cofactor_det(minor);
    }
    return det;
}

}  // namespace

TEST_CASE("cholesky_upper examples") {
    CHECK(max_abs(cholesky_upper(SpdPoint::identity(2)) - Matrix::Identity(2, 2)) == 0.0);
    CHECK(max_abs(cholesky_upper(SpdPoint(diag({4, 9}))) - diag({2, 3})) < 1e-15);
    const SpdPoint Y = random_spd(3, 7);
    const Matrix T = cholesky_upper(Y);
    CHECK(max_abs(T.transpose() * T - Y.dense()) <= 1e-10 * max_abs(Y.dense()));
    for (int i = 0; i < 3; ++i) {
        CHECK(T(i, i) > 0.0);
        for (int j = 0; j < i; ++j) CHECK(T(i, j) == 0.0);
    }
}

TEST_CASE("cholesky diagonal squares are ratios of leading minors") {
    const SpdPoint Y = random_spd(4, 11);
    const Matrix T = cholesky_upper(Y);
    double prev = 1.0;
    for (int j = 1; j <= 4; ++j) {
        const double minor = cofactor_det(Y.dense().topLeftCorner(j, j));
        CHECK(T(j - 1, j - 1) * T(j - 1, j - 1) == doctest::Approx(minor / prev).epsilon(1e-12));
        prev = minor;
    }
}

TEST_CASE("cholesky rejects indefinite input") {
    Matrix m(2, 2);
    m << 1, 2, 2, 1;
    CHECK_THROWS_AS(cholesky_upper(m), NotPositiveDefinite);
    CHECK_THROWS_AS(SpdPoint{m}, NotPositiveDefinite);
}

TEST_CASE("leading_minors examples") {
    const Vector a = leading_minors(Matrix(Matrix::Identity(3, 3)));
    CHECK(a(0) == 1.0);
    CHECK(a(1) == 1.0);
    CHECK(a(2) == 1.0);
    const Vector b = leading_minors(diag({2, 3, 4}));
    CHECK(b(0) == doctest::Approx(2));
    CHECK(b(1) == doctest::Approx(6));
    CHECK(b(2) == doctest::Approx(24));
    Matrix c(2, 2);
    c << 5, 7, 7, 10;
    const Vector cm = leading_minors(c);
    CHECK(cm(0) == doctest::Approx(5));
    CHECK(cm(1) == doctest::Approx(1));
}

TEST_CASE("leading minors of random SPD are positive and match cofactor determinants") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const int n = 1 + static_cast<int>(seed % 5);
        const SpdPoint Y = random_spd(n, seed);
        const Vector mins = leading_minors(Y.base());
        for (int j = 1; j <= n; ++j) {
            CHECK(mins(j - 1) > 0.0);
            CHECK(mins(j - 1) == doctest::Approx(cofactor_det(Y.dense().topLeftCorner(j, j))).epsilon(1e-10));
        }
    }
}

TEST_CASE("spectral_decompose examples") {
    const SpectralData id = spectral_decompose(SpdPoint::identity(3));
    CHECK(max_abs(id.k - Matrix::Identity(3, 3)) < 1e-14);
    CHECK(id.a.cwiseAbs().maxCoeff() < 1e-14);

    const double e2 = std::exp(2.0);
    const SpectralData d = spectral_decompose(SpdPoint(diag({e2, 1.0 / e2})));
    CHECK(d.a(0) == doctest::Approx(-2.0));
    CHECK(d.a(1) == doctest::Approx(2.0));
    // Rows of k are eigenvectors: the first is ±e₂, sign-normalized to +e₂.
    CHECK(d.k(0, 1) == doctest::Approx(1.0));
    CHECK(d.k(1, 0) == doctest::Approx(1.0));
    CHECK(max_abs(d.reconstruct() - diag({e2, 1.0 / e2})) < 1e-12);
}

TEST_CASE("spectral, exp and log roundtrips on 1000 random inputs") {
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        const int n = 1 + static_cast<int>(seed % 6);
        const SpdPoint Y = random_spd(n, seed);
        const double scale = max_abs(Y.dense());
        const SpectralData sd = spectral_decompose(Y);
        REQUIRE(is_orthogonal(sd.k, 1e-10));
        for (int i = 1; i < n; ++i) CHECK(sd.a(i - 1) <= sd.a(i));
        CHECK(max_abs(sd.reconstruct() - Y.dense()) <= 1e-8 * scale);
        CHECK(max_abs(sym_exp(sym_log(Y)).dense() - Y.dense()) <= 1e-8 * scale);
        const Matrix T = cholesky_upper(Y);
        CHECK(max_abs(T.transpose() * T - Y.dense()) <= 1e-10 * scale);
    }
}

TEST_CASE("sym_exp and sym_log examples") {
    CHECK(max_abs(sym_exp(SymmetricMatrix::zero(3)).dense() - Matrix::Identity(3, 3)) < 1e-15);
    const SymmetricMatrix l = sym_log(SpdPoint(diag({std::exp(1.0), 1.0})));
    CHECK(max_abs(l.dense() - diag({1.0, 0.0})) < 1e-14);
    Rng rng(3);
    for (int t = 0; t < 100; ++t) {
        const int n = 1 + t % 4;
        const Matrix G = random_gaussian(n, n, rng);
        const SymmetricMatrix S(Matrix(0.5 * (G + G.transpose())));
        CHECK(max_abs(sym_log(sym_exp(S)).dense() - S.dense()) <= 1e-8 * std::max(1.0, max_abs(S.dense())));
    }
}

TEST_CASE("symmetric construction rejects asymmetric input") {
    Matrix m(2, 2);
    m << 1, 0.5, 0.5 + 1e-6, 1;
    CHECK_THROWS_AS(SymmetricMatrix{m}, NotSymmetric);
}

TEST_CASE("unit determinant is checked, renormalization is explicit") {
    CHECK_THROWS_AS(UnitDetSpdPoint(diag({2, 1})), DomainError);
    const UnitDetSpdPoint u = UnitDetSpdPoint::normalize(SpdPoint(diag({2, 8})));
    CHECK(u.dense().determinant() == doctest::Approx(1.0));
    CHECK(u.dense()(0, 0) == doctest::Approx(0.5));
}

TEST_CASE("random generators") {
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        const SpdPoint Y = random_spd(1 + static_cast<int>(seed % 6), seed);
        CHECK_NOTHROW(cholesky_upper(Y));
    }
    for (int n = 1; n <= 6; ++n) {
        const Matrix k = random_orthogonal_haar(n, 42);
        CHECK(max_abs(k.transpose() * k - Matrix::Identity(n, n)) <= 1e-12);
    }
    // Determinism: same seed, bit-identical output.
    CHECK((random_spd(4, 99).dense().array() == random_spd(4, 99).dense().array()).all());
    CHECK((random_orthogonal_haar(4, 99).array() == random_orthogonal_haar(4, 99).array()).all());
    Rng a(5, 2), b(5, 2), c(5, 3);
    bool differs = false;
    for (int i = 0; i < 10; ++i) {
        const double x = a.normal();
        CHECK(x == b.normal());
        differs = differs || x != c.normal();
    }
    CHECK(differs);
}

TEST_CASE("Haar sampler: (1,1) entry has mean zero and variance 1/2 at n=2") {
    Rng rng(2024);
    const int N = 100000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < N; ++i) {
        const double x = random_orthogonal_haar(2, rng)(0, 0);
        sum += x;
        sum_sq += x * x;
    }
    const double mean = sum / N;
    const double var = sum_sq / N - mean * mean;
    // For a uniform angle θ, cos θ has mean 0 and variance 1/2.
    CHECK(std::abs(mean) <= 3.0 * std::sqrt(var / N));
    CHECK(var == doctest::Approx(0.5).epsilon(0.01));
}
