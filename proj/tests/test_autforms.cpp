#include "pnm/autforms.hpp"
#include "pnm/errors.hpp"
#include "pnm/reduction.hpp"

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/zeta.hpp>
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>

using namespace pnm;

namespace {

constexpr double kPi = std::numbers::pi;

Matrix mat2(double a, double b, double c, double d) {
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
}

Matrix from_xv(double x, double v) { return mat2(1 / v, x / v, x / v, v + x * x / v); }

Matrix random_upper(int n, Rng& rng) {
    Matrix t = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        t(i, i) = (rng.uniform() < 0.5 ? -1.0 : 1.0) * std::exp(rng.normal() * 0.5);
        for (int j = i + 1; j < n; ++j) t(i, j) = rng.normal();
    }
    return t;
}

// Σ over primitive (c, d) modulo ± with |c|, |d| ≤ H of Y[(c, d)]^{−s}.
double brute_force_e2(double s, const Matrix& Y, int H) {
    double sum = 0.0;
    for (int c = -H; c <= H; ++c)
        for (int d = -H; d <= H; ++d) {
            if (std::gcd(c, d) != 1) continue;
            sum += std::pow(Y(0, 0) * c * c + 2 * Y(0, 1) * c * d + Y(1, 1) * d * d, -s);
        }
    return 0.5 * sum;
}

// Constant term v^s + φ(s) v^{1−s} of the classical non-holomorphic Eisenstein series.
double classical_constant_term(double s, double v) {
    using boost::math::tgamma;
    using boost::math::zeta;
    const double phi = std::sqrt(kPi) * tgamma(s - 0.5) * zeta(2 * s - 1) / (tgamma(s) * zeta(2 * s));
    return std::pow(v, s) + phi * std::pow(v, 1 - s);
}

ScalarField power_field(const CoordinateSystem& cs, const ComplexVector& s) {
    return ScalarField::from_generic(cs, [s](const auto& Y, const auto&) { return power_p_generic(s, Y); });
}

}  // namespace

TEST_CASE("power_p and tau") {
    CHECK(std::abs(power_p({cplx(1.3, 2), cplx(-0.7)}, Matrix::Identity(2, 2)) - 1.0) < 1e-15);
    CHECK(std::abs(power_p({1.0, 1.0}, mat2(2, 0, 0, 3)) - 12.0) < 1e-12);

    Rng rng(40);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + trial % 4;
        ComplexVector s;
        for (int j = 0; j < n; ++j) s.push_back(cplx(rng.normal(), rng.normal()));
        const Matrix Y = random_spd(n, rng.next_u64()).dense();
        const Matrix t = random_upper(n, rng);
        const cplx lhs = power_p(s, t.transpose() * Y * t);
        const cplx It = power_p(s, t.transpose() * t);
        CHECK(std::abs(lhs - It * power_p(s, Y)) <= 1e-10 * std::abs(lhs));

        // p_s(I[t]) = ∏_j (∏_{i≤j} t_ii²)^{s_j}.
        cplx oracle = 1.0;
        double prod = 1.0;
        for (int j = 0; j < n; ++j) {
            prod *= t(j, j) * t(j, j);
            oracle *= std::pow(cplx(prod), s[j]);
        }
        CHECK(std::abs(It - oracle) <= 1e-10 * std::abs(oracle));
        CHECK(std::abs(tau(tau_from_s(s), t) - oracle) <= 1e-10 * std::abs(oracle));
    }
    const ComplexVector zero = tau_from_s({0.0, 0.0, 0.0});
    for (const cplx& r : zero) CHECK(r == cplx(0.0));
    const ComplexVector r = tau_from_s({1.0, 2.0, 3.0});
    CHECK(r[0] == cplx(12.0));
    CHECK(r[1] == cplx(10.0));
    CHECK(r[2] == cplx(6.0));
}

TEST_CASE("phi_z") {
    const Matrix y = Matrix::Constant(1, 1, 2.7);
    const cplx z(0.4, -1.3);
    CHECK(std::abs(phi_z({z}, y) - std::pow(cplx(2.7), z)) < 1e-12);
    // At n = 2 the exponents on t₁₁, t₂₂ are 2z₁ − ½ and 2z₂ + ½.
    const Matrix Y = mat2(4, 2, 2, 5);
    const double t11 = 2.0, t22 = 2.0;
    const cplx expected = std::pow(cplx(t11), 2.0 * z - 0.5) * std::pow(cplx(t22), 2.0 * cplx(0.3) + 0.5);
    CHECK(std::abs(phi_z({z, 0.3}, Y) - expected) < 1e-12);
}

TEST_CASE("spherical_h") {
    const MonteCarloValue one = spherical_h({cplx(1.5), cplx(-0.3)}, Matrix::Identity(2, 2), 1000, 1);
    CHECK(std::abs(one.value - 1.0) < 1e-12);
    const MonteCarloValue y = spherical_h({cplx(0.7)}, Matrix::Constant(1, 1, 3.0), 1000, 1);
    CHECK(std::abs(y.value - std::pow(3.0, 0.7)) < 1e-12);

    Rng rng(41);
    const Matrix Y = random_spd(2, 77).dense();
    const Matrix k0 = random_orthogonal_haar(2, rng);
    const ComplexVector s{cplx(0.8), cplx(-0.4)};
    const MonteCarloValue a = spherical_h(s, Y, 200000, 5);
    const MonteCarloValue b = spherical_h(s, k0.transpose() * Y * k0, 200000, 6);
    const double se = std::hypot(a.standard_error, b.standard_error);
    CHECK(std::abs(a.value - b.value) <= 3.0 * se);

    const MonteCarloValue w1 = spherical_h(s, Y, 50000, 9, 1);
    const MonteCarloValue w4 = spherical_h(s, Y, 50000, 9, 4);
    CHECK(w1.value == w4.value);
}

TEST_CASE("b_matrix and I_nu") {
    for (int n = 2; n <= 6; ++n) {
        const IntMatrix b = b_matrix(n);
        for (int i = 1; i <= n - 1; ++i)
            for (int j = 1; j <= n - 1; ++j) {
                const long long expected = i + j <= n ? i * j : (n - i) * (n - j);
                CHECK(b(i - 1, j - 1) == expected);
                if (i + j == n) CHECK(i * j == (n - i) * (n - j));
            }
    }
    IntMatrix b3(2, 2);
    b3 << 1, 2, 2, 1;
    CHECK(b_matrix(3) == b3);

    GoldfeldPoint z2{Matrix::Identity(2, 2), Vector::Constant(1, 1.7)};
    z2.x(0, 1) = 0.3;
    const cplx nu(0.4, 1.1);
    CHECK(std::abs(i_nu({nu}, z2) - std::pow(cplx(1.7), nu)) < 1e-12);

    GoldfeldPoint z3{Matrix::Identity(3, 3), Vector(2)};
    z3.y << 1.3, 0.6;
    const cplx n1(0.5, 0.2), n2(-0.3, 0.7);
    const cplx expected = std::pow(cplx(1.3), n1 + 2.0 * n2) * std::pow(cplx(0.6), 2.0 * n1 + n2);
    CHECK(std::abs(i_nu({n1, n2}, z3) - expected) < 1e-12);
    CHECK(std::abs(i_nu_tilde({n1, n2}, z3, Matrix::Zero(1, 3)) - expected) < 1e-12);
    CHECK(std::abs(i_nu_tilde({n1, n2}, z3, Matrix::Constant(1, 3, 5.0)) - expected) < 1e-12);

    // The trailing-minor form agrees with the Goldfeld product formula.
    Rng rng(42);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + trial % 3;
        const UnitDetSpdPoint Y = random_unit_spd(n, rng);
        ComplexVector v;
        for (int j = 0; j < n - 1; ++j) v.push_back(cplx(rng.normal(), rng.normal()));
        const cplx direct = i_nu(v, goldfeld_from_spd(SpdPoint(Y.dense())));
        const cplx generic = i_nu_generic(v, b_matrix(n), lift(Y.dense(), cplx(0.0)));
        CHECK(std::abs(direct - generic) <= 1e-9 * std::abs(direct));
    }
}

TEST_CASE("I_nu is an eigenfunction of the invariant Laplacian") {
    Rng rng(43);
    for (int n = 2; n <= 3; ++n) {
        const CoordinateSystem cs = CoordinateSystem::sl_iwasawa(n);
        ComplexVector nu;
        for (int j = 0; j < n - 1; ++j) nu.push_back(cplx(0.3 + 0.2 * j, 0.5));
        const IntMatrix b = b_matrix(n);
        const ScalarField f = ScalarField::from_generic(
            cs, [nu, b](const auto& Y, const auto&) { return i_nu_generic(nu, b, Y); });
        std::vector<std::vector<double>> pts;
        for (int i = 0; i < 5; ++i) pts.push_back(point_coords(cs, random_unit_spd(n, rng).dense(), Matrix(0, n)));
        const CharacterValue cv =
            eigenvalue_extract(op_laplace_sl_iwasawa(n, SlLaplaceVariant::LaplaceBeltrami), f, pts);
        CHECK(cv.constancy_residual <= 1e-6);
    }
}

TEST_CASE("eisenstein series at n = 2") {
    const EisensteinResult e = eisenstein({3.0}, Matrix::Identity(2, 2), 300);
    CHECK(std::abs(e.value.real() - brute_force_e2(3.0, Matrix::Identity(2, 2), 300)) < 1e-9);
    CHECK(std::abs(e.value.real() - brute_force_e2(3.0, Matrix::Identity(2, 2), 1000)) < 1e-6);

    const Matrix Y = from_xv(0.2, 1.4);
    const EisensteinResult ey = eisenstein({2.5}, Y, 200);
    CHECK(std::abs(ey.value.real() - brute_force_e2(2.5, Y, 200)) < 1e-9);

    // Partial sums increase with height and the tail estimate bounds the truncation error.
    const double limit = eisenstein({2.0}, Y, 1500).value.real();
    double prev = 0.0;
    for (int H : {10, 20, 40, 80}) {
        const EisensteinResult r = eisenstein({2.0}, Y, H);
        CHECK(r.value.real() > prev);
        CHECK(limit - r.value.real() <= r.tail_estimate);
        prev = r.value.real();
    }

    CHECK_THROWS_AS(eisenstein({1.0}, Y, 10), DivergentParameters);
    CHECK_THROWS_AS(eisenstein({cplx(0.5, 3.0)}, Y, 10), DivergentParameters);
    CHECK_THROWS_AS(eisenstein({2.0, 2.0}, Matrix::Identity(3, 3), 1000, 1, 1000), EnumerationBudgetExceeded);
}

TEST_CASE("eisenstein series at n = 3 is approximately GL(3,Z)-invariant") {
    Rng rng(44);
    const Matrix Y = random_unit_spd(3, rng).dense();
    IntMatrix g(3, 3);
    g << 2, 1, 0, 1, 1, 1, 0, 0, 1;
    REQUIRE(std::abs(integer_det(g)) == 1);
    const Matrix gd = g.cast<double>();
    const EisensteinResult a = eisenstein({3.0, 3.0}, Y, 12);
    const EisensteinResult b = eisenstein({3.0, 3.0}, gd * Y * gd.transpose(), 12);
    CHECK(std::abs(a.value - b.value) <= 10.0 * (a.tail_estimate + b.tail_estimate) + 1e-9);
    CHECK(a.value.real() > 0.0);
}

TEST_CASE("coset equality and Gamma_* invariance of terms") {
    Rng rng(45);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + trial % 2;
        IntMatrix t = IntMatrix::Zero(n, n);
        for (int i = 0; i < n; ++i) {
            t(i, i) = rng.uniform() < 0.5 ? -1 : 1;
            for (int j = i + 1; j < n; ++j) t(i, j) = rng.uniform_int(-3, 3);
        }
        ComplexVector s(n - 1, cplx(2.5, 0.4));
        const Matrix td = t.cast<double>();
        CHECK(std::abs(power_p(s, td.transpose() * td) - 1.0) < 1e-12);

        const auto [g, a] = random_integral_element(GroupVariant::GammaN, n, 0, rng);
        CHECK(same_gamma_star_coset(g, g * t));
        IntMatrix lower = IntMatrix::Identity(n, n);
        lower(n - 1, 0) = 1;
        CHECK_FALSE(same_gamma_star_coset(g, g * lower));
    }
}

TEST_CASE("eisenstein_eigenvalue") {
    CHECK(std::abs(eisenstein_eigenvalue({3.0}, 2) - 1.5) < 1e-15);
    CHECK(std::abs(eisenstein_eigenvalue({2.0}, 2)) < 1e-15);
    CHECK(std::abs(eisenstein_eigenvalue({2.0, 2.0}, 3) - 3.0) < 1e-14);
}

TEST_CASE("eisenstein field is an eigenfunction of the invariant Laplacian") {
    const ScalarField e = eisenstein_field(3.0, 60);
    const CoordinateSystem cs = CoordinateSystem::sl_iwasawa(2);
    const ScalarField vs =
        ScalarField::from_generic(cs, [](const auto& Y, const auto&) { return pow(Y(0, 0), cplx(-3.0)); });
    const DiffOperator lb = op_laplace_sl_iwasawa(2, SlLaplaceVariant::LaplaceBeltrami);
    const std::vector<double> p0{1.0, 0.0};
    const cplx expected = op_apply(lb, vs, p0) / vs.value(p0);
    const CharacterValue cv = eigenvalue_extract(lb, e, {{1.0, 0.0}, {1.2, 0.3}, {0.9, 0.45}});
    CHECK(std::abs(cv.value - expected) < 1e-6);
    // The value at a point equals the direct series.
    const double direct = eisenstein({3.0}, from_xv(0.3, 1.2), 60).value.real();
    CHECK(std::abs(e.value(std::vector<double>{1.2, 0.3}).real() - direct) < 1e-12);
}

TEST_CASE("k_bessel") {
    const Matrix one = Matrix::Identity(1, 1);
    const QuadratureValue k0 = k_bessel({0.0}, one, one);
    CHECK(std::abs(k0.value.real() - 2.0 * boost::math::cyl_bessel_k(0.0, 2.0)) < 1e-9);
    CHECK(std::abs(k0.value.real() - 0.227788) < 1e-6);
    const QuadratureValue kh = k_bessel({0.5}, one, one);
    CHECK(std::abs(kh.value.real() - std::sqrt(kPi) * std::exp(-2.0)) < 1e-9);

    Rng rng(46);
    for (int trial = 0; trial < 10; ++trial) {
        const double a = 0.3 + 2 * rng.uniform(), b = 0.3 + 2 * rng.uniform(), s = 3 * rng.uniform() - 1.5;
        const Matrix A = Matrix::Constant(1, 1, a), B = Matrix::Constant(1, 1, b);
        const double closed = 2.0 * std::pow(b / a, s / 2) * boost::math::cyl_bessel_k(s, 2 * std::sqrt(a * b));
        const cplx val = k_bessel({s}, A, B).value;
        CHECK(std::abs(val.real() - closed) <= 1e-8 * closed);
        CHECK(std::abs(val - k_bessel({-s}, B, A).value) <= 1e-8 * closed);
    }

    // ∫_{P_2} det(Y)^s e^{−Tr AY} dv₂ = det(A)^{−s}·√π Γ(s) Γ(s − ½).
    for (double s : {2.5, 3.2}) {
        const Matrix A = mat2(1.4, 0.3, 0.3, 0.9);
        const double oracle = std::pow(A.determinant(), -s) * std::sqrt(kPi) * std::tgamma(s) * std::tgamma(s - 0.5);
        const QuadratureValue q = k_bessel({0.0, s}, A, Matrix::Zero(2, 2));
        CHECK(std::abs(q.value.real() - oracle) <= 1e-7 * oracle);
    }

    CHECK_THROWS_AS(k_bessel({0.0}, one, one, BesselSign::Printed), DivergentParameters);
    CHECK_THROWS_AS(k_bessel({0.0}, -one, one), DomainError);
}

TEST_CASE("fourier_coefficient") {
    const Matrix W = Matrix::Identity(2, 2);
    const auto plane_wave = [](const Matrix& Y) {
        // x = v·(Y₁₂, Y₁₃) with v = 1/Y₁₁.
        const double x1 = Y(0, 1) / Y(0, 0), x2 = Y(0, 2) / Y(0, 0);
        return std::exp(cplx(0, 2 * kPi * (2 * x1 - x2)));
    };
    CHECK(std::abs(fourier_coefficient(plane_wave, {2, -1}, 0.7, W, 8) - 1.0) < 1e-12);
    CHECK(std::abs(fourier_coefficient(plane_wave, {1, -1}, 0.7, W, 8)) < 1e-12);
    CHECK(std::abs(fourier_coefficient(plane_wave, {0, 0}, 0.7, W, 8)) < 1e-12);
    const auto constant = [](const Matrix&) { return cplx(2.5, -1.0); };
    CHECK(std::abs(fourier_coefficient(constant, {0, 0}, 1.1, W, 4) - cplx(2.5, -1.0)) < 1e-12);
    CHECK(std::abs(fourier_coefficient(constant, {1, 0}, 1.1, W, 4)) < 1e-12);
    CHECK_THROWS_AS(fourier_coefficient(constant, {2, 0}, 1.1, W, 5), DomainError);

    const auto e2 = [](const Matrix& Y) { return eisenstein({3.0}, Y, 120).value; };
    const Matrix W1 = Matrix::Identity(1, 1);
    for (double v : {1.0, 1.3}) {
        const cplx a0 = fourier_coefficient(e2, {0}, v, W1, 24);
        CHECK(std::abs(a0.real() - classical_constant_term(3.0, v)) < 1e-3);
        CHECK(std::abs(a0 - fourier_coefficient(e2, {0}, v, W1, 48)) < 1e-8);
    }
}

TEST_CASE("cusp_integral") {
    const CoordinateSystem cs = CoordinateSystem::cone(2);
    const ScalarField one = ScalarField::from_generic(cs, [](const auto& Y, const auto&) { return Y.zero() + cplx(1.0); });
    CuspQuery q;
    q.points = 1 << 10;
    CHECK(std::abs(cusp_integral(one, Matrix::Identity(2, 2), Matrix(0, 2), q).value - 1.0) < 1e-12);

    // On Y = I the unipotent translate has (1,2) entry X, so this is cos(2πX).
    const ScalarField wave =
        ScalarField::from_generic(cs, [](const auto& Y, const auto&) { return cos(Y(0, 1) * (2 * kPi)); });
    CHECK(std::abs(cusp_integral(wave, Matrix::Identity(2, 2), Matrix(0, 2), q).value) < 1e-9);

    const ScalarField e = eisenstein_field(3.0, 40);
    q.variant = CuspVariant::Sl;
    const MonteCarloValue c = cusp_integral(e, from_xv(0.1, 1.3), Matrix(0, 2), q);
    CHECK(std::abs(c.value.real() - classical_constant_term(3.0, 1.3)) < 1e-3);
    CHECK(std::abs(c.value) > 1.0);
}

TEST_CASE("growth_ratio") {
    const CoordinateSystem cs = CoordinateSystem::sl_iwasawa(2);
    const ComplexVector s{3.0};
    const Ray ray = [](double t) { return std::make_pair(from_xv(0.2, t), Matrix(0, 2)); };
    const std::vector<double> ts{1, 2, 4, 8, 16, 32};
    const ScalarField p = power_field(cs, {-3.0});
    CHECK(growth_ratio(p, s, ray, ts) == doctest::Approx(1.0).epsilon(1e-12));
    const ScalarField osc = ScalarField::from_generic(cs, [](const auto& Y, const auto&) {
        return power_p_generic(ComplexVector{-3.0}, Y) * (cos(Y(0, 1) * 7.0) + 1.0);
    });
    CHECK(growth_ratio(osc, s, ray, ts) <= 2.0 + 1e-12);
    const double e = growth_ratio(eisenstein_field(3.0, 40), s, ray, ts);
    CHECK(std::isfinite(e));
    CHECK(e < 3.0);
}

TEST_CASE("automorphic_check verdicts") {
    {
        const CoordinateSystem cs = CoordinateSystem::cone(2);
        AutomorphicCheckConfig cfg;
        cfg.group = GroupVariant::GammaN;
        cfg.seed = 3;
        const AutomorphicReport r = automorphic_check(power_field(cs, {0.7, -1.2}), cfg);
        REQUIRE(r.find("invariance") != nullptr);
        CHECK_FALSE(r.find("invariance")->pass);
        CHECK(r.find("eigen[0]")->pass);
        CHECK(r.to_json().is_object());
    }
    {
        const CoordinateSystem cs = CoordinateSystem::cone(2, 1);
        AutomorphicCheckConfig cfg;
        cfg.group = GroupVariant::GammaNM;
        const ScalarField f0 =
            ScalarField::from_generic(cs, [](const auto& Y, const auto&) { return Y.zero() + cplx(1.0); });
        const AutomorphicReport r = automorphic_check(f0, cfg);
        CHECK(r.find("invariance")->pass);
        CHECK_FALSE(r.find("cusp[1]")->pass);

        cfg.operators = {DiffOperator::partial(cs, 0), DiffOperator::multiplication(cs, poly_variable(cs.dim(), 0))};
        CHECK_THROWS_AS(automorphic_check(f0, cfg), DomainError);
    }
}

TEST_CASE("random integral elements belong to the chosen group") {
    Rng rng(47);
    for (int trial = 0; trial < 50; ++trial) {
        const auto [A, a] = random_integral_element(GroupVariant::SlGammaNM, 3, 2, rng);
        CHECK(integer_det(A) == 1);
        CHECK(a.rows() == 2);
        CHECK(a.cols() == 3);
        const auto [B, b] = random_integral_element(GroupVariant::GammaN, 2, 0, rng);
        CHECK(std::abs(integer_det(B)) == 1);
        CHECK(b.size() == 0);
    }
    CHECK(parse_group_variant(to_string(GroupVariant::SlGammaN)) == GroupVariant::SlGammaN);
    CHECK_THROWS_AS(parse_group_variant("nonsense"), DomainError);
}
