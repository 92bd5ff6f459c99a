#include "pnm/errors.hpp"
#include "pnm/groups.hpp"

#include <doctest.h>

using namespace pnm;

namespace {

Matrix mat(int r, int c, std::initializer_list<double> v) {
    Matrix m(r, c);
    auto it = v.begin();
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = *it++;
    return m;
}

double cmax_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("glnm_compose examples") {
    Rng rng(1);
    const GlElement g = random_affine<Flavor::GL>(2, 1, rng);
    const GlElement c = glnm_compose(GlElement::identity(2, 1), g);
    CHECK(max_abs(c.A() - g.A()) < 1e-15);
    CHECK(max_abs(c.a() - g.a()) < 1e-15);

    const GlElement g1(mat(2, 2, {1, 1, 0, 1}), mat(1, 2, {1, 2}));
    const GlElement g2(mat(2, 2, {1, 0, 1, 1}), mat(1, 2, {0, 1}));
    const GlElement g12 = glnm_compose(g1, g2);
    CHECK(max_abs(g12.A() - mat(2, 2, {2, 1, 1, 1})) < 1e-15);
    // a₁·ᵗA₂⁻¹ + a₂ with ᵗA₂⁻¹ = [[1,−1],[0,1]]: [1,2]·ᵗA₂⁻¹ = [1, 1], plus [0,1].
    CHECK(max_abs(g12.a() - mat(1, 2, {1, 2})) < 1e-15);
}

TEST_CASE("group axioms on random samples") {
    Rng rng(2);
    for (int t = 0; t < 100; ++t) {
        const int n = 1 + t % 3, m = t % 3;
        const GlElement a = random_affine<Flavor::GL>(n, m, rng);
        const GlElement b = random_affine<Flavor::GL>(n, m, rng);
        const GlElement c = random_affine<Flavor::GL>(n, m, rng);
        const GlElement l = glnm_compose(glnm_compose(a, b), c);
        const GlElement r = glnm_compose(a, glnm_compose(b, c));
        CHECK(max_abs(l.A() - r.A()) <= 1e-10 * std::max(1.0, max_abs(l.A())));
        CHECK(max_abs(l.a() - r.a()) <= 1e-10 * std::max(1.0, max_abs(l.a())));
        for (const GlElement& e : {glnm_compose(a, glnm_inverse(a)), glnm_compose(glnm_inverse(a), a)}) {
            CHECK(max_abs(e.A() - Matrix::Identity(n, n)) <= 1e-10);
            if (m > 0) CHECK(max_abs(e.a()) <= 1e-10);
        }
    }
}

TEST_CASE("glnm_inverse examples") {
    const GlElement id = glnm_inverse(GlElement::identity(2, 1));
    CHECK(max_abs(id.A() - Matrix::Identity(2, 2)) == 0.0);
    CHECK(max_abs(id.a()) == 0.0);
    const GlElement g = glnm_inverse(GlElement(2.0 * Matrix::Identity(2, 2), mat(1, 2, {2, 4})));
    CHECK(max_abs(g.A() - 0.5 * Matrix::Identity(2, 2)) < 1e-15);
    CHECK(max_abs(g.a() - mat(1, 2, {-4, -8})) < 1e-15);
}

TEST_CASE("glnm_act examples and compatibility") {
    Rng rng(3);
    const Matrix k = random_orthogonal_haar(3, rng);
    const PnmPoint o = glnm_act(GlElement(k, Matrix::Zero(2, 3)), PnmPoint::origin(3, 2));
    CHECK(max_abs(o.Y().dense() - Matrix::Identity(3, 3)) < 1e-12);
    CHECK(max_abs(o.V()) == 0.0);

    const PnmPoint s = glnm_act(GlElement(2.0 * Matrix::Identity(2, 2), Matrix::Zero(1, 2)), PnmPoint::origin(2, 1));
    CHECK(max_abs(s.Y().dense() - 4.0 * Matrix::Identity(2, 2)) < 1e-15);

    for (int t = 0; t < 100; ++t) {
        const int n = 1 + t % 3, m = t % 3;
        const GlElement g1 = random_affine<Flavor::GL>(n, m, rng);
        const GlElement g2 = random_affine<Flavor::GL>(n, m, rng);
        const PnmPoint p(random_spd(n, rng.next_u64()), random_gaussian(m, n, rng));
        const PnmPoint a = glnm_act(glnm_compose(g1, g2), p);
        const PnmPoint b = glnm_act(g1, glnm_act(g2, p));
        CHECK(max_abs(a.Y().dense() - b.Y().dense()) <= 1e-9 * max_abs(a.Y().dense()));
        if (m > 0) CHECK(max_abs(a.V() - b.V()) <= 1e-9 * std::max(1.0, max_abs(a.V())));
        CHECK_NOTHROW(cholesky_upper(a.Y()));
    }
}

TEST_CASE("SL flavor keeps unit determinant and rejects det != 1") {
    Rng rng(4);
    for (int t = 0; t < 50; ++t) {
        const int n = 2 + t % 2;
        const SlElement g = random_affine<Flavor::SL>(n, 1, rng);
        CHECK(g.A().determinant() == doctest::Approx(1.0).epsilon(1e-12));
        const SlPnmPoint p = glnm_act(g, SlPnmPoint::origin(n, 1));
        CHECK(p.Y().dense().determinant() == doctest::Approx(1.0).epsilon(1e-9));
    }
    CHECK_THROWS_AS(SlElement(2.0 * Matrix::Identity(2, 2), Matrix::Zero(0, 2)), DomainError);
    CHECK_THROWS_AS(GlElement(Matrix::Zero(2, 2), Matrix::Zero(0, 2)), DomainError);
}

TEST_CASE("integral elements need det +-1 exactly") {
    IntMatrix a(2, 2);
    a << 2, 1, 1, 1;
    CHECK(integer_det(a) == 1);
    CHECK_NOTHROW(GlIntegralElement(a, IntMatrix::Zero(1, 2)));
    IntMatrix b(2, 2);
    b << 2, 0, 0, 1;
    CHECK_THROWS_AS(GlIntegralElement(b, IntMatrix::Zero(0, 2)), DomainError);
    IntMatrix c(2, 2);
    c << 0, 1, 1, 0;
    CHECK(integer_det(c) == -1);
    CHECK_NOTHROW(GlIntegralElement(c, IntMatrix::Zero(0, 2)));
    CHECK_THROWS_AS(SlIntegralElement(c, IntMatrix::Zero(0, 2)), DomainError);
}

TEST_CASE("siegel_act examples") {
    const int n = 2;
    const CMatrix iI = cplx(0, 1) * CMatrix::Identity(n, n);
    const SiegelPoint p(iI);
    CHECK(cmax_abs(siegel_act(SymplecticElement::identity(n), p).dense() - iI) < 1e-15);
    CHECK(cmax_abs(siegel_act(SymplecticElement::J(n), p).dense() - iI) < 1e-14);

    Rng rng(5);
    for (int t = 0; t < 100; ++t) {
        const SymplecticElement M1 = random_symplectic(n, rng);
        const SymplecticElement M2 = random_symplectic(n, rng);
        const Matrix X = random_gaussian(n, n, rng);
        const CMatrix omega = Matrix(0.5 * (X + X.transpose())).cast<cplx>() +
                              cplx(0, 1) * random_spd(n, rng.next_u64()).dense().cast<cplx>();
        const SiegelPoint w(omega);
        const CMatrix a = siegel_act(symplectic_compose(M1, M2), w).dense();
        const CMatrix b = siegel_act(M1, siegel_act(M2, w)).dense();
        CHECK(cmax_abs(a - b) <= 1e-8 * std::max(1.0, cmax_abs(a)));
        const Matrix im = a.imag();
        CHECK_NOTHROW(cholesky_upper(Matrix(0.5 * (im + im.transpose()))));
    }
}

TEST_CASE("symplectic construction is checked") {
    CHECK_THROWS_AS(SymplecticElement(2.0 * Matrix::Identity(4, 4)), DomainError);
    const Matrix J = symplectic_form(2);
    CHECK(max_abs(J.transpose() * J - Matrix::Identity(4, 4)) == 0.0);
}

TEST_CASE("heisenberg group law") {
    Rng rng(6);
    const HeisenbergElement h = random_heisenberg(2, 1, rng);
    const HeisenbergElement e = heisenberg_compose(h, HeisenbergElement::identity(2, 1));
    CHECK(max_abs(e.lambda() - h.lambda()) == 0.0);
    CHECK(max_abs(e.mu() - h.mu()) == 0.0);
    CHECK(max_abs(e.kappa() - h.kappa()) == 0.0);

    const HeisenbergElement a(mat(1, 1, {1}), mat(1, 1, {0}), mat(1, 1, {0}));
    const HeisenbergElement b(mat(1, 1, {0}), mat(1, 1, {1}), mat(1, 1, {0}));
    const HeisenbergElement ab = heisenberg_compose(a, b);
    CHECK(ab.lambda()(0, 0) == 1.0);
    CHECK(ab.mu()(0, 0) == 1.0);
    CHECK(ab.kappa()(0, 0) == 1.0);

    for (int t = 0; t < 100; ++t) {
        const int n = 1 + t % 3, m = 1 + t % 2;
        const HeisenbergElement x = random_heisenberg(n, m, rng);
        const HeisenbergElement y = random_heisenberg(n, m, rng);
        const HeisenbergElement z = random_heisenberg(n, m, rng);
        // Construction re-validates κ + μ·ᵗλ symmetry.
        CHECK_NOTHROW(heisenberg_compose(x, y));
        CHECK_NOTHROW(heisenberg_inverse(x));
        const HeisenbergElement l = heisenberg_compose(heisenberg_compose(x, y), z);
        const HeisenbergElement r = heisenberg_compose(x, heisenberg_compose(y, z));
        CHECK(max_abs(l.kappa() - r.kappa()) <= 1e-10 * std::max(1.0, max_abs(l.kappa())));
        const HeisenbergElement i = heisenberg_compose(x, heisenberg_inverse(x));
        CHECK(max_abs(i.lambda()) + max_abs(i.mu()) + max_abs(i.kappa()) <= 1e-10);
    }
}

TEST_CASE("jacobi action") {
    Rng rng(7);
    const int n = 2, m = 1;
    auto random_point = [&] {
        const Matrix X = random_gaussian(n, n, rng);
        const CMatrix omega = Matrix(0.5 * (X + X.transpose())).cast<cplx>() +
                              cplx(0, 1) * random_spd(n, rng.next_u64()).dense().cast<cplx>();
        CMatrix Z = random_gaussian(m, n, rng).cast<cplx>() + cplx(0, 1) * random_gaussian(m, n, rng).cast<cplx>();
        return SiegelJacobiPoint{SiegelPoint(omega), Z};
    };
    const SiegelJacobiPoint p = random_point();
    const JacobiElement id{SymplecticElement::identity(n), HeisenbergElement::identity(n, m)};
    const SiegelJacobiPoint q = jacobi_act(id, p);
    CHECK(cmax_abs(q.omega.dense() - p.omega.dense()) < 1e-14);
    CHECK(cmax_abs(q.Z - p.Z) < 1e-14);

    const Matrix mu0 = random_gaussian(m, n, rng);
    const JacobiElement tr{SymplecticElement::identity(n), HeisenbergElement(Matrix::Zero(m, n), mu0, Matrix::Zero(m, m))};
    const SiegelJacobiPoint r = jacobi_act(tr, p);
    CHECK(cmax_abs(r.omega.dense() - p.omega.dense()) < 1e-14);
    CHECK(cmax_abs(r.Z - (p.Z + mu0.cast<cplx>())) < 1e-14);

    for (int t = 0; t < 50; ++t) {
        const JacobiElement j1{random_symplectic(n, rng), random_heisenberg(n, m, rng)};
        const JacobiElement j2{random_symplectic(n, rng), random_heisenberg(n, m, rng)};
        const SiegelJacobiPoint x = random_point();
        const SiegelJacobiPoint a = jacobi_act(jacobi_compose(j1, j2), x);
        const SiegelJacobiPoint b = jacobi_act(j1, jacobi_act(j2, x));
        CHECK(cmax_abs(a.omega.dense() - b.omega.dense()) <= 1e-8 * std::max(1.0, cmax_abs(a.omega.dense())));
        CHECK(cmax_abs(a.Z - b.Z) <= 1e-8 * std::max(1.0, cmax_abs(a.Z)));
    }
}

TEST_CASE("embedding maps") {
    const GlElement e = embed_group(GlElement::identity(2, 1), 4);
    CHECK(max_abs(e.A() - Matrix::Identity(4, 4)) == 0.0);
    CHECK(max_abs(e.a()) == 0.0);
    CHECK(e.a().cols() == 4);

    Rng rng(8);
    const PnmPoint p(random_spd(2, 5), random_gaussian(1, 2, rng));
    const PnmPoint q = embed_point(p, 4);
    const Vector mp = leading_minors(p.Y().dense());
    const Vector mq = leading_minors(q.Y().dense());
    CHECK(mq(0) == doctest::Approx(mp(0)));
    CHECK(mq(1) == doctest::Approx(mp(1)));
    CHECK(mq(2) == doctest::Approx(mp(1)));
    CHECK(mq(3) == doctest::Approx(mp(1)));

    for (int t = 0; t < 100; ++t) {
        const GlElement g = random_affine<Flavor::GL>(2, 1, rng);
        const PnmPoint x(random_spd(2, rng.next_u64()), random_gaussian(1, 2, rng));
        const PnmPoint a = embed_point(glnm_act(g, x), 3);
        const PnmPoint b = glnm_act(embed_group(g, 3), embed_point(x, 3));
        CHECK(max_abs(a.Y().dense() - b.Y().dense()) <= 1e-12 * max_abs(a.Y().dense()));
        CHECK(max_abs(a.V() - b.V()) <= 1e-12 * std::max(1.0, max_abs(a.V())));
        const GlElement h = random_affine<Flavor::GL>(2, 1, rng);
        const GlElement c1 = embed_group(glnm_compose(g, h), 3);
        const GlElement c2 = glnm_compose(embed_group(g, 3), embed_group(h, 3));
        CHECK(max_abs(c1.A() - c2.A()) <= 1e-12 * max_abs(c1.A()));
        CHECK(max_abs(c1.a() - c2.a()) <= 1e-12 * std::max(1.0, max_abs(c1.a())));
    }
}
