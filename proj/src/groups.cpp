#include "pnm/groups.hpp"

#include "pnm/errors.hpp"

#include <cmath>
#include <algorithm>
#include <string>
#include <vector>

namespace pnm {

namespace {

void require_square(const Matrix& A, const char* what) {
    if (A.rows() != A.cols() || A.rows() < 1) throw DimensionMismatch(std::string(what) + " must be square");
}

}  // namespace

template <Flavor F>
AffineGroupElement<F>::AffineGroupElement(Matrix A, Matrix a) : A_(std::move(A)), a_(std::move(a)) {
    require_square(A_, "A");
    if (a_.cols() != A_.rows()) throw DimensionMismatch("translation must have n columns");
    const double d = A_.determinant();
    if (!(std::abs(d) > kDetFloor)) throw Singular("group element has det " + std::to_string(d));
    if constexpr (F == Flavor::SL) {
        if (!(std::abs(d - 1.0) <= kSlDetTol)) throw DomainError("SL element has det " + std::to_string(d));
    }
}

template <Flavor F>
AffineGroupElement<F> AffineGroupElement<F>::identity(int n, int m) {
    return AffineGroupElement(Matrix::Identity(n, n), Matrix::Zero(m, n));
}

long long integer_det(const IntMatrix& a) {
    if (a.rows() != a.cols()) throw DimensionMismatch("integer determinant of non-square matrix");
    const Eigen::Index n = a.rows();
    if (n == 0) return 1;
    std::vector<std::vector<__int128>> m(n, std::vector<__int128>(n));
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) m[i][j] = a(i, j);
    __int128 sign = 1;
    __int128 prev = 1;
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
        if (m[k][k] == 0) {
            Eigen::Index swap = k + 1;
            while (swap < n && m[swap][k] == 0) ++swap;
            if (swap == n) return 0;
            std::swap(m[k], m[swap]);
            sign = -sign;
        }
        for (Eigen::Index i = k + 1; i < n; ++i)
            for (Eigen::Index j = k + 1; j < n; ++j) m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
        prev = m[k][k];
    }
    return static_cast<long long>(sign * m[n - 1][n - 1]);
}

template <Flavor F>
IntegralGroupElement<F>::IntegralGroupElement(IntMatrix A, IntMatrix a) : A_(std::move(A)), a_(std::move(a)) {
    if (A_.rows() != A_.cols() || A_.rows() < 1) throw DimensionMismatch("integral A must be square");
    if (a_.cols() != A_.rows()) throw DimensionMismatch("integral translation must have n columns");
    const long long d = integer_det(A_);
    if constexpr (F == Flavor::SL) {
        if (d != 1) throw DomainError("SL(n,Z) element has det " + std::to_string(d));
    } else {
        if (d != 1 && d != -1) throw DomainError("GL(n,Z) element has det " + std::to_string(d));
    }
}

template <Flavor F>
IntegralGroupElement<F> IntegralGroupElement<F>::identity(int n, int m) {
    return IntegralGroupElement(IntMatrix::Identity(n, n), IntMatrix::Zero(m, n));
}

template <Flavor F>
AffineGroupElement<F> IntegralGroupElement<F>::to_real() const {
    return AffineGroupElement<F>(A_.template cast<double>(), a_.template cast<double>());
}

template <Flavor F>
MinkowskiEuclidPoint<F>::MinkowskiEuclidPoint(YType Y, Matrix V) : Y_(std::move(Y)), V_(std::move(V)) {
    if (V_.cols() != Y_.n()) throw DimensionMismatch("V must have n columns");
}

template <Flavor F>
MinkowskiEuclidPoint<F> MinkowskiEuclidPoint<F>::origin(int n, int m) {
    return MinkowskiEuclidPoint(YType::identity(n), Matrix::Zero(m, n));
}

template <Flavor F>
AffineGroupElement<F> glnm_compose(const AffineGroupElement<F>& g1, const AffineGroupElement<F>& g2) {
    if (g1.n() != g2.n() || g1.m() != g2.m()) throw DimensionMismatch("compose: (n, m) differ");
    const Matrix inv_t = g2.A().inverse().transpose();
    return AffineGroupElement<F>(g1.A() * g2.A(), g1.a() * inv_t + g2.a());
}

template <Flavor F>
AffineGroupElement<F> glnm_inverse(const AffineGroupElement<F>& g) {
    return AffineGroupElement<F>(g.A().inverse(), -g.a() * g.A().transpose());
}

Matrix act_on_Y(const Matrix& A, const Matrix& Y) {
    Matrix out = A * Y * A.transpose();
    return 0.5 * (out + out.transpose());
}

Matrix act_on_V(const Matrix& A, const Matrix& a, const Matrix& V) { return (V + a) * A.transpose(); }

template <Flavor F>
MinkowskiEuclidPoint<F> glnm_act(const AffineGroupElement<F>& g, const MinkowskiEuclidPoint<F>& p) {
    if (g.n() != p.n() || g.m() != p.m()) throw DimensionMismatch("act: (n, m) differ");
    using Y = typename MinkowskiEuclidPoint<F>::YType;
    Matrix y = act_on_Y(g.A(), p.Y().dense());
    if constexpr (F == Flavor::SL) {
        return MinkowskiEuclidPoint<F>(Y(y), act_on_V(g.A(), g.a(), p.V()));
    } else {
        return MinkowskiEuclidPoint<F>(Y(SpdPoint(y)), act_on_V(g.A(), g.a(), p.V()));
    }
}

template <Flavor F>
AffineGroupElement<F> embed_group(const AffineGroupElement<F>& g, int target_n) {
    if (target_n <= g.n()) throw DomainError("embedding target must exceed n");
    Matrix A = Matrix::Identity(target_n, target_n);
    A.topLeftCorner(g.n(), g.n()) = g.A();
    Matrix a = Matrix::Zero(g.m(), target_n);
    a.leftCols(g.n()) = g.a();
    return AffineGroupElement<F>(A, a);
}

template <Flavor F>
MinkowskiEuclidPoint<F> embed_point(const MinkowskiEuclidPoint<F>& p, int target_n) {
    if (target_n <= p.n()) throw DomainError("embedding target must exceed n");
    Matrix Y = Matrix::Identity(target_n, target_n);
    Y.topLeftCorner(p.n(), p.n()) = p.Y().dense();
    Matrix V = Matrix::Zero(p.m(), target_n);
    V.leftCols(p.n()) = p.V();
    using YT = typename MinkowskiEuclidPoint<F>::YType;
    return MinkowskiEuclidPoint<F>(YT(Y), V);
}

template <Flavor F>
AffineGroupElement<F> random_affine(int n, int m, Rng& rng, double spread) {
    Matrix A;
    double d = 0.0;
    do {
        A = Matrix::Identity(n, n) + spread * random_gaussian(n, n, rng);
        d = A.determinant();
    } while (std::abs(d) < 0.05);
    if constexpr (F == Flavor::SL) {
        if (d < 0) A.row(0) *= -1.0;
        A *= std::pow(std::abs(d), -1.0 / n);
        // Land exactly on det 1 within rounding.
        A *= std::pow(A.determinant(), -1.0 / n);
    }
    return AffineGroupElement<F>(A, random_gaussian(m, n, rng));
}

#define PNM_INSTANTIATE(F)                                                                                   \
    template class AffineGroupElement<F>;                                                                    \
    template class IntegralGroupElement<F>;                                                                  \
    template class MinkowskiEuclidPoint<F>;                                                                  \
    template AffineGroupElement<F> glnm_compose(const AffineGroupElement<F>&, const AffineGroupElement<F>&); \
    template AffineGroupElement<F> glnm_inverse(const AffineGroupElement<F>&);                               \
    template MinkowskiEuclidPoint<F> glnm_act(const AffineGroupElement<F>&, const MinkowskiEuclidPoint<F>&); \
    template AffineGroupElement<F> embed_group(const AffineGroupElement<F>&, int);                           \
    template MinkowskiEuclidPoint<F> embed_point(const MinkowskiEuclidPoint<F>&, int);                       \
    template AffineGroupElement<F> random_affine<F>(int, int, Rng&, double);

PNM_INSTANTIATE(Flavor::GL)
PNM_INSTANTIATE(Flavor::SL)
#undef PNM_INSTANTIATE

// ---------------------------------------------------------------------------

Matrix symplectic_form(int n) {
    Matrix J = Matrix::Zero(2 * n, 2 * n);
    J.topRightCorner(n, n) = Matrix::Identity(n, n);
    J.bottomLeftCorner(n, n) = -Matrix::Identity(n, n);
    return J;
}

SymplecticElement::SymplecticElement(Matrix M) : M_(std::move(M)) {
    if (M_.rows() != M_.cols() || M_.rows() % 2 != 0 || M_.rows() == 0)
        throw DimensionMismatch("symplectic matrix must be 2n×2n");
    const Matrix J = symplectic_form(n());
    const double err = max_abs(M_.transpose() * J * M_ - J);
    if (!(err <= kSymplecticTol)) throw DomainError("matrix is not symplectic (residual " + std::to_string(err) + ")");
}

SymplecticElement SymplecticElement::identity(int n) { return SymplecticElement(Matrix::Identity(2 * n, 2 * n)); }
SymplecticElement SymplecticElement::J(int n) { return SymplecticElement(symplectic_form(n)); }

SymplecticElement symplectic_compose(const SymplecticElement& a, const SymplecticElement& b) {
    if (a.n() != b.n()) throw DimensionMismatch("symplectic compose: n differs");
    return SymplecticElement(a.M() * b.M());
}

SymplecticElement random_symplectic(int n, Rng& rng, double spread) {
    auto sym = [&] {
        Matrix s = spread * random_gaussian(n, n, rng);
        return Matrix(0.5 * (s + s.transpose()));
    };
    Matrix A;
    do {
        A = Matrix::Identity(n, n) + spread * random_gaussian(n, n, rng);
    } while (std::abs(A.determinant()) < 0.1);
    Matrix levi = Matrix::Zero(2 * n, 2 * n);
    levi.topLeftCorner(n, n) = A;
    levi.bottomRightCorner(n, n) = A.inverse().transpose();
    Matrix upper = Matrix::Identity(2 * n, 2 * n);
    upper.topRightCorner(n, n) = sym();
    Matrix lower = Matrix::Identity(2 * n, 2 * n);
    lower.bottomLeftCorner(n, n) = sym();
    return SymplecticElement(levi * upper * lower);
}

SiegelPoint::SiegelPoint(ComplexSymmetricMatrix omega) : omega_(std::move(omega)) {
    (void)cholesky_upper(Matrix(omega_.dense().imag()));
}

namespace {

CMatrix symmetrized(const CMatrix& r, const char* what) {
    const double scale = std::max(1.0, r.cwiseAbs().maxCoeff());
    if ((r - r.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale)
        throw DomainError(std::string(what) + ": result is not symmetric");
    return 0.5 * (r + r.transpose());
}

CMatrix solve_right(const CMatrix& lhs, const CMatrix& denom) {
    // lhs · denom⁻¹ via the transposed system.
    Eigen::FullPivLU<CMatrix> lu(denom.transpose());
    const double cond_floor = 1e-12 * std::max(1.0, denom.cwiseAbs().maxCoeff());
    if (lu.rank() < denom.rows() || std::abs(lu.determinant()) < cond_floor)
        throw Singular("CΩ + D is not invertible");
    return lu.solve(lhs.transpose()).transpose();
}

}  // namespace

SiegelPoint siegel_act(const SymplecticElement& M, const SiegelPoint& omega) {
    if (M.n() != omega.n()) throw DimensionMismatch("siegel_act: n differs");
    const CMatrix W = omega.dense();
    const CMatrix num = M.A().cast<cplx>() * W + M.B().cast<cplx>();
    const CMatrix den = M.C().cast<cplx>() * W + M.D().cast<cplx>();
    return SiegelPoint(symmetrized(solve_right(num, den), "siegel_act"));
}

HeisenbergElement::HeisenbergElement(Matrix lambda, Matrix mu, Matrix kappa)
    : lambda_(std::move(lambda)), mu_(std::move(mu)), kappa_(std::move(kappa)) {
    if (lambda_.rows() != mu_.rows() || lambda_.cols() != mu_.cols())
        throw DimensionMismatch("λ and μ must both be m×n");
    if (kappa_.rows() != lambda_.rows() || kappa_.cols() != lambda_.rows())
        throw DimensionMismatch("κ must be m×m");
    const Matrix s = kappa_ + mu_ * lambda_.transpose();
    const double scale = std::max(1.0, max_abs(s));
    if (!(max_abs(s - s.transpose()) <= 1e-10 * scale)) throw DomainError("κ + μ·ᵗλ is not symmetric");
}

HeisenbergElement HeisenbergElement::identity(int n, int m) {
    return HeisenbergElement(Matrix::Zero(m, n), Matrix::Zero(m, n), Matrix::Zero(m, m));
}

HeisenbergElement heisenberg_compose(const HeisenbergElement& h1, const HeisenbergElement& h2) {
    if (h1.n() != h2.n() || h1.m() != h2.m()) throw DimensionMismatch("heisenberg compose: (n, m) differ");
    return HeisenbergElement(h1.lambda() + h2.lambda(), h1.mu() + h2.mu(),
                             h1.kappa() + h2.kappa() + h1.lambda() * h2.mu().transpose() -
                                 h1.mu() * h2.lambda().transpose());
}

HeisenbergElement heisenberg_inverse(const HeisenbergElement& h) {
    return HeisenbergElement(-h.lambda(), -h.mu(),
                             -h.kappa() + h.lambda() * h.mu().transpose() - h.mu() * h.lambda().transpose());
}

HeisenbergElement random_heisenberg(int n, int m, Rng& rng) {
    const Matrix lambda = random_gaussian(m, n, rng);
    const Matrix mu = random_gaussian(m, n, rng);
    Matrix s = random_gaussian(m, m, rng);
    s = Matrix(0.5 * (s + s.transpose()));
    return HeisenbergElement(lambda, mu, s - mu * lambda.transpose());
}

JacobiElement jacobi_compose(const JacobiElement& j1, const JacobiElement& j2) {
    const int n = j1.M.n();
    if (j2.M.n() != n || j1.h.n() != n || j2.h.n() != n || j1.h.m() != j2.h.m())
        throw DimensionMismatch("jacobi compose: (n, m) differ");
    Matrix lm(j1.h.m(), 2 * n);
    lm << j1.h.lambda(), j1.h.mu();
    const Matrix t = lm * j2.M.M();
    const Matrix lt = t.leftCols(n);
    const Matrix mt = t.rightCols(n);
    HeisenbergElement h(lt + j2.h.lambda(), mt + j2.h.mu(),
                        j1.h.kappa() + j2.h.kappa() + lt * j2.h.mu().transpose() - mt * j2.h.lambda().transpose());
    return JacobiElement{symplectic_compose(j1.M, j2.M), h};
}

SiegelJacobiPoint jacobi_act(const JacobiElement& j, const SiegelJacobiPoint& p) {
    const int n = j.M.n();
    if (p.omega.n() != n || p.Z.cols() != n || p.Z.rows() != j.h.m())
        throw DimensionMismatch("jacobi_act: (n, m) differ");
    const CMatrix W = p.omega.dense();
    const CMatrix den = j.M.C().cast<cplx>() * W + j.M.D().cast<cplx>();
    const CMatrix num = p.Z + j.h.lambda().cast<cplx>() * W + j.h.mu().cast<cplx>();
    return SiegelJacobiPoint{siegel_act(j.M, p.omega), solve_right(num, den)};
}

}  // namespace pnm
