#pragma once

// GL(n,R)⋉R^(m,n) and its SL flavor acting on P_n × R^(m,n), the symplectic
// group on Siegel space, and the Heisenberg/Jacobi groups.

#include "pnm/matcore.hpp"

#include <type_traits>

namespace pnm {

enum class Flavor { GL, SL };

inline constexpr double kDetFloor = 1e-12;
inline constexpr double kSlDetTol = 1e-12;
inline constexpr double kSymplecticTol = 1e-9;

template <Flavor F>
class AffineGroupElement {
public:
    // A is n×n invertible (det 1 in SL flavor); a is m×n.
    AffineGroupElement(Matrix A, Matrix a);

    static AffineGroupElement identity(int n, int m);

    int n() const { return static_cast<int>(A_.rows()); }
    int m() const { return static_cast<int>(a_.rows()); }
    const Matrix& A() const { return A_; }
    const Matrix& a() const { return a_; }

private:
    Matrix A_;
    Matrix a_;
};

using GlElement = AffineGroupElement<Flavor::GL>;
using SlElement = AffineGroupElement<Flavor::SL>;

// Integral subgroup element: det A = ±1 exactly (+1 in SL flavor), a integral.
template <Flavor F>
class IntegralGroupElement {
public:
    IntegralGroupElement(IntMatrix A, IntMatrix a);

    static IntegralGroupElement identity(int n, int m);

    int n() const { return static_cast<int>(A_.rows()); }
    int m() const { return static_cast<int>(a_.rows()); }
    const IntMatrix& A() const { return A_; }
    const IntMatrix& a() const { return a_; }
    AffineGroupElement<F> to_real() const;

private:
    IntMatrix A_;
    IntMatrix a_;
};

using GlIntegralElement = IntegralGroupElement<Flavor::GL>;
using SlIntegralElement = IntegralGroupElement<Flavor::SL>;

// Exact determinant of an integer matrix (fraction-free elimination).
long long integer_det(const IntMatrix& a);

template <Flavor F>
class MinkowskiEuclidPoint {
public:
    using YType = std::conditional_t<F == Flavor::SL, UnitDetSpdPoint, SpdPoint>;

    MinkowskiEuclidPoint(YType Y, Matrix V);

    static MinkowskiEuclidPoint origin(int n, int m);

    int n() const { return Y_.n(); }
    int m() const { return static_cast<int>(V_.rows()); }
    const YType& Y() const { return Y_; }
    const Matrix& V() const { return V_; }

private:
    YType Y_;
    Matrix V_;
};

using PnmPoint = MinkowskiEuclidPoint<Flavor::GL>;
using SlPnmPoint = MinkowskiEuclidPoint<Flavor::SL>;

// (A₁,a₁)∘(A₂,a₂) = (A₁A₂, a₁·ᵗA₂⁻¹ + a₂)
template <Flavor F>
AffineGroupElement<F> glnm_compose(const AffineGroupElement<F>& g1, const AffineGroupElement<F>& g2);

// (A, a)⁻¹ = (A⁻¹, −a·ᵗA)
template <Flavor F>
AffineGroupElement<F> glnm_inverse(const AffineGroupElement<F>& g);

// (A, a)·(Y, V) = (A·Y·ᵗA, (V + a)·ᵗA)
template <Flavor F>
MinkowskiEuclidPoint<F> glnm_act(const AffineGroupElement<F>& g, const MinkowskiEuclidPoint<F>& p);

// Raw action on matrices, shared by the typed overload and by chart code.
Matrix act_on_Y(const Matrix& A, const Matrix& Y);
Matrix act_on_V(const Matrix& A, const Matrix& a, const Matrix& V);

// Block-diagonal extension by the identity, translation padded by zero columns.
template <Flavor F>
AffineGroupElement<F> embed_group(const AffineGroupElement<F>& g, int target_n);
template <Flavor F>
MinkowskiEuclidPoint<F> embed_point(const MinkowskiEuclidPoint<F>& p, int target_n);

template <Flavor F>
AffineGroupElement<F> random_affine(int n, int m, Rng& rng, double spread = 0.5);

// ---------------------------------------------------------------------------
// Symplectic group and Siegel space.

class SymplecticElement {
public:
    explicit SymplecticElement(Matrix M);

    static SymplecticElement identity(int n);
    static SymplecticElement J(int n);

    int n() const { return static_cast<int>(M_.rows() / 2); }
    const Matrix& M() const { return M_; }
    Matrix A() const { return M_.topLeftCorner(n(), n()); }
    Matrix B() const { return M_.topRightCorner(n(), n()); }
    Matrix C() const { return M_.bottomLeftCorner(n(), n()); }
    Matrix D() const { return M_.bottomRightCorner(n(), n()); }

private:
    Matrix M_;
};

Matrix symplectic_form(int n);
SymplecticElement symplectic_compose(const SymplecticElement& a, const SymplecticElement& b);
SymplecticElement random_symplectic(int n, Rng& rng, double spread = 0.5);

class SiegelPoint {
public:
    explicit SiegelPoint(ComplexSymmetricMatrix omega);
    explicit SiegelPoint(const CMatrix& omega) : SiegelPoint(ComplexSymmetricMatrix(omega)) {}

    int n() const { return omega_.n(); }
    const CMatrix& dense() const { return omega_.dense(); }

private:
    ComplexSymmetricMatrix omega_;
};

// M⟨Ω⟩ = (AΩ + B)(CΩ + D)⁻¹
SiegelPoint siegel_act(const SymplecticElement& M, const SiegelPoint& omega);

// ---------------------------------------------------------------------------
// Heisenberg and Jacobi groups.

class HeisenbergElement {
public:
    // λ, μ are m×n; κ is m×m with κ + μ·ᵗλ symmetric.
    HeisenbergElement(Matrix lambda, Matrix mu, Matrix kappa);

    static HeisenbergElement identity(int n, int m);

    int n() const { return static_cast<int>(lambda_.cols()); }
    int m() const { return static_cast<int>(lambda_.rows()); }
    const Matrix& lambda() const { return lambda_; }
    const Matrix& mu() const { return mu_; }
    const Matrix& kappa() const { return kappa_; }

private:
    Matrix lambda_;
    Matrix mu_;
    Matrix kappa_;
};

HeisenbergElement heisenberg_compose(const HeisenbergElement& h1, const HeisenbergElement& h2);
HeisenbergElement heisenberg_inverse(const HeisenbergElement& h);
HeisenbergElement random_heisenberg(int n, int m, Rng& rng);

struct JacobiElement {
    SymplecticElement M;
    HeisenbergElement h;
};

struct SiegelJacobiPoint {
    SiegelPoint omega;
    CMatrix Z;  // m×n
};

JacobiElement jacobi_compose(const JacobiElement& j1, const JacobiElement& j2);
SiegelJacobiPoint jacobi_act(const JacobiElement& j, const SiegelJacobiPoint& p);

}  // namespace pnm
