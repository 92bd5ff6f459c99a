#pragma once

// Differential operators with power-monomial coefficients on the coordinates
// of a CoordinateSystem, kept in normal order (coefficients to the left of all
// derivatives), together with jet-based application to scalar fields.

#include "pnm/coords.hpp"
#include "pnm/errors.hpp"
#include "pnm/jet.hpp"
#include "pnm/matcore.hpp"

#include <gmpxx.h>
#include <json.hpp>

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace pnm {

using Rational = mpq_class;

// Exact rational or floating-point scalar. Arithmetic stays exact while both
// operands are rational.
class Scalar {
public:
    Scalar() : v_(Rational(0)) {}
    Scalar(const Rational& r) : v_(r) {}
    Scalar(long long k) : v_(Rational(static_cast<long>(k))) {}
    Scalar(int k) : v_(Rational(k)) {}
    static Scalar from_double(double d) { return Scalar(Tag{}, d); }
    static Scalar ratio(long long p, long long q);

    bool is_exact() const { return std::holds_alternative<Rational>(v_); }
    bool is_zero() const;
    double to_double() const;
    const Rational& rational() const { return std::get<Rational>(v_); }
    Scalar inverse() const;
    std::string to_string() const;

    friend Scalar operator+(const Scalar& a, const Scalar& b);
    friend Scalar operator-(const Scalar& a, const Scalar& b);
    friend Scalar operator*(const Scalar& a, const Scalar& b);
    Scalar operator-() const;
    // Exact comparison; a rational never equals a float.
    friend bool operator==(const Scalar& a, const Scalar& b);

private:
    struct Tag {};
    Scalar(Tag, double d) : v_(d) {}
    std::variant<Rational, double> v_;
};

// One exponent per coordinate; rational so fractional powers stay exact.
using ExpVec = std::vector<Rational>;
// Sum of scalar × monomial, merged by exponent vector.
using Polynomial = std::map<ExpVec, Scalar>;

struct CoefficientMonomial {
    Scalar scalar;
    ExpVec exps;
};

Polynomial poly_constant(int dim, const Scalar& c);
Polynomial poly_variable(int dim, int var, const Rational& power = 1);
void poly_add_into(Polynomial& acc, const Polynomial& p, const Scalar& factor = Scalar(1));
Polynomial poly_mul(const Polynomial& a, const Polynomial& b);
Polynomial poly_scale(const Polynomial& a, const Scalar& s);
// ∂^γ applied to a polynomial.
Polynomial poly_derivative(const Polynomial& p, const MultiIndex& gamma);
double poly_eval(const Polynomial& p, std::span<const double> point);
int poly_max_degree(const Polynomial& p, std::span<const int> vars);

class DiffOperator {
public:
    explicit DiffOperator(CoordinateSystem cs);

    static DiffOperator zero(const CoordinateSystem& cs) { return DiffOperator(cs); }
    static DiffOperator identity(const CoordinateSystem& cs);
    static DiffOperator partial(const CoordinateSystem& cs, int var);
    static DiffOperator multiplication(const CoordinateSystem& cs, const Polynomial& p);

    const CoordinateSystem& coords() const { return cs_; }
    int dim() const { return cs_.dim(); }
    const std::map<MultiIndex, Polynomial>& terms() const { return terms_; }

    void add_term(const MultiIndex& alpha, const ExpVec& exps, const Scalar& c);
    void add_terms(const MultiIndex& alpha, const Polynomial& p, const Scalar& factor = Scalar(1));

    // Highest total derivative order; 0 for the zero operator.
    int order() const;
    bool is_zero() const { return terms_.empty(); }
    bool is_exact() const;
    // Largest absolute scalar over all terms.
    double coefficient_norm() const;
    std::size_t term_count() const;
    // Coefficient polynomial of ∂^α evaluated at a point; 0 when absent.
    double coefficient_at(const MultiIndex& alpha, std::span<const double> point) const;

    // Canonical form is maintained on every mutation; this rebuilds it from
    // scratch and is idempotent.
    DiffOperator normalized() const;

    bool operator==(const DiffOperator& o) const { return cs_ == o.cs_ && terms_ == o.terms_; }

private:
    CoordinateSystem cs_;
    std::map<MultiIndex, Polynomial> terms_;
};

DiffOperator op_add(const DiffOperator& a, const DiffOperator& b);
DiffOperator op_sub(const DiffOperator& a, const DiffOperator& b);
DiffOperator op_scale(const Scalar& s, const DiffOperator& d);
// (c₁∂^α)∘(c₂∂^β) = Σ_{γ≤α} binom(α,γ) c₁ ∂^γ(c₂) ∂^{α−γ+β}
DiffOperator op_compose(const DiffOperator& a, const DiffOperator& b);
DiffOperator op_commutator(const DiffOperator& a, const DiffOperator& b);
// Exact comparison when both operators are exact; otherwise every scalar of
// the difference must be within tol.
bool op_equal(const DiffOperator& a, const DiffOperator& b, double tol = 0.0);

// Operator matrices over the noncommutative operator ring.
using OpMatrix = std::vector<std::vector<DiffOperator>>;
OpMatrix op_matrix_Y(const CoordinateSystem& cs);
OpMatrix op_matrix_dY(const CoordinateSystem& cs);  // ((1+δ_ij)/2 ∂/∂y_ij)
OpMatrix op_matrix_dV(const CoordinateSystem& cs);  // (∂/∂v_ab), m×n
OpMatrix op_matmul(const OpMatrix& a, const OpMatrix& b);
OpMatrix op_transpose(const OpMatrix& a);
DiffOperator op_trace(const OpMatrix& a);

// Constructors. The cone variants accept any cone chart with the given n, so
// operators on P_n can be lifted to P_{n,m} by passing CoordinateSystem::cone(n, m).
DiffOperator op_delta(int j, const CoordinateSystem& cs);
DiffOperator op_delta(int j, int n);
DiffOperator op_D(int j, int n, int m);
DiffOperator op_Omega(int k, int p, int q, int n, int m);  // p, q are 1-based
DiffOperator op_L(int p, int n, int m);

DiffOperator op_laplace_cone(const Scalar& c, int n);

enum class LaplaceSum { UpperTriangle, Diagonal };
DiffOperator op_laplace_pnm(const Scalar& A, const Scalar& B, int n, int m,
                            LaplaceSum sum = LaplaceSum::UpperTriangle);

enum class SlLaplaceVariant { AsPrinted, VScaled, LaplaceBeltrami };
SlLaplaceVariant parse_sl_variant(const std::string& name);
std::string to_string(SlLaplaceVariant v);
DiffOperator op_laplace_sl_iwasawa(int n, SlLaplaceVariant variant = SlLaplaceVariant::VScaled);

// Half-integral SPD index 𝓜 (m×m): diagonal integers, off-diagonal halves.
class IndexMatrix {
public:
    // Entries given as 2𝓜 (all integers).
    explicit IndexMatrix(const IntMatrix& twice_M);
    int m() const { return static_cast<int>(twice_.rows()); }
    const IntMatrix& twice() const { return twice_; }
    Matrix dense() const { return twice_.cast<double>() / 2.0; }

private:
    IntMatrix twice_;
};

// det(Y)·det(∂/∂Y + (1/8π)·ᵗ(∂/∂V) 𝓜⁻¹ (∂/∂V)) on the cone chart (n, m).
DiffOperator op_M(const IndexMatrix& index, int n, int max_order = 6);

// ---------------------------------------------------------------------------
// Scalar fields and application.

struct ApplyConfig {
    int max_jet_order = 6;
    double fd_step_scale = 1.0;
    bool force_finite_differences = false;
};

// A function of the point (Y, V) expressed in the coordinates of `cs`.
// Built-in fields supply a jet evaluator; black-box fields only values.
class ScalarField {
public:
    using ValueFn = std::function<cplx(const GMatrix<cplx>& Y, const GMatrix<cplx>& V)>;
    using JetFn = std::function<Jet(const GMatrix<Jet>& Y, const GMatrix<Jet>& V)>;

    ScalarField(CoordinateSystem cs, ValueFn value, JetFn jet = {});

    // `f` is a generic callable usable with both cplx and Jet matrices.
    template <class F>
    static ScalarField from_generic(const CoordinateSystem& cs, F f) {
        return ScalarField(
            cs, [f](const GMatrix<cplx>& Y, const GMatrix<cplx>& V) { return cplx(f(Y, V)); },
            [f](const GMatrix<Jet>& Y, const GMatrix<Jet>& V) { return Jet(f(Y, V)); });
    }

    const CoordinateSystem& coords() const { return cs_; }
    bool has_native_jet() const { return static_cast<bool>(jet_); }
    cplx value(std::span<const double> point) const;
    cplx value_at(const Matrix& Y, const Matrix& V) const;
    Jet native_jet(std::span<const double> point, int order) const;

    // The same function with the jet evaluator dropped.
    ScalarField black_box() const { return ScalarField(cs_, value_, {}); }
    // f∘g with g = (A, a) acting by (Y, V) ↦ (A Y ᵗA, (V + a) ᵗA).
    ScalarField composed_with(const Matrix& A, const Matrix& a) const;

    ScalarField operator+(const ScalarField& o) const;
    ScalarField scaled(cplx s) const;

private:
    CoordinateSystem cs_;
    ValueFn value_;
    JetFn jet_;
};

// Jet of f at the point, natively or by nested central differences with one
// Richardson step.
Jet jet_of(const ScalarField& f, std::span<const double> point, int order, const ApplyConfig& cfg = {});
cplx op_apply(const DiffOperator& d, const ScalarField& f, std::span<const double> point,
              const ApplyConfig& cfg = {});

// max over points of |D(f∘g)(p) − (Df)(g·p)| / max(|(Df)(g·p)|, |f(g·p)|)
double invariance_residual(const DiffOperator& d, const Matrix& A, const Matrix& a, const ScalarField& f,
                           const std::vector<std::vector<double>>& points, const ApplyConfig& cfg = {});

struct CharacterValue {
    cplx value;
    double constancy_residual = 0.0;  // max |ratio − mean| / max(1, |mean|)
    std::vector<cplx> ratios;
    std::vector<std::size_t> skipped_points;  // |f| below the vanishing threshold
};

CharacterValue eigenvalue_extract(const DiffOperator& d, const ScalarField& f,
                                  const std::vector<std::vector<double>>& points, const ApplyConfig& cfg = {});

std::vector<double> commutes_with_all(const DiffOperator& d, const std::vector<DiffOperator>& generators);

// ---------------------------------------------------------------------------
// Serialization.

nlohmann::json to_json(const DiffOperator& d);
DiffOperator operator_from_json(const nlohmann::json& j);
std::string pretty(const DiffOperator& d);

}  // namespace pnm
