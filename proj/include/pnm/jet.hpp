#pragma once

// Truncated multivariate Taylor expansions with complex coefficients.
//
// A Jet of order K in d variables stores c_α for every multi-index |α| ≤ K,
// representing f(p + h) = Σ c_α h^α + O(|h|^{K+1}). The degree-0 coefficient
// is f(p). Arithmetic and elementary functions propagate the expansion exactly
// up to order K.

#include <complex>
#include <map>
#include <memory>
#include <span>
#include <vector>

namespace pnm {

using cplx = std::complex<double>;
using MultiIndex = std::vector<int>;

class JetShape {
public:
    // Shapes are interned, so jets built independently with the same (dim, order)
    // share one table.
    static std::shared_ptr<const JetShape> get(int dim, int order);

    int dim() const { return dim_; }
    int order() const { return order_; }
    std::size_t size() const { return monomials_.size(); }
    const MultiIndex& monomial(std::size_t i) const { return monomials_[i]; }
    int degree(std::size_t i) const { return degrees_[i]; }
    // -1 when the multi-index is absent (wrong length or degree above order).
    long index_of(const MultiIndex& alpha) const;
    std::size_t variable_index(int var) const { return variable_index_[var]; }

    struct Product {
        std::uint32_t lhs, rhs, out;
    };
    const std::vector<Product>& products() const { return products_; }

    JetShape(int dim, int order);

private:
    int dim_;
    int order_;
    std::vector<MultiIndex> monomials_;
    std::vector<int> degrees_;
    std::map<MultiIndex, std::size_t> lookup_;
    std::vector<std::size_t> variable_index_;
    std::vector<Product> products_;
};

class Jet {
public:
    Jet() = default;
    Jet(std::shared_ptr<const JetShape> shape, cplx constant);

    static Jet constant(std::shared_ptr<const JetShape> shape, cplx value) { return Jet(std::move(shape), value); }
    // The coordinate function x_var expanded at `value`.
    static Jet variable(std::shared_ptr<const JetShape> shape, int var, double value);

    const std::shared_ptr<const JetShape>& shape() const { return shape_; }
    cplx value() const { return c_.empty() ? cplx{} : c_[0]; }
    cplx coefficient(const MultiIndex& alpha) const;
    const std::vector<cplx>& coefficients() const { return c_; }
    std::vector<cplx>& coefficients() { return c_; }

    Jet& operator+=(const Jet& o);
    Jet& operator-=(const Jet& o);
    Jet& operator*=(const Jet& o);
    Jet& operator/=(const Jet& o);
    Jet& operator+=(cplx s);
    Jet& operator-=(cplx s);
    Jet& operator*=(cplx s);
    Jet& operator/=(cplx s);
    Jet operator-() const;

    // f(value + h) for the univariate f with derivatives f^{(k)}(value) = derivs[k].
    Jet compose(std::span<const cplx> derivs) const;

private:
    std::shared_ptr<const JetShape> shape_;
    std::vector<cplx> c_;
};

Jet operator+(Jet a, const Jet& b);
Jet operator-(Jet a, const Jet& b);
Jet operator*(const Jet& a, const Jet& b);
Jet operator/(const Jet& a, const Jet& b);
Jet operator+(Jet a, cplx s);
Jet operator+(cplx s, Jet a);
Jet operator-(Jet a, cplx s);
Jet operator-(cplx s, const Jet& a);
Jet operator*(Jet a, cplx s);
Jet operator*(cplx s, Jet a);
Jet operator/(Jet a, cplx s);
Jet operator/(cplx s, const Jet& a);
inline Jet operator*(Jet a, double s) { return std::move(a) * cplx(s); }
inline Jet operator*(double s, Jet a) { return std::move(a) * cplx(s); }
inline Jet operator+(Jet a, double s) { return std::move(a) + cplx(s); }
inline Jet operator-(Jet a, double s) { return std::move(a) - cplx(s); }
inline Jet operator/(Jet a, double s) { return std::move(a) / cplx(s); }
inline Jet operator/(double s, const Jet& a) { return cplx(s) / a; }

Jet exp(const Jet& a);
Jet log(const Jet& a);
Jet pow(const Jet& a, cplx s);
Jet sqrt(const Jet& a);
Jet sin(const Jet& a);
Jet cos(const Jet& a);

// Scalar-type helpers shared by code templated over cplx and Jet.
inline cplx value_of(cplx x) { return x; }
inline cplx value_of(const Jet& x) { return x.value(); }
inline cplx pow(cplx a, cplx s) { return std::pow(a, s); }

}  // namespace pnm
