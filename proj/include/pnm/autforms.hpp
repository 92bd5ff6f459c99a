#pragma once

// Power and spherical functions, the Maass power function I_ν, Eisenstein
// series for n = 2, 3, K-Bessel integrals, Fourier coefficients, cusp
// integrals, growth ratios and the automorphic-form checker.

#include "pnm/coords.hpp"
#include "pnm/diffops.hpp"
#include "pnm/generic_matrix.hpp"
#include "pnm/geometry.hpp"
#include "pnm/jet.hpp"
#include "pnm/matcore.hpp"

#include <nlohmann/json.hpp>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace pnm {

using ComplexVector = std::vector<cplx>;

// ---------------------------------------------------------------------------
// Power functions.

// ∏_j (det Y_j)^{s_j} over the first |s| leading minors (|s| ≤ n).
template <class T>
T power_p_generic(const ComplexVector& s, const GMatrix<T>& Y) {
    T out = Y.zero() + cplx(1.0);
    for (std::size_t j = 0; j < s.size(); ++j) {
        if (s[j] == cplx(0.0)) continue;
        out = out * pow(determinant(Y.block(0, 0, static_cast<int>(j) + 1, static_cast<int>(j) + 1)), s[j]);
    }
    return out;
}

// ∏_j t_jj^{2z_j + j − (n+1)/2} with Y = ᵗT·T, using t_jj² = D_j / D_{j−1}.
template <class T>
T phi_generic(const ComplexVector& z, const GMatrix<T>& Y) {
    const int n = Y.rows();
    T out = Y.zero() + cplx(1.0);
    T prev = Y.zero() + cplx(1.0);
    for (int j = 1; j <= n; ++j) {
        const T minor = determinant(Y.block(0, 0, j, j));
        const cplx e = 2.0 * z[j - 1] + static_cast<double>(j) - 0.5 * (n + 1);
        out = out * pow(minor / prev, 0.5 * e);
        prev = minor;
    }
    return out;
}

cplx power_p(const ComplexVector& s, const Matrix& Y);
ComplexVector tau_from_s(const ComplexVector& s);
// ∏ |t_jj|^{r_j} for an upper-triangular t.
cplx tau(const ComplexVector& r, const Matrix& t);
cplx phi_z(const ComplexVector& z, const Matrix& Y);

struct MonteCarloValue {
    cplx value;
    double standard_error = 0.0;
    long samples = 0;
};

// Mean of p_s(Y[k]) over Haar-random k ∈ O(n). Samples are split into fixed
// seeded blocks, so the result does not depend on the worker count.
MonteCarloValue spherical_h(const ComplexVector& s, const Matrix& Y, long sample_count, std::uint64_t seed,
                            int workers = 1);

// ---------------------------------------------------------------------------
// Maass power function.

IntMatrix b_matrix(int n);
cplx i_nu(const ComplexVector& nu, const GoldfeldPoint& z);
cplx i_nu_tilde(const ComplexVector& nu, const GoldfeldPoint& z, const Matrix& v);

// I_ν through trailing minors T_k of Y: y_k² = T_{k+1} T_{k−1} / T_k².
template <class T>
T i_nu_generic(const ComplexVector& nu, const IntMatrix& b, const GMatrix<T>& Y) {
    const int n = Y.rows();
    std::vector<T> trailing;
    trailing.push_back(Y.zero() + cplx(1.0));
    for (int k = 1; k <= n; ++k) trailing.push_back(determinant(Y.block(n - k, n - k, k, k)));
    T out = Y.zero() + cplx(1.0);
    for (int i = 1; i <= n - 1; ++i) {
        cplx e = 0.0;
        for (int j = 1; j <= n - 1; ++j) e += static_cast<double>(b(i - 1, j - 1)) * nu[j - 1];
        const T y2 = trailing[i + 1] * trailing[i - 1] / (trailing[i] * trailing[i]);
        out = out * pow(y2, 0.5 * e);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Eisenstein series E_n(s, Y) = Σ_{γ ∈ Γ_n/Γ_*} p_{−s}(Y[γ]).

struct EisensteinResult {
    cplx value;
    double tail_estimate = 0.0;  // from the last dyadic height shell
    long terms = 0;
    int height = 0;
};

inline constexpr long kEisensteinBudget = 200'000'000;

// n = 2: cosets ↔ primitive (c, d) modulo ±. n = 3: cosets ↔ pairs (u, c) of
// primitive vectors modulo ± with u·c = 0 (first column and the normal of the
// span of the first two columns). Height is the largest absolute entry.
EisensteinResult eisenstein(const ComplexVector& s, const Matrix& Y, int height, int workers = 1,
                            long budget = kEisensteinBudget);
// γ₁⁻¹γ₂ is integral upper-triangular with ±1 diagonal.
bool same_gamma_star_coset(const IntMatrix& g1, const IntMatrix& g2);
cplx eisenstein_eigenvalue(const ComplexVector& s, int n);

// Truncated E₂(s, ·) on the partial-Iwasawa chart of 𝔓_2, with native jets.
ScalarField eisenstein_field(cplx s, int height);

// ---------------------------------------------------------------------------
// K-Bessel integrals ∫_{P_n} p_s(Y) e^{∓Tr(AY + BY⁻¹)} dv_n, n = 1, 2.

enum class BesselSign { Classical, Printed };

struct QuadratureValue {
    cplx value;
    double error_estimate = 0.0;
};

// B may be positive semidefinite when A is positive definite.
QuadratureValue k_bessel(const ComplexVector& s, const Matrix& A, const Matrix& B,
                         BesselSign sign = BesselSign::Classical, double tol = 1e-10);

// ---------------------------------------------------------------------------
// Fourier coefficients, cusp integrals, growth.

// ∫_{[0,1]^{n−1}} f([v, x, W]) e^{−2πi ᵗxN} dx on a grid^{n−1} trapezoid.
cplx fourier_coefficient(const std::function<cplx(const Matrix& Y)>& f, const std::vector<int>& N, double v,
                         const Matrix& W, int grid);

enum class CuspVariant { Cone, Sl, Pnm, Unipotent };
CuspVariant parse_cusp_variant(const std::string& name);

struct CuspQuery {
    CuspVariant variant = CuspVariant::Cone;
    int j = 1;                    // block split (j, n − j) for Cone/Sl/Pnm
    std::vector<int> partition;   // r₁ + … + r_b = n for Unipotent
    bool include_translations = false;  // Unipotent on P_{n,m}: also integrate V
    long points = 1L << 14;
    int shifts = 8;
    std::uint64_t seed = 0;
};

// Randomly shifted rank-1 lattice rule over the unipotent torus, applied as
// (Y, V) ↦ (Y[u], (V + η)·u).
MonteCarloValue cusp_integral(const ScalarField& f, const Matrix& Y, const Matrix& V, const CuspQuery& q);

using Ray = std::function<std::pair<Matrix, Matrix>(double t)>;
// max over t of |f(ray(t))| / |p_{−s}(Y(t))|.
double growth_ratio(const ScalarField& f, const ComplexVector& s, const Ray& ray, const std::vector<double>& ts);

// ---------------------------------------------------------------------------
// Automorphic-form checker.

enum class GroupVariant { GammaN, SlGammaN, GammaNM, SlGammaNM };
GroupVariant parse_group_variant(const std::string& name);
std::string to_string(GroupVariant g);

struct AutomorphicCheckConfig {
    GroupVariant group = GroupVariant::GammaN;
    // Empty means {Laplacian} of the field's chart.
    std::vector<DiffOperator> operators;
    std::vector<std::vector<double>> probe_points;  // chart coordinates; empty: random
    int group_elements = 20;
    int eigen_points = 5;
    std::vector<int> cusp_js;  // empty: 1..n−1
    ComplexVector growth_s;    // exponent s of p_{−s}; empty: skip growth
    std::optional<Ray> growth_ray;
    std::vector<double> growth_ts = {1, 2, 4, 8, 16, 32, 64, 128};
    long cusp_points = 1L << 12;
    std::uint64_t seed = 0;
    double invariance_tol = 1e-6;
    double eigen_tol = 1e-6;
    double cusp_tol = 1e-6;
    double growth_bound = 1e6;
    ApplyConfig apply;
};

struct ConditionVerdict {
    std::string name;
    bool pass = false;
    double residual = 0.0;
    nlohmann::json detail;
};

struct AutomorphicReport {
    std::vector<ConditionVerdict> conditions;
    const ConditionVerdict* find(const std::string& name) const;
    nlohmann::json to_json() const;
};

// Throws DomainError when the operator set does not commute pairwise.
AutomorphicReport automorphic_check(const ScalarField& f, const AutomorphicCheckConfig& config);

// Random element of the chosen integral group with entries of small height.
std::pair<IntMatrix, IntMatrix> random_integral_element(GroupVariant g, int n, int m, Rng& rng, int steps = 3);

}  // namespace pnm
