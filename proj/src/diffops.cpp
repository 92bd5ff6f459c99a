#include "pnm/diffops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

namespace pnm {

// ---------------------------------------------------------------------------
// Scalar

Scalar Scalar::ratio(long long p, long long q) {
    Rational r(static_cast<long>(p), static_cast<long>(q));
    r.canonicalize();
    return Scalar(r);
}

bool Scalar::is_zero() const {
    if (is_exact()) return sgn(rational()) == 0;
    return std::get<double>(v_) == 0.0;
}

double Scalar::to_double() const { return is_exact() ? rational().get_d() : std::get<double>(v_); }

Scalar Scalar::inverse() const {
    if (is_zero()) throw DomainError("inverse of zero scalar");
    if (is_exact()) return Scalar(Rational(1) / rational());
    return from_double(1.0 / std::get<double>(v_));
}

std::string Scalar::to_string() const {
    if (is_exact()) return rational().get_str();
    std::ostringstream os;
    os.precision(17);
    os << std::get<double>(v_);
    return os.str();
}

Scalar operator+(const Scalar& a, const Scalar& b) {
    if (a.is_exact() && b.is_exact()) return Scalar(Rational(a.rational() + b.rational()));
    return Scalar::from_double(a.to_double() + b.to_double());
}

Scalar operator-(const Scalar& a, const Scalar& b) {
    if (a.is_exact() && b.is_exact()) return Scalar(Rational(a.rational() - b.rational()));
    return Scalar::from_double(a.to_double() - b.to_double());
}

Scalar operator*(const Scalar& a, const Scalar& b) {
    if (a.is_exact() && b.is_exact()) return Scalar(Rational(a.rational() * b.rational()));
    return Scalar::from_double(a.to_double() * b.to_double());
}

Scalar Scalar::operator-() const {
    if (is_exact()) return Scalar(Rational(-rational()));
    return from_double(-std::get<double>(v_));
}

bool operator==(const Scalar& a, const Scalar& b) { return a.v_ == b.v_; }

// ---------------------------------------------------------------------------
// Polynomials

Polynomial poly_constant(int dim, const Scalar& c) {
    Polynomial p;
    if (!c.is_zero()) p.emplace(ExpVec(dim, Rational(0)), c);
    return p;
}

Polynomial poly_variable(int dim, int var, const Rational& power) {
    ExpVec e(dim, Rational(0));
    e[var] = power;
    return Polynomial{{e, Scalar(1)}};
}

void poly_add_into(Polynomial& acc, const Polynomial& p, const Scalar& factor) {
    for (const auto& [e, c] : p) {
        auto it = acc.find(e);
        const Scalar add = c * factor;
        if (it == acc.end()) {
            if (!add.is_zero()) acc.emplace(e, add);
        } else {
            it->second = it->second + add;
            if (it->second.is_zero()) acc.erase(it);
        }
    }
}

Polynomial poly_mul(const Polynomial& a, const Polynomial& b) {
    Polynomial out;
    for (const auto& [ea, ca] : a) {
        for (const auto& [eb, cb] : b) {
            ExpVec e(ea.size());
            for (std::size_t i = 0; i < ea.size(); ++i) e[i] = ea[i] + eb[i];
            Polynomial term{{std::move(e), ca * cb}};
            poly_add_into(out, term);
        }
    }
    return out;
}

Polynomial poly_scale(const Polynomial& a, const Scalar& s) {
    Polynomial out;
    poly_add_into(out, a, s);
    return out;
}

Polynomial poly_derivative(const Polynomial& p, const MultiIndex& gamma) {
    Polynomial out;
    for (const auto& [e, c] : p) {
        Rational factor(1);
        ExpVec ne = e;
        for (std::size_t i = 0; i < gamma.size() && sgn(factor) != 0; ++i) {
            for (int k = 0; k < gamma[i]; ++k) {
                factor *= ne[i];
                ne[i] -= 1;
            }
        }
        if (sgn(factor) == 0) continue;
        Polynomial term{{std::move(ne), c * Scalar(factor)}};
        poly_add_into(out, term);
    }
    return out;
}

namespace {

double monomial_power(double x, const Rational& e) {
    if (e.get_den() == 1) {
        const long k = e.get_num().get_si();
        if (k == 0) return 1.0;
        double r = 1.0, base = x;
        unsigned long u = static_cast<unsigned long>(k < 0 ? -k : k);
        while (u) {
            if (u & 1) r *= base;
            base *= base;
            u >>= 1;
        }
        return k < 0 ? 1.0 / r : r;
    }
    if (x <= 0.0) throw ChartViolation("fractional power of a non-positive coordinate");
    return std::pow(x, e.get_d());
}

}  // namespace

double poly_eval(const Polynomial& p, std::span<const double> point) {
    double s = 0.0;
    for (const auto& [e, c] : p) {
        double t = c.to_double();
        for (std::size_t i = 0; i < e.size(); ++i)
            if (sgn(e[i]) != 0) t *= monomial_power(point[i], e[i]);
        s += t;
    }
    return s;
}

int poly_max_degree(const Polynomial& p, std::span<const int> vars) {
    int best = 0;
    for (const auto& [e, c] : p) {
        Rational d(0);
        for (int v : vars) d += e[v];
        best = std::max(best, static_cast<int>(std::ceil(d.get_d())));
    }
    return best;
}

// ---------------------------------------------------------------------------
// DiffOperator

DiffOperator::DiffOperator(CoordinateSystem cs) : cs_(cs) {}

DiffOperator DiffOperator::identity(const CoordinateSystem& cs) {
    DiffOperator d(cs);
    d.add_term(MultiIndex(cs.dim(), 0), ExpVec(cs.dim(), Rational(0)), Scalar(1));
    return d;
}

DiffOperator DiffOperator::partial(const CoordinateSystem& cs, int var) {
    DiffOperator d(cs);
    MultiIndex a(cs.dim(), 0);
    a[var] = 1;
    d.add_term(a, ExpVec(cs.dim(), Rational(0)), Scalar(1));
    return d;
}

DiffOperator DiffOperator::multiplication(const CoordinateSystem& cs, const Polynomial& p) {
    DiffOperator d(cs);
    d.add_terms(MultiIndex(cs.dim(), 0), p);
    return d;
}

void DiffOperator::add_term(const MultiIndex& alpha, const ExpVec& exps, const Scalar& c) {
    if (c.is_zero()) return;
    if (static_cast<int>(alpha.size()) != dim() || static_cast<int>(exps.size()) != dim())
        throw DimensionMismatch("operator term length");
    add_terms(alpha, Polynomial{{exps, c}});
}

void DiffOperator::add_terms(const MultiIndex& alpha, const Polynomial& p, const Scalar& factor) {
    if (p.empty()) return;
    auto& slot = terms_[alpha];
    poly_add_into(slot, p, factor);
    if (slot.empty()) terms_.erase(alpha);
}

int DiffOperator::order() const {
    int k = 0;
    for (const auto& [a, p] : terms_) k = std::max(k, std::accumulate(a.begin(), a.end(), 0));
    return k;
}

bool DiffOperator::is_exact() const {
    for (const auto& [a, p] : terms_)
        for (const auto& [e, c] : p)
            if (!c.is_exact()) return false;
    return true;
}

double DiffOperator::coefficient_norm() const {
    double m = 0.0;
    for (const auto& [a, p] : terms_)
        for (const auto& [e, c] : p) m = std::max(m, std::abs(c.to_double()));
    return m;
}

std::size_t DiffOperator::term_count() const {
    std::size_t k = 0;
    for (const auto& [a, p] : terms_) k += p.size();
    return k;
}

double DiffOperator::coefficient_at(const MultiIndex& alpha, std::span<const double> point) const {
    auto it = terms_.find(alpha);
    return it == terms_.end() ? 0.0 : poly_eval(it->second, point);
}

DiffOperator DiffOperator::normalized() const {
    DiffOperator out(cs_);
    for (const auto& [a, p] : terms_)
        for (const auto& [e, c] : p) out.add_term(a, e, c);
    return out;
}

namespace {

void require_same_coords(const DiffOperator& a, const DiffOperator& b) {
    if (!(a.coords() == b.coords()))
        throw DomainError("coordinate-system mismatch: " + to_string(a.coords()) + " vs " + to_string(b.coords()));
}

// All γ ≤ α with the product of binomials binom(α_i, γ_i).
void sub_indices(const MultiIndex& alpha, std::size_t i, MultiIndex& cur, long long weight,
                 std::vector<std::pair<MultiIndex, long long>>& out) {
    if (i == alpha.size()) {
        out.emplace_back(cur, weight);
        return;
    }
    long long binom = 1;
    for (int g = 0; g <= alpha[i]; ++g) {
        cur[i] = g;
        sub_indices(alpha, i + 1, cur, weight * binom, out);
        binom = binom * (alpha[i] - g) / (g + 1);
    }
    cur[i] = 0;
}

}  // namespace

DiffOperator op_add(const DiffOperator& a, const DiffOperator& b) {
    require_same_coords(a, b);
    DiffOperator out = a;
    for (const auto& [al, p] : b.terms()) out.add_terms(al, p);
    return out;
}

DiffOperator op_sub(const DiffOperator& a, const DiffOperator& b) { return op_add(a, op_scale(Scalar(-1), b)); }

DiffOperator op_scale(const Scalar& s, const DiffOperator& d) {
    DiffOperator out(d.coords());
    for (const auto& [al, p] : d.terms()) out.add_terms(al, p, s);
    return out;
}

DiffOperator op_compose(const DiffOperator& a, const DiffOperator& b) {
    require_same_coords(a, b);
    DiffOperator out(a.coords());
    const int dim = a.dim();
    std::map<MultiIndex, std::vector<std::pair<MultiIndex, long long>>> subs;
    for (const auto& [alpha, P] : a.terms()) {
        auto& gammas = subs[alpha];
        if (gammas.empty()) {
            MultiIndex cur(dim, 0);
            sub_indices(alpha, 0, cur, 1, gammas);
        }
        for (const auto& [beta, Q] : b.terms()) {
            for (const auto& [gamma, w] : gammas) {
                const Polynomial dQ = poly_derivative(Q, gamma);
                if (dQ.empty()) continue;
                MultiIndex target(dim);
                for (int i = 0; i < dim; ++i) target[i] = alpha[i] - gamma[i] + beta[i];
                out.add_terms(target, poly_mul(P, dQ), Scalar(w));
            }
        }
    }
    return out;
}

DiffOperator op_commutator(const DiffOperator& a, const DiffOperator& b) {
    return op_sub(op_compose(a, b), op_compose(b, a));
}

bool op_equal(const DiffOperator& a, const DiffOperator& b, double tol) {
    if (!(a.coords() == b.coords())) return false;
    if (a.is_exact() && b.is_exact()) return a.terms() == b.terms();
    return op_sub(a, b).coefficient_norm() <= tol;
}

// ---------------------------------------------------------------------------
// Operator matrices

namespace {

void require_cone(const CoordinateSystem& cs) {
    if (cs.kind != ChartKind::Cone) throw DomainError("operator requires the cone chart");
}

}  // namespace

OpMatrix op_matrix_Y(const CoordinateSystem& cs) {
    require_cone(cs);
    OpMatrix M(cs.n, std::vector<DiffOperator>(cs.n, DiffOperator(cs)));
    for (int i = 0; i < cs.n; ++i)
        for (int j = 0; j < cs.n; ++j)
            M[i][j] = DiffOperator::multiplication(cs, poly_variable(cs.dim(), cs.y_index(i, j)));
    return M;
}

OpMatrix op_matrix_dY(const CoordinateSystem& cs) {
    require_cone(cs);
    OpMatrix M(cs.n, std::vector<DiffOperator>(cs.n, DiffOperator(cs)));
    for (int i = 0; i < cs.n; ++i)
        for (int j = 0; j < cs.n; ++j) {
            const DiffOperator d = DiffOperator::partial(cs, cs.y_index(i, j));
            M[i][j] = i == j ? d : op_scale(Scalar::ratio(1, 2), d);
        }
    return M;
}

OpMatrix op_matrix_dV(const CoordinateSystem& cs) {
    require_cone(cs);
    OpMatrix M(cs.m, std::vector<DiffOperator>(cs.n, DiffOperator(cs)));
    for (int a = 0; a < cs.m; ++a)
        for (int b = 0; b < cs.n; ++b) M[a][b] = DiffOperator::partial(cs, cs.v_index(a, b));
    return M;
}

OpMatrix op_matmul(const OpMatrix& a, const OpMatrix& b) {
    if (a.empty() || b.empty()) throw DimensionMismatch("empty operator matrix");
    const std::size_t rows = a.size(), inner = b.size(), cols = b[0].size();
    if (a[0].size() != inner) throw DimensionMismatch("operator matrix product");
    const CoordinateSystem cs = a[0][0].coords();
    OpMatrix out(rows, std::vector<DiffOperator>(cols, DiffOperator(cs)));
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            for (std::size_t k = 0; k < inner; ++k) {
                if (a[i][k].is_zero() || b[k][j].is_zero()) continue;
                out[i][j] = op_add(out[i][j], op_compose(a[i][k], b[k][j]));
            }
    return out;
}

OpMatrix op_transpose(const OpMatrix& a) {
    OpMatrix out(a[0].size(), std::vector<DiffOperator>(a.size(), a[0][0]));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a[0].size(); ++j) out[j][i] = a[i][j];
    return out;
}

DiffOperator op_trace(const OpMatrix& a) {
    DiffOperator out(a[0][0].coords());
    for (std::size_t i = 0; i < a.size(); ++i) out = op_add(out, a[i][i]);
    return out;
}

namespace {

OpMatrix scale_matrix(const Scalar& s, OpMatrix m) {
    for (auto& row : m)
        for (auto& e : row) e = op_scale(s, e);
    return m;
}

DiffOperator trace_of_power(const OpMatrix& base, int j) {
    OpMatrix p = base;
    for (int k = 1; k < j; ++k) p = op_matmul(p, base);
    return op_trace(p);
}

// 2·Y·∂/∂Y
OpMatrix twice_euler(const CoordinateSystem& cs) {
    return scale_matrix(Scalar(2), op_matmul(op_matrix_Y(cs), op_matrix_dY(cs)));
}

}  // namespace

namespace {

// Tr((Y ∂/∂Y)^j) without the 1 <= j <= n restriction, so the Laplacians exist at n = 1.
DiffOperator euler_trace(int j, const CoordinateSystem& cs) {
    require_cone(cs);
    return trace_of_power(op_matmul(op_matrix_Y(cs), op_matrix_dY(cs)), j);
}

}  // namespace

DiffOperator op_delta(int j, const CoordinateSystem& cs) {
    if (j < 1 || j > cs.n) throw IndexOutOfRange("delta_j needs 1 <= j <= n");
    return euler_trace(j, cs);
}

DiffOperator op_delta(int j, int n) { return op_delta(j, CoordinateSystem::cone(n)); }

DiffOperator op_D(int j, int n, int m) {
    if (j < 1 || j > n) throw IndexOutOfRange("D_j needs 1 <= j <= n");
    return trace_of_power(twice_euler(CoordinateSystem::cone(n, m)), j);
}

DiffOperator op_Omega(int k, int p, int q, int n, int m) {
    if (k < 0 || k > n - 1) throw IndexOutOfRange("Omega^(k) needs 0 <= k <= n-1");
    if (p < 1 || q < p || q > m) throw IndexOutOfRange("Omega_pq needs 1 <= p <= q <= m");
    const CoordinateSystem cs = CoordinateSystem::cone(n, m);
    const OpMatrix dV = op_matrix_dV(cs);
    OpMatrix acc = dV;
    if (k > 0) {
        const OpMatrix F = twice_euler(cs);
        for (int i = 0; i < k; ++i) acc = op_matmul(acc, F);
    }
    acc = op_matmul(acc, op_matrix_Y(cs));
    acc = op_matmul(acc, op_transpose(dV));
    return acc[p - 1][q - 1];
}

DiffOperator op_L(int p, int n, int m) {
    if (p < 1 || p > m) throw IndexOutOfRange("L_p needs 1 <= p <= m");
    const CoordinateSystem cs = CoordinateSystem::cone(n, m);
    const OpMatrix dV = op_matrix_dV(cs);
    const OpMatrix G = op_matmul(op_matmul(op_matrix_Y(cs), op_transpose(dV)), dV);
    return trace_of_power(G, p);
}

DiffOperator op_laplace_cone(const Scalar& c, int n) {
    if (!(c.to_double() > 0.0)) throw DomainError("Laplacian constant must be positive");
    return op_scale(c.inverse(), euler_trace(2, CoordinateSystem::cone(n)));
}

DiffOperator op_laplace_pnm(const Scalar& A, const Scalar& B, int n, int m, LaplaceSum sum) {
    if (!(A.to_double() > 0.0) || !(B.to_double() > 0.0)) throw DomainError("Laplacian constants must be positive");
    if (m < 1) throw IndexOutOfRange("P_{n,m} Laplacian needs m >= 1");
    const CoordinateSystem cs = CoordinateSystem::cone(n, m);
    const Scalar invA = A.inverse();
    DiffOperator out = op_scale(invA, euler_trace(2, cs));
    out = op_sub(out, op_scale(Scalar(m) * Scalar::ratio(1, 2) * invA, euler_trace(1, cs)));
    DiffOperator omegas(cs);
    for (int p = 1; p <= m; ++p)
        for (int k = 1; k <= p; ++k) {
            if (sum == LaplaceSum::Diagonal && k != p) continue;
            omegas = op_add(omegas, op_Omega(0, k, p, n, m));
        }
    return op_add(out, op_scale(B.inverse(), omegas));
}

SlLaplaceVariant parse_sl_variant(const std::string& name) {
    if (name == "as_printed") return SlLaplaceVariant::AsPrinted;
    if (name == "v_scaled") return SlLaplaceVariant::VScaled;
    if (name == "laplace_beltrami") return SlLaplaceVariant::LaplaceBeltrami;
    throw DomainError("unknown Laplacian variant '" + name + "'");
}

std::string to_string(SlLaplaceVariant v) {
    switch (v) {
        case SlLaplaceVariant::AsPrinted: return "as_printed";
        case SlLaplaceVariant::VScaled: return "v_scaled";
        case SlLaplaceVariant::LaplaceBeltrami: return "laplace_beltrami";
    }
    return "";
}

namespace {

using PolyMatrix = std::vector<std::vector<Polynomial>>;

// Entries of the unit-determinant matrix of size k whose chart starts at
// coordinate `offset`, as polynomials in the chart coordinates.
PolyMatrix symbolic_sl_Y(int dim, int offset, int k) {
    if (k == 1) return {{poly_constant(dim, Scalar(1))}};
    const PolyMatrix W = symbolic_sl_Y(dim, offset + k, k - 1);
    const Polynomial inv_v = poly_variable(dim, offset, Rational(-1));
    const Polynomial w_scale = poly_variable(dim, offset, Rational(1, k - 1));
    PolyMatrix Y(k, std::vector<Polynomial>(k));
    Y[0][0] = inv_v;
    for (int j = 1; j < k; ++j) {
        Y[0][j] = poly_mul(poly_variable(dim, offset + j), inv_v);
        Y[j][0] = Y[0][j];
    }
    for (int i = 1; i < k; ++i)
        for (int j = 1; j < k; ++j) {
            Polynomial e = poly_mul(poly_mul(poly_variable(dim, offset + i), poly_variable(dim, offset + j)), inv_v);
            poly_add_into(e, poly_mul(w_scale, W[i - 1][j - 1]));
            Y[i][j] = e;
        }
    return Y;
}

void add_sl_laplacian(DiffOperator& out, int offset, int k, SlLaplaceVariant variant) {
    if (k < 2) return;
    const int dim = out.dim();
    MultiIndex a(dim, 0);
    ExpVec e(dim, Rational(0));

    // (k-1)/k · v² ∂²/∂v²
    a[offset] = 2;
    e[offset] = 2;
    out.add_term(a, e, Scalar::ratio(k - 1, k));

    // First-order v-term.
    a[offset] = 1;
    switch (variant) {
        case SlLaplaceVariant::AsPrinted:
            e[offset] = 0;
            out.add_term(a, e, Scalar::ratio(-1, k));
            break;
        case SlLaplaceVariant::VScaled:
            e[offset] = 1;
            out.add_term(a, e, Scalar::ratio(-1, k));
            break;
        case SlLaplaceVariant::LaplaceBeltrami:
            // (k-1)/k · (1 - k/2) · v ∂/∂v
            e[offset] = 1;
            out.add_term(a, e, Scalar::ratio(k - 1, k) * Scalar::ratio(2 - k, 2));
            break;
    }
    a[offset] = 0;
    e[offset] = 0;

    // c · v^{k/(k-1)} · W[∂/∂x]
    const Scalar cx = variant == SlLaplaceVariant::LaplaceBeltrami ? Scalar::ratio(1, 2) : Scalar(1);
    const PolyMatrix W = symbolic_sl_Y(dim, offset + k, k - 1);
    const Polynomial vpow = poly_variable(dim, offset, Rational(k, k - 1));
    for (int i = 1; i < k; ++i)
        for (int j = 1; j < k; ++j) {
            MultiIndex ax(dim, 0);
            ax[offset + i] += 1;
            ax[offset + j] += 1;
            out.add_terms(ax, poly_mul(vpow, W[i - 1][j - 1]), cx);
        }

    add_sl_laplacian(out, offset + k, k - 1, variant);
}

}  // namespace

DiffOperator op_laplace_sl_iwasawa(int n, SlLaplaceVariant variant) {
    if (n < 2) throw DomainError("SL Laplacian needs n >= 2");
    DiffOperator out(CoordinateSystem::sl_iwasawa(n));
    add_sl_laplacian(out, 0, n, variant);
    return out;
}

IndexMatrix::IndexMatrix(const IntMatrix& twice_M) : twice_(twice_M) {
    if (twice_.rows() != twice_.cols() || twice_.rows() < 1) throw DimensionMismatch("index matrix must be square");
    for (int i = 0; i < twice_.rows(); ++i) {
        if (twice_(i, i) % 2 != 0) throw DomainError("index matrix diagonal must be integral");
        for (int j = 0; j < twice_.cols(); ++j)
            if (twice_(i, j) != twice_(j, i)) throw NotSymmetric("index matrix");
    }
    const Vector minors = leading_minors(dense());
    for (int i = 0; i < minors.size(); ++i)
        if (!(minors(i) > 0.0)) throw NotPositiveDefinite("index matrix");
}

namespace {

// Exact inverse of a rational matrix by Gauss-Jordan elimination.
std::vector<std::vector<Rational>> rational_inverse(std::vector<std::vector<Rational>> a) {
    const std::size_t n = a.size();
    std::vector<std::vector<Rational>> inv(n, std::vector<Rational>(n, Rational(0)));
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        while (piv < n && sgn(a[piv][k]) == 0) ++piv;
        if (piv == n) throw Singular("index matrix");
        std::swap(a[k], a[piv]);
        std::swap(inv[k], inv[piv]);
        const Rational p = a[k][k];
        for (std::size_t j = 0; j < n; ++j) {
            a[k][j] /= p;
            inv[k][j] /= p;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (i == k || sgn(a[i][k]) == 0) continue;
            const Rational f = a[i][k];
            for (std::size_t j = 0; j < n; ++j) {
                a[i][j] -= f * a[k][j];
                inv[i][j] -= f * inv[k][j];
            }
        }
    }
    return inv;
}

// Leibniz expansion over permutations; entries are combined with `mul`.
template <class T, class Mul, class Add>
T leibniz_det(const std::vector<std::vector<T>>& m, const T& zero, Mul mul, Add add, const T& one) {
    const int n = static_cast<int>(m.size());
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    T total = zero;
    do {
        int inversions = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (perm[i] > perm[j]) ++inversions;
        T prod = one;
        for (int i = 0; i < n; ++i) prod = mul(prod, m[i][perm[i]]);
        total = add(total, prod, inversions % 2 == 0 ? 1 : -1);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return total;
}

}  // namespace

DiffOperator op_M(const IndexMatrix& index, int n, int max_order) {
    if (n < 1) throw DomainError("op_M needs n >= 1");
    if (2 * n > max_order)
        throw JetOrderInsufficient("op_M has order " + std::to_string(2 * n) + " above the configured jet order " +
                                   std::to_string(max_order));
    const int m = index.m();
    const CoordinateSystem cs = CoordinateSystem::cone(n, m);
    std::vector<std::vector<Rational>> M(m, std::vector<Rational>(m));
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) M[a][b] = Rational(static_cast<long>(index.twice()(a, b)), 2L);
    const auto Minv = rational_inverse(M);
    const Scalar c = Scalar::from_double(1.0 / (8.0 * std::numbers::pi));

    const OpMatrix dY = op_matrix_dY(cs);
    const OpMatrix dV = op_matrix_dV(cs);
    OpMatrix entries(n, std::vector<DiffOperator>(n, DiffOperator(cs)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            DiffOperator e = dY[i][j];
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b) {
                    if (sgn(Minv[a][b]) == 0) continue;
                    e = op_add(e, op_scale(c * Scalar(Minv[a][b]), op_compose(dV[a][i], dV[b][j])));
                }
            entries[i][j] = e;
        }
    const DiffOperator det_op = leibniz_det<DiffOperator>(
        entries, DiffOperator(cs), [](const DiffOperator& x, const DiffOperator& y) { return op_compose(x, y); },
        [](const DiffOperator& acc, const DiffOperator& t, int sign) { return op_add(acc, op_scale(Scalar(sign), t)); },
        DiffOperator::identity(cs));

    std::vector<std::vector<Polynomial>> Y(n, std::vector<Polynomial>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) Y[i][j] = poly_variable(cs.dim(), cs.y_index(i, j));
    const Polynomial detY = leibniz_det<Polynomial>(
        Y, Polynomial{}, [](const Polynomial& x, const Polynomial& y) { return poly_mul(x, y); },
        [](Polynomial acc, const Polynomial& t, int sign) {
            poly_add_into(acc, t, Scalar(sign));
            return acc;
        },
        poly_constant(cs.dim(), Scalar(1)));

    return op_compose(DiffOperator::multiplication(cs, detY), det_op);
}

// ---------------------------------------------------------------------------
// Scalar fields

ScalarField::ScalarField(CoordinateSystem cs, ValueFn value, JetFn jet)
    : cs_(cs), value_(std::move(value)), jet_(std::move(jet)) {}

cplx ScalarField::value(std::span<const double> point) const {
    const std::vector<cplx> c(point.begin(), point.end());
    const auto mp = coords_to_matrices<cplx>(cs_, c);
    return value_(mp.Y, mp.V);
}

cplx ScalarField::value_at(const Matrix& Y, const Matrix& V) const {
    return value_(lift(Y, cplx{}), lift(V, cplx{}));
}

Jet ScalarField::native_jet(std::span<const double> point, int order) const {
    if (!jet_) throw DomainError("field has no native jet evaluator");
    const auto shape = JetShape::get(cs_.dim(), order);
    std::vector<Jet> vars;
    vars.reserve(point.size());
    for (std::size_t i = 0; i < point.size(); ++i) vars.push_back(Jet::variable(shape, static_cast<int>(i), point[i]));
    const auto mp = coords_to_matrices<Jet>(cs_, vars);
    Jet out = jet_(mp.Y, mp.V);
    if (out.shape() != shape) out = Jet(shape, out.value());
    return out;
}

namespace {

template <class T>
std::pair<GMatrix<T>, GMatrix<T>> act_generic(const Matrix& A, const Matrix& a, const GMatrix<T>& Y,
                                              const GMatrix<T>& V) {
    const GMatrix<T> Ag = lift(A, Y.zero());
    const GMatrix<T> At = lift(Matrix(A.transpose()), Y.zero());
    GMatrix<T> Vn = V;
    if (V.rows() > 0) Vn = (V + lift(a, Y.zero())) * At;
    return {Ag * Y * At, Vn};
}

}  // namespace

ScalarField ScalarField::composed_with(const Matrix& A, const Matrix& a) const {
    if (A.rows() != cs_.n || a.rows() != cs_.m || (cs_.m > 0 && a.cols() != cs_.n))
        throw DimensionMismatch("group element does not match the field's space");
    ValueFn v = [f = value_, A, a](const GMatrix<cplx>& Y, const GMatrix<cplx>& V) {
        const auto [Y2, V2] = act_generic(A, a, Y, V);
        return f(Y2, V2);
    };
    JetFn j;
    if (jet_) {
        j = [f = jet_, A, a](const GMatrix<Jet>& Y, const GMatrix<Jet>& V) {
            const auto [Y2, V2] = act_generic(A, a, Y, V);
            return f(Y2, V2);
        };
    }
    return ScalarField(cs_, std::move(v), std::move(j));
}

ScalarField ScalarField::operator+(const ScalarField& o) const {
    if (!(cs_ == o.cs_)) throw DomainError("fields on different coordinate systems");
    ValueFn v = [f = value_, g = o.value_](const GMatrix<cplx>& Y, const GMatrix<cplx>& V) { return f(Y, V) + g(Y, V); };
    JetFn j;
    if (jet_ && o.jet_)
        j = [f = jet_, g = o.jet_](const GMatrix<Jet>& Y, const GMatrix<Jet>& V) { return f(Y, V) + g(Y, V); };
    return ScalarField(cs_, std::move(v), std::move(j));
}

ScalarField ScalarField::scaled(cplx s) const {
    ValueFn v = [f = value_, s](const GMatrix<cplx>& Y, const GMatrix<cplx>& V) { return s * f(Y, V); };
    JetFn j;
    if (jet_) j = [f = jet_, s](const GMatrix<Jet>& Y, const GMatrix<Jet>& V) { return f(Y, V) * s; };
    return ScalarField(cs_, std::move(v), std::move(j));
}

namespace {

double factorial(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

double multi_factorial(const MultiIndex& a) {
    double f = 1.0;
    for (int k : a) f *= factorial(k);
    return f;
}

// Tensor-product central difference for ∂^α f at the point with per-axis steps h.
cplx central_difference(const ScalarField& f, std::span<const double> point, const MultiIndex& alpha,
                        const std::vector<double>& h) {
    std::vector<int> axes;
    for (std::size_t i = 0; i < alpha.size(); ++i)
        if (alpha[i] > 0) axes.push_back(static_cast<int>(i));
    std::vector<double> p(point.begin(), point.end());
    std::vector<int> j(axes.size(), 0);
    cplx sum = 0.0;
    while (true) {
        double w = 1.0;
        for (std::size_t t = 0; t < axes.size(); ++t) {
            const int ax = axes[t], a = alpha[ax], jj = j[t];
            double binom = 1.0;
            for (int r = 0; r < jj; ++r) binom = binom * (a - r) / (r + 1);
            w *= (jj % 2 == 0 ? 1.0 : -1.0) * binom;
            p[ax] = point[ax] + (0.5 * a - jj) * h[ax];
        }
        sum += w * f.value(p);
        std::size_t t = 0;
        for (; t < axes.size(); ++t) {
            if (++j[t] <= alpha[axes[t]]) break;
            j[t] = 0;
        }
        if (t == axes.size()) break;
    }
    double denom = 1.0;
    for (int ax : axes) denom *= std::pow(h[ax], alpha[ax]);
    return sum / denom;
}

}  // namespace

constexpr int kFdLevels = 8;

Jet jet_of(const ScalarField& f, std::span<const double> point, int order, const ApplyConfig& cfg) {
    if (static_cast<int>(point.size()) != f.coords().dim()) throw DimensionMismatch("point length");
    if (order > cfg.max_jet_order)
        throw JetOrderInsufficient("requested order " + std::to_string(order) + " exceeds the configured jet order " +
                                   std::to_string(cfg.max_jet_order));
    if (f.has_native_jet() && !cfg.force_finite_differences) return f.native_jet(point, order);

    const auto shape = JetShape::get(static_cast<int>(point.size()), order);
    Jet out(shape, 0.0);
    auto& c = out.coefficients();
    const double eps = std::numeric_limits<double>::epsilon();
    for (std::size_t idx = 0; idx < shape->size(); ++idx) {
        const MultiIndex& alpha = shape->monomial(idx);
        const int deg = shape->degree(idx);
        if (deg == 0) {
            c[idx] = f.value(point);
            continue;
        }
        std::vector<double> h(point.size());
        for (std::size_t i = 0; i < point.size(); ++i)
            h[i] = cfg.fd_step_scale * std::pow(eps, 1.0 / (deg + 4)) * std::max(1.0, std::abs(point[i]));
        // Halve the step until consecutive Richardson values stop improving, since
        // the usable step depends on the distance to the chart boundary.
        cplx prev_diff = central_difference(f, point, alpha, h);
        cplx prev_rich;
        cplx best;
        double best_gap = std::numeric_limits<double>::infinity();
        for (int level = 0; level < kFdLevels; ++level) {
            for (auto& x : h) x *= 0.5;
            const cplx diff = central_difference(f, point, alpha, h);
            const cplx rich = (4.0 * diff - prev_diff) / 3.0;
            if (level > 0) {
                const double gap = std::abs(rich - prev_rich);
                if (gap < best_gap) {
                    best_gap = gap;
                    best = rich;
                } else if (gap > 4.0 * best_gap) {
                    break;
                }
            }
            prev_diff = diff;
            prev_rich = rich;
        }
        c[idx] = best / multi_factorial(alpha);
    }
    return out;
}

cplx op_apply(const DiffOperator& d, const ScalarField& f, std::span<const double> point, const ApplyConfig& cfg) {
    if (!(d.coords() == f.coords())) throw DomainError("operator and field use different coordinate systems");
    const Jet jet = jet_of(f, point, d.order(), cfg);
    cplx sum = 0.0;
    for (const auto& [alpha, poly] : d.terms()) {
        const cplx coef = jet.coefficient(alpha);
        if (coef == cplx{}) continue;
        sum += poly_eval(poly, point) * multi_factorial(alpha) * coef;
    }
    return sum;
}


double invariance_residual(const DiffOperator& d, const Matrix& A, const Matrix& a, const ScalarField& f,
                           const std::vector<std::vector<double>>& points, const ApplyConfig& cfg) {
    if (d.coords().kind == ChartKind::SlIwasawa && std::abs(A.determinant() - 1.0) > 1e-9)
        throw DomainError("unit-determinant chart requires an SL group element");
    const ScalarField fg = f.composed_with(A, a);
    double worst = 0.0;
    for (const auto& p : points) {
        const std::vector<double> gp = act_on_chart(d.coords(), A, a, p);
        const cplx lhs = op_apply(d, fg, p, cfg);
        const cplx rhs = op_apply(d, f, gp, cfg);
        const double scale = std::max({std::abs(rhs), std::abs(f.value(gp)), 1e-300});
        worst = std::max(worst, std::abs(lhs - rhs) / scale);
    }
    return worst;
}

CharacterValue eigenvalue_extract(const DiffOperator& d, const ScalarField& f,
                                  const std::vector<std::vector<double>>& points, const ApplyConfig& cfg) {
    CharacterValue out;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const cplx fv = f.value(points[i]);
        if (std::abs(fv) < 1e-200) {
            out.skipped_points.push_back(i);
            continue;
        }
        out.ratios.push_back(op_apply(d, f, points[i], cfg) / fv);
    }
    if (out.ratios.empty()) throw DomainError("field vanishes at every probe point");
    cplx mean = 0.0;
    for (const auto& r : out.ratios) mean += r;
    mean /= static_cast<double>(out.ratios.size());
    out.value = mean;
    const double scale = std::max(1.0, std::abs(mean));
    for (const auto& r : out.ratios) out.constancy_residual = std::max(out.constancy_residual, std::abs(r - mean) / scale);
    return out;
}

std::vector<double> commutes_with_all(const DiffOperator& d, const std::vector<DiffOperator>& generators) {
    std::vector<double> out;
    out.reserve(generators.size());
    for (const auto& g : generators) out.push_back(op_commutator(d, g).coefficient_norm());
    return out;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

nlohmann::json rational_json(const Rational& r) {
    if (r.get_den() == 1 && r.get_num().fits_slong_p()) return r.get_num().get_si();
    return r.get_str();
}

Rational rational_from_json(const nlohmann::json& j) {
    if (j.is_number_integer()) return Rational(static_cast<long>(j.get<long long>()));
    if (j.is_string()) {
        Rational r(j.get<std::string>());
        r.canonicalize();
        return r;
    }
    throw DomainError("exponent must be an integer or a rational string");
}

}  // namespace

nlohmann::json to_json(const DiffOperator& d) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [alpha, poly] : d.terms()) {
        nlohmann::json coeff = nlohmann::json::array();
        for (const auto& [e, c] : poly) {
            nlohmann::json exps = nlohmann::json::array();
            for (const auto& x : e) exps.push_back(rational_json(x));
            const nlohmann::json scalar =
                c.is_exact() ? nlohmann::json(c.rational().get_str()) : nlohmann::json(c.to_double());
            coeff.push_back({{"scalar", scalar}, {"exps", exps}});
        }
        terms.push_back({{"coeff", coeff}, {"partial", alpha}});
    }
    const auto& cs = d.coords();
    return {{"coords",
             {{"chart", cs.kind == ChartKind::Cone ? "cone" : "sl_iwasawa"}, {"n", cs.n}, {"m", cs.m},
              {"names", cs.names()}}},
            {"terms", terms}};
}

DiffOperator operator_from_json(const nlohmann::json& j) {
    const auto& c = j.at("coords");
    const std::string chart = c.at("chart").get<std::string>();
    CoordinateSystem cs = chart == "cone" ? CoordinateSystem::cone(c.at("n").get<int>(), c.at("m").get<int>())
                                          : CoordinateSystem::sl_iwasawa(c.at("n").get<int>(), c.at("m").get<int>());
    DiffOperator d(cs);
    for (const auto& t : j.at("terms")) {
        const MultiIndex alpha = t.at("partial").get<MultiIndex>();
        for (const auto& mono : t.at("coeff")) {
            ExpVec e;
            for (const auto& x : mono.at("exps")) e.push_back(rational_from_json(x));
            const auto& s = mono.at("scalar");
            const Scalar sc = s.is_string() ? Scalar(rational_from_json(s)) : Scalar::from_double(s.get<double>());
            d.add_term(alpha, e, sc);
        }
    }
    return d;
}

std::string pretty(const DiffOperator& d) {
    const auto names = d.coords().names();
    std::ostringstream os;
    bool first_term = true;
    for (const auto& [alpha, poly] : d.terms()) {
        if (!first_term) os << " + ";
        first_term = false;
        os << "(";
        bool first = true;
        for (const auto& [e, c] : poly) {
            if (!first) os << " + ";
            first = false;
            os << c.to_string();
            for (std::size_t i = 0; i < e.size(); ++i) {
                if (sgn(e[i]) == 0) continue;
                os << "*" << names[i];
                if (e[i] != 1) os << "^" << (e[i].get_den() == 1 ? e[i].get_str() : "(" + e[i].get_str() + ")");
            }
        }
        os << ")";
        for (std::size_t i = 0; i < alpha.size(); ++i)
            for (int k = 0; k < alpha[i]; ++k) os << "*d/d" << names[i];
    }
    if (first_term) os << "0";
    return os.str();
}

}  // namespace pnm
