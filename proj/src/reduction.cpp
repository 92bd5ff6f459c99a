#include "pnm/reduction.hpp"

#include "pnm/errors.hpp"
#include "pnm/geometry.hpp"

#include <cmath>
#include <functional>
#include <numeric>

namespace pnm {

namespace {

constexpr double kStrictTol = 1e-12;
constexpr double kContactTol = 1e-9;

long long gcd_tail(const std::vector<long long>& a, int from) {
    long long g = 0;
    for (std::size_t i = from; i < a.size(); ++i) g = std::gcd(g, a[i]);
    return g;
}

double quad_form(const Matrix& Y, const std::vector<long long>& a) {
    double s = 0.0;
    const int n = static_cast<int>(a.size());
    for (int i = 0; i < n; ++i) {
        if (a[i] == 0) continue;
        double row = 0.0;
        for (int j = 0; j < n; ++j) row += Y(i, j) * static_cast<double>(a[j]);
        s += static_cast<double>(a[i]) * row;
    }
    return s;
}

// Visits every nonzero a ∈ [−bound, bound]^n whose first nonzero entry is
// positive, in lexicographic order. Stops when `visit` returns false.
void for_each_half_vector(int n, int bound, const std::function<bool(const std::vector<long long>&)>& visit) {
    std::vector<long long> a(n, -bound);
    while (true) {
        int first = 0;
        while (first < n && a[first] == 0) ++first;
        if (first < n && a[first] > 0 && !visit(a)) return;
        int i = n - 1;
        while (i >= 0 && a[i] == bound) {
            a[i] = -bound;
            --i;
        }
        if (i < 0) return;
        ++a[i];
    }
}

IntMatrix matmul(const IntMatrix& a, const IntMatrix& b) { return a * b; }

Matrix to_real(const IntMatrix& m) { return m.cast<double>(); }

Matrix congruence(const IntMatrix& gamma, const Matrix& Y) {
    const Matrix g = to_real(gamma);
    const Matrix out = g * Y * g.transpose();
    return 0.5 * (out + out.transpose());
}

void require_square_spd(const Matrix& Y) {
    if (Y.rows() != Y.cols() || Y.rows() < 1) throw DimensionMismatch("Y must be square");
    (void)SpdPoint(Y);
}

// Gram-matrix LLL (δ = 0.99) acting on the columns of B, G = ᵗB Y B.
void lll(Matrix& G, IntMatrix& B) {
    const int n = static_cast<int>(G.rows());
    const double delta = 0.99;
    int k = 1;
    int guard = 0;
    while (k < n && ++guard < 100000) {
        for (int j = k - 1; j >= 0; --j) {
            const Matrix R = cholesky_upper(G);
            const double mu = R(j, k) / R(j, j);
            const long long q = std::llround(mu);
            if (q == 0) continue;
            IntMatrix U = IntMatrix::Identity(n, n);
            U(j, k) = -q;
            B = matmul(B, U);
            const Matrix Ur = to_real(U);
            G = Ur.transpose() * G * Ur;
            G = Matrix(0.5 * (G + G.transpose()));
        }
        const Matrix R = cholesky_upper(G);
        const double mu = R(k - 1, k) / R(k - 1, k - 1);
        const double lhs = R(k, k) * R(k, k) + mu * mu * R(k - 1, k - 1) * R(k - 1, k - 1);
        if (lhs < delta * R(k - 1, k - 1) * R(k - 1, k - 1)) {
            B.col(k).swap(B.col(k - 1));
            G.col(k).swap(G.col(k - 1));
            G.row(k).swap(G.row(k - 1));
            k = std::max(k - 1, 1);
        } else {
            ++k;
        }
    }
}

}  // namespace

IntMatrix unimodular_completion(const std::vector<long long>& w_in) {
    const int r = static_cast<int>(w_in.size());
    std::vector<long long> w = w_in;
    IntMatrix U = IntMatrix::Identity(r, r);
    // Row operations M with M·w → e₁; U accumulates M⁻¹ so that U·e₁ = w.
    for (int i = r - 1; i >= 1; --i) {
        const long long x = w[i - 1], y = w[i];
        if (y == 0) continue;
        // Extended Euclid: p·x + q·y = g.
        long long old_r = x, rr = y, old_s = 1, s = 0, old_t = 0, t = 1;
        while (rr != 0) {
            const long long qt = old_r / rr;
            std::tie(old_r, rr) = std::make_pair(rr, old_r - qt * rr);
            std::tie(old_s, s) = std::make_pair(s, old_s - qt * s);
            std::tie(old_t, t) = std::make_pair(t, old_t - qt * t);
        }
        long long g = old_r, p = old_s, q = old_t;
        if (g < 0) {
            g = -g;
            p = -p;
            q = -q;
        }
        // M = [[p, q], [−y/g, x/g]] has det 1; M⁻¹ = [[x/g, −q], [y/g, p]].
        const long long a11 = x / g, a12 = -q, a21 = y / g, a22 = p;
        const IntMatrix colA = U.col(i - 1), colB = U.col(i);
        U.col(i - 1) = colA * a11 + colB * a21;
        U.col(i) = colA * a12 + colB * a22;
        w[i - 1] = g;
        w[i] = 0;
    }
    if (w[0] == -1) U.col(0) = -U.col(0);
    if (std::abs(w[0]) != 1) throw DomainError("unimodular completion needs a primitive vector");
    return U;
}

ReductionCheck is_minkowski_reduced(const Matrix& Y, int bound) {
    require_square_spd(Y);
    if (bound < 1) throw DomainError("bound must be >= 1");
    const int n = static_cast<int>(Y.rows());
    ReductionCheck out;
    for (int k = n; k >= 1 && out.reduced; --k) {
        const double ykk = Y(k - 1, k - 1);
        for_each_half_vector(n, bound, [&](const std::vector<long long>& a) {
            if (gcd_tail(a, k - 1) != 1) return true;
            const double q = quad_form(Y, a);
            bool is_unit = a[k - 1] == 1;
            for (int i = 0; i < n && is_unit; ++i)
                if (i != k - 1 && a[i] != 0) is_unit = false;
            if (q < ykk - kStrictTol * ykk) {
                out = {false, "M.1", k, a, q, ykk, false};
                return false;
            }
            if (!is_unit && std::abs(q - ykk) <= kContactTol * ykk) out.boundary_contact = true;
            return true;
        });
    }
    if (!out.reduced) return out;
    for (int k = 1; k < n; ++k) {
        const double v = Y(k - 1, k);
        const double scale = std::sqrt(Y(k - 1, k - 1) * Y(k, k));
        if (v < -kStrictTol * scale) return {false, "M.2", k, {}, v, 0.0, out.boundary_contact};
        if (std::abs(v) <= kContactTol * scale) out.boundary_contact = true;
    }
    return out;
}

ReductionResult minkowski_reduce(const Matrix& Y, int bound, int max_steps) {
    require_square_spd(Y);
    const int n = static_cast<int>(Y.rows());
    IntMatrix B = IntMatrix::Identity(n, n);
    Matrix G = Y;
    lll(G, B);

    bool converged = false;
    for (int step = 0; step < max_steps; ++step) {
        bool changed = false;
        for (int k = 1; k <= n && !changed; ++k) {
            const double gkk = G(k - 1, k - 1);
            std::vector<long long> best;
            double best_q = gkk - kStrictTol * gkk;
            for_each_half_vector(n, bound, [&](const std::vector<long long>& a) {
                if (gcd_tail(a, k - 1) != 1) return true;
                const double q = quad_form(G, a);
                if (q < best_q) {
                    best_q = q;
                    best = a;
                }
                return true;
            });
            if (best.empty()) continue;
            const std::vector<long long> tail(best.begin() + (k - 1), best.end());
            const IntMatrix Ut = unimodular_completion(tail);
            IntMatrix U = IntMatrix::Identity(n, n);
            U.block(k - 1, k - 1, n - k + 1, n - k + 1) = Ut;
            for (int i = 0; i < k - 1; ++i) U(i, k - 1) = best[i];
            B = matmul(B, U);
            const Matrix Ur = to_real(U);
            G = Ur.transpose() * G * Ur;
            G = Matrix(0.5 * (G + G.transpose()));
            changed = true;
        }
        if (!changed) {
            converged = true;
            break;
        }
    }
    for (int k = 1; k < n; ++k) {
        if (G(k - 1, k) < 0.0) {
            B.col(k) = -B.col(k);
            G.col(k) = -G.col(k);
            G.row(k) = -G.row(k);
        }
    }

    ReductionResult out{congruence(B.transpose(), Y), Matrix(0, n),
                        GlIntegralElement(IntMatrix(B.transpose()), IntMatrix(0, n)), false, bound, false, ""};
    const ReductionCheck chk = is_minkowski_reduced(out.Y, bound);
    out.certified = converged && chk.reduced;
    out.boundary_contact = chk.boundary_contact;
    if (!converged) out.note = "search budget exhausted";
    else if (!chk.reduced) out.note = "final check failed at " + chk.condition;
    return out;
}

ReductionCheck is_in_grenier_domain(const Matrix& Y, int bound) {
    require_square_spd(Y);
    const int n = static_cast<int>(Y.rows());
    ReductionCheck out;
    if (n == 1) return out;
    const PartialIwasawaCoords c = partial_iwasawa(UnitDetSpdPoint(Y));
    const double vpow = std::pow(c.v, static_cast<double>(n) / (n - 1));

    // (F1): vector u = (a, c) with c ≠ 0, primitive.
    for_each_half_vector(n, bound, [&](const std::vector<long long>& u) {
        bool c_zero = true;
        for (int i = 1; i < n; ++i)
            if (u[i] != 0) c_zero = false;
        if (c_zero || gcd_tail(u, 0) != 1) return true;
        double lin = static_cast<double>(u[0]);
        for (int i = 1; i < n; ++i) lin += c.x(i - 1) * static_cast<double>(u[i]);
        double wc = 0.0;
        for (int i = 1; i < n; ++i)
            for (int j = 1; j < n; ++j) wc += c.W(i - 1, j - 1) * static_cast<double>(u[i] * u[j]);
        const double val = lin * lin + vpow * wc;
        if (val < 1.0 - kStrictTol) {
            out = {false, "F1", 1, u, val, 1.0, false};
            return false;
        }
        if (std::abs(val - 1.0) <= kContactTol) out.boundary_contact = true;
        return true;
    });
    if (!out.reduced) return out;

    // (F3)
    for (int j = 0; j < n - 1; ++j) {
        const double xj = c.x(j);
        const bool ok = j == 0 ? (xj >= -kStrictTol && xj <= 0.5 + kStrictTol) : std::abs(xj) <= 0.5 + kStrictTol;
        if (!ok) return {false, "F3", j + 1, {}, xj, 0.5, out.boundary_contact};
        if (std::abs(std::abs(xj) - 0.5) <= kContactTol || (j == 0 && std::abs(xj) <= kContactTol))
            out.boundary_contact = true;
    }

    // (F2)
    const ReductionCheck inner = is_in_grenier_domain(c.W, bound);
    if (!inner.reduced) {
        ReductionCheck r = inner;
        r.condition = "F2/" + inner.condition;
        return r;
    }
    out.boundary_contact = out.boundary_contact || inner.boundary_contact;
    return out;
}

namespace {

// Grenier reduction transform for a unit-determinant Y (γ with γ·Y·ᵗγ reduced).
IntMatrix grenier_transform(const Matrix& Y, int bound, bool& ok) {
    const int n = static_cast<int>(Y.rows());
    if (n == 1) return IntMatrix::Identity(1, 1);
    // Highest point: the first Minkowski vector minimizes Y[u] over primitive u.
    const ReductionResult mk = minkowski_reduce(Y, bound);
    ok = ok && mk.certified;
    IntMatrix gamma = mk.transform.A();
    Matrix Z = congruence(gamma, Y);

    // Recurse on W; diag(1, d) maps x ↦ d·x and W ↦ d·W·ᵗd.
    const PartialIwasawaCoords c = partial_iwasawa(UnitDetSpdPoint(Z));
    const IntMatrix d = grenier_transform(c.W, bound, ok);
    IntMatrix step = IntMatrix::Identity(n, n);
    step.block(1, 1, n - 1, n - 1) = d;
    gamma = matmul(step, gamma);
    Z = congruence(gamma, Y);

    // Translate x into [−½, ½]: [[1, 0], [b, I]] maps x ↦ x + b.
    Vector x = partial_iwasawa(UnitDetSpdPoint(Z)).x;
    IntMatrix tr = IntMatrix::Identity(n, n);
    for (int i = 1; i < n; ++i) tr(i, 0) = -std::llround(x(i - 1));
    gamma = matmul(tr, gamma);
    Z = congruence(gamma, Y);

    // Sign of e₁ so that x₁ ≥ 0.
    x = partial_iwasawa(UnitDetSpdPoint(Z)).x;
    if (x(0) < 0.0) {
        IntMatrix flip = IntMatrix::Identity(n, n);
        flip(0, 0) = -1;
        gamma = matmul(flip, gamma);
    }
    return gamma;
}

}  // namespace

ReductionResult grenier_reduce(const Matrix& Y, int bound) {
    const UnitDetSpdPoint check(Y);
    const int n = check.n();
    if (n < 2) throw DomainError("Grenier reduction needs n >= 2");
    bool ok = true;
    const IntMatrix gamma = grenier_transform(Y, bound, ok);
    ReductionResult out{congruence(gamma, Y), Matrix(0, n), GlIntegralElement(gamma, IntMatrix(0, n)), false, bound,
                        false, ""};
    const ReductionCheck chk = is_in_grenier_domain(out.Y, bound);
    out.certified = ok && chk.reduced;
    out.boundary_contact = chk.boundary_contact;
    if (!chk.reduced) out.note = "final check failed at " + chk.condition;
    else if (!ok) out.note = "inner Minkowski search not certified";
    return out;
}

bool siegel_set_contains(const Matrix& Y, double t) {
    if (!(t > 0.0)) throw DomainError("Siegel set parameter must be positive");
    const FullIwasawaCoords c = full_iwasawa(UnitDetSpdPoint(Y));
    const double floor_y = std::pow(t, -0.5);
    for (int i = 0; i < c.y.size(); ++i)
        if (c.y(i) < floor_y - kStrictTol) return false;
    const int n = static_cast<int>(c.X.rows());
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (std::abs(c.X(i, j)) > 0.5 + kStrictTol) return false;
    return true;
}

bool in_grenier_sharp(const Matrix& Y, int bound) {
    const int n = static_cast<int>(Y.rows());
    for (int mask = 0; mask < (1 << n); ++mask) {
        IntMatrix d = IntMatrix::Identity(n, n);
        for (int i = 0; i < n; ++i)
            if (mask & (1 << i)) d(i, i) = -1;
        if (is_in_grenier_domain(congruence(d, Y), bound).reduced) return true;
    }
    return false;
}

ReductionResult reduce_pnm(const Matrix& Y, const Matrix& V, int bound) {
    const int n = static_cast<int>(Y.rows());
    if (V.cols() != n) throw DimensionMismatch("V must have n columns");
    const int m = static_cast<int>(V.rows());
    ReductionResult mk = minkowski_reduce(Y, bound);
    const IntMatrix gamma = mk.transform.A();
    const Matrix gt = to_real(gamma).transpose();
    // Inverse of ᵗγ in exact integers: adj via the real inverse, rounded.
    const IntMatrix gt_inv = gt.inverse().array().round().cast<long long>().matrix();

    const Matrix W = V * gt;
    IntMatrix ap(m, n);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) ap(i, j) = -static_cast<long long>(std::floor(W(i, j) + 0.5));

    IntMatrix a;
    Matrix Vr;
    for (int attempt = 0; attempt < 8; ++attempt) {
        a = ap * gt_inv;
        const GlElement g(to_real(gamma), to_real(a));
        const PnmPoint p = glnm_act(g, PnmPoint(SpdPoint(Y), V));
        Vr = p.V();
        bool adjusted = false;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) {
                if (Vr(i, j) < -0.5) {
                    ++ap(i, j);
                    adjusted = true;
                } else if (Vr(i, j) >= 0.5) {
                    --ap(i, j);
                    adjusted = true;
                }
            }
        if (!adjusted) break;
    }
    mk.V = Vr;
    mk.Y = glnm_act(GlElement(to_real(gamma), to_real(a)), PnmPoint(SpdPoint(Y), V)).Y().dense();
    mk.transform = GlIntegralElement(gamma, a);
    return mk;
}

}  // namespace pnm
