#include "pnm/autforms.hpp"

#include "pnm/errors.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/sinh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <thread>

namespace pnm {

namespace {

constexpr double kPi = std::numbers::pi;

// Runs fn(chunk) for chunk = 0..chunks−1 on up to `workers` threads and returns
// the chunk results in chunk order.
template <class R, class Fn>
std::vector<R> run_chunks(int chunks, int workers, Fn fn) {
    std::vector<R> out(chunks);
    workers = std::max(1, std::min(workers, chunks));
    if (workers == 1) {
        for (int c = 0; c < chunks; ++c) out[c] = fn(c);
        return out;
    }
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            for (int c = w; c < chunks; c += workers) out[c] = fn(c);
        });
    for (auto& t : pool) t.join();
    return out;
}

bool first_nonzero_positive(std::span<const long long> a) {
    for (long long x : a)
        if (x != 0) return x > 0;
    return false;
}

long long gcd_all(std::span<const long long> a) {
    long long g = 0;
    for (long long x : a) g = std::gcd(g, x);
    return g;
}

cplx real_pow(double base, cplx e) { return std::exp(e * std::log(base)); }

void require_real_part_above_one(const ComplexVector& s) {
    for (const cplx& x : s)
        if (!(x.real() > 1.0)) throw DivergentParameters("Eisenstein series needs Re(s_j) > 1");
}

}  // namespace

// ---------------------------------------------------------------------------

cplx power_p(const ComplexVector& s, const Matrix& Y) {
    if (s.size() > static_cast<std::size_t>(Y.rows())) throw DimensionMismatch("too many exponents for p_s");
    const Vector minors = leading_minors(Y);
    cplx out = 1.0;
    for (std::size_t j = 0; j < s.size(); ++j) {
        if (!(minors(j) > 0.0)) throw NotPositiveDefinite("p_s needs positive leading minors");
        out *= real_pow(minors(j), s[j]);
    }
    return out;
}

ComplexVector tau_from_s(const ComplexVector& s) {
    ComplexVector r(s.size());
    cplx acc = 0.0;
    for (std::size_t j = s.size(); j-- > 0;) {
        acc += s[j];
        r[j] = 2.0 * acc;
    }
    return r;
}

cplx tau(const ComplexVector& r, const Matrix& t) {
    if (static_cast<int>(r.size()) != t.rows()) throw DimensionMismatch("tau exponent length");
    cplx out = 1.0;
    for (int j = 0; j < t.rows(); ++j) {
        if (t(j, j) == 0.0) throw Singular("tau needs a nonzero diagonal");
        out *= real_pow(std::abs(t(j, j)), r[j]);
    }
    return out;
}

cplx phi_z(const ComplexVector& z, const Matrix& Y) {
    const int n = static_cast<int>(Y.rows());
    if (static_cast<int>(z.size()) != n) throw DimensionMismatch("phi_z exponent length");
    const Matrix T = cholesky_upper(Y);
    cplx out = 1.0;
    for (int j = 1; j <= n; ++j) out *= real_pow(T(j - 1, j - 1), 2.0 * z[j - 1] + static_cast<double>(j) - 0.5 * (n + 1));
    return out;
}

MonteCarloValue spherical_h(const ComplexVector& s, const Matrix& Y, long sample_count, std::uint64_t seed,
                            int workers) {
    if (sample_count < 1) throw DomainError("sample_count must be >= 1");
    const int n = static_cast<int>(Y.rows());
    constexpr int kBlocks = 64;
    struct Partial {
        cplx sum = 0.0;
        double sum_sq = 0.0;
        long count = 0;
    };
    const auto parts = run_chunks<Partial>(kBlocks, workers, [&](int b) {
        Partial p;
        const long begin = sample_count * b / kBlocks, end = sample_count * (b + 1) / kBlocks;
        Rng rng(seed, static_cast<std::uint64_t>(b));
        for (long i = begin; i < end; ++i) {
            const Matrix k = random_orthogonal_haar(n, rng);
            const Matrix Yk = k.transpose() * Y * k;
            const cplx v = power_p(s, Matrix(0.5 * (Yk + Yk.transpose())));
            p.sum += v;
            p.sum_sq += std::norm(v);
            ++p.count;
        }
        return p;
    });
    Partial tot;
    for (const auto& p : parts) {
        tot.sum += p.sum;
        tot.sum_sq += p.sum_sq;
        tot.count += p.count;
    }
    const cplx mean = tot.sum / static_cast<double>(tot.count);
    const double var = tot.count > 1 ? std::max(0.0, (tot.sum_sq - tot.count * std::norm(mean)) / (tot.count - 1)) : 0.0;
    return {mean, std::sqrt(var / static_cast<double>(tot.count)), tot.count};
}

// ---------------------------------------------------------------------------

IntMatrix b_matrix(int n) {
    if (n < 2) throw DomainError("b_matrix needs n >= 2");
    IntMatrix b(n - 1, n - 1);
    for (int i = 1; i < n; ++i)
        for (int j = 1; j < n; ++j) b(i - 1, j - 1) = i + j <= n ? i * j : (n - i) * (n - j);
    return b;
}

cplx i_nu(const ComplexVector& nu, const GoldfeldPoint& z) {
    const int n = z.n();
    if (static_cast<int>(nu.size()) != n - 1) throw DimensionMismatch("nu must have length n-1");
    const IntMatrix b = b_matrix(n);
    cplx out = 1.0;
    for (int i = 0; i < n - 1; ++i)
        for (int j = 0; j < n - 1; ++j) out *= real_pow(z.y(i), static_cast<double>(b(i, j)) * nu[j]);
    return out;
}

cplx i_nu_tilde(const ComplexVector& nu, const GoldfeldPoint& z, const Matrix&) { return i_nu(nu, z); }

// ---------------------------------------------------------------------------

namespace {

struct ShellSums {
    cplx total = 0.0;
    cplx last_shell = 0.0;
    long terms = 0;
};

ShellSums eisenstein2(cplx s, const Matrix& Y, int H, int workers) {
    const double y00 = Y(0, 0), y01 = Y(0, 1), y11 = Y(1, 1);
    const int half = H / 2;
    // Chunk by c ∈ [0, H]; canonical representatives have c > 0, or c = 0 and d = 1.
    const int chunks = H + 1;
    const auto parts = run_chunks<ShellSums>(chunks, workers, [&](int c) {
        ShellSums p;
        for (int d = -H; d <= H; ++d) {
            const long long v[2] = {c, d};
            if (!first_nonzero_positive(v) || std::gcd(c, d) != 1) continue;
            const double q = y00 * c * c + 2.0 * y01 * c * d + y11 * static_cast<double>(d) * d;
            const cplx t = real_pow(q, -s);
            p.total += t;
            if (std::max(std::abs(c), std::abs(d)) > half) p.last_shell += t;
            ++p.terms;
        }
        return p;
    });
    ShellSums out;
    for (const auto& p : parts) {
        out.total += p.total;
        out.last_shell += p.last_shell;
        out.terms += p.terms;
    }
    return out;
}

ShellSums eisenstein3(cplx s1, cplx s2, const Matrix& Y, int H, int workers, long budget) {
    const Matrix Yi = Y.inverse();
    const double detY = Y.determinant();
    const int half = H / 2;
    const long side = 2L * H + 1;
    if (side * side * side * side * side / 2 > budget) throw EnumerationBudgetExceeded("Eisenstein n=3 height too large");
    const int chunks = 2 * H + 1;
    const auto parts = run_chunks<ShellSums>(chunks, workers, [&](int chunk) {
        ShellSums p;
        const long long u0 = chunk - H;
        for (long long u1 = -H; u1 <= H; ++u1)
            for (long long u2 = -H; u2 <= H; ++u2) {
                const long long u[3] = {u0, u1, u2};
                if (!first_nonzero_positive(u) || gcd_all(u) != 1) continue;
                double qu = 0.0;
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j) qu += Y(i, j) * static_cast<double>(u[i] * u[j]);
                const cplx tu = real_pow(qu, -s1);
                const long long hu = std::max({std::abs(u0), std::abs(u1), std::abs(u2)});
                // Solve c·u = 0 for the coordinate k with the largest |u_k|.
                int k = 0;
                for (int i = 1; i < 3; ++i)
                    if (std::abs(u[i]) > std::abs(u[k])) k = i;
                const int i1 = (k + 1) % 3, i2 = (k + 2) % 3;
                for (long long a = -H; a <= H; ++a)
                    for (long long b = -H; b <= H; ++b) {
                        const long long num = -(u[i1] * a + u[i2] * b);
                        if (num % u[k] != 0) continue;
                        const long long ck = num / u[k];
                        if (std::abs(ck) > H) continue;
                        long long c[3];
                        c[i1] = a;
                        c[i2] = b;
                        c[k] = ck;
                        if (!first_nonzero_positive(c) || gcd_all(c) != 1) continue;
                        double qc = 0.0;
                        for (int i = 0; i < 3; ++i)
                            for (int j = 0; j < 3; ++j) qc += Yi(i, j) * static_cast<double>(c[i] * c[j]);
                        const cplx t = tu * real_pow(detY * qc, -s2);
                        p.total += t;
                        const long long hc = std::max({std::abs(c[0]), std::abs(c[1]), std::abs(c[2])});
                        if (std::max(hu, hc) > half) p.last_shell += t;
                        ++p.terms;
                    }
            }
        return p;
    });
    ShellSums out;
    for (const auto& p : parts) {
        out.total += p.total;
        out.last_shell += p.last_shell;
        out.terms += p.terms;
    }
    return out;
}

}  // namespace

EisensteinResult eisenstein(const ComplexVector& s, const Matrix& Y, int height, int workers, long budget) {
    const int n = static_cast<int>(Y.rows());
    if (n != 2 && n != 3) throw DomainError("Eisenstein series implemented for n = 2, 3");
    if (static_cast<int>(s.size()) != n - 1) throw DimensionMismatch("s must have length n-1");
    if (height < 1) throw DomainError("height must be >= 1");
    require_real_part_above_one(s);
    (void)UnitDetSpdPoint(Y);
    const ShellSums sums = n == 2 ? eisenstein2(s[0], Y, height, workers)
                                  : eisenstein3(s[0], s[1], Y, height, workers, budget);
    // Shell sums decay geometrically with ratio 2^{2 − 2 min Re s} (n = 2) or
    // 2^{3 − 2 min Re s} (n = 3, counting both columns). The geometric tail is
    // doubled because early shells decay more slowly than the asymptotic rate.
    double sigma = s[0].real();
    for (const cplx& x : s) sigma = std::min(sigma, x.real());
    const double q = std::pow(2.0, (n == 2 ? 2.0 : 3.0) - 2.0 * sigma);
    const double tail = 2.0 * (q < 1.0 ? std::abs(sums.last_shell) * q / (1.0 - q) : std::abs(sums.last_shell));
    return {sums.total, tail, sums.terms, height};
}

bool same_gamma_star_coset(const IntMatrix& g1, const IntMatrix& g2) {
    const long long d = integer_det(g1);
    if (std::abs(d) != 1) throw DomainError("coset test needs unimodular matrices");
    const Matrix q = g1.cast<double>().inverse() * g2.cast<double>();
    const int n = static_cast<int>(q.rows());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double r = std::round(q(i, j));
            if (std::abs(q(i, j) - r) > 1e-9) return false;
            if (i > j && r != 0.0) return false;
            if (i == j && std::abs(r) != 1.0) return false;
        }
    return true;
}

cplx eisenstein_eigenvalue(const ComplexVector& s, int n) {
    if (static_cast<int>(s.size()) != n - 1) throw DimensionMismatch("s must have length n-1");
    cplx lambda = 0.0;
    for (int j = 1; j <= n - 1; ++j) {
        cplx xi = 0.0;
        for (int k = j + 1; k <= n - 1; ++k) xi += static_cast<double>(n - k) * s[k - 1];
        xi /= static_cast<double>(n - j);
        const double w = static_cast<double>(n - j) / (n - j + 1);
        const cplx sj = s[j - 1] + xi;
        lambda += w * sj * (sj - 1.0 - 1.0 / (n - j));
    }
    return lambda;
}

ScalarField eisenstein_field(cplx s, int height) {
    require_real_part_above_one({s});
    std::vector<std::array<double, 2>> reps;
    for (int c = 0; c <= height; ++c)
        for (int d = -height; d <= height; ++d) {
            const long long v[2] = {c, d};
            if (first_nonzero_positive(v) && std::gcd(c, d) == 1) reps.push_back({double(c), double(d)});
        }
    return ScalarField::from_generic(CoordinateSystem::sl_iwasawa(2), [reps, s](const auto& Y, const auto&) {
        auto sum = Y.zero();
        for (const auto& [c, d] : reps) sum += pow(Y(0, 0) * (c * c) + Y(0, 1) * (2.0 * c * d) + Y(1, 1) * (d * d), -s);
        return sum;
    });
}

// ---------------------------------------------------------------------------

namespace {

double integrate_line(const std::function<double(double)>& f, double tol, double& err) {
    boost::math::quadrature::sinh_sinh<double> integrator;
    double l1 = 0.0;
    const double v = integrator.integrate(f, tol, &err, &l1);
    if (!std::isfinite(v) || err > std::max(1e-6, 1e3 * tol) * std::max(1.0, l1))
        throw QuadratureFailure("K-Bessel quadrature did not converge");
    return v;
}

}  // namespace

QuadratureValue k_bessel(const ComplexVector& s, const Matrix& A, const Matrix& B, BesselSign sign, double tol) {
    const int n = static_cast<int>(A.rows());
    if (n != 1 && n != 2) throw DomainError("k_bessel implemented for n = 1, 2");
    if (B.rows() != n || B.cols() != n || A.cols() != n || static_cast<int>(s.size()) != n)
        throw DimensionMismatch("k_bessel argument shapes");
    (void)SpdPoint(A);
    if (Eigen::SelfAdjointEigenSolver<Matrix>(Matrix(0.5 * (B + B.transpose()))).eigenvalues().minCoeff() < 0.0)
        throw NotPositiveDefinite("B must be positive semidefinite");
    if (sign == BesselSign::Printed)
        throw DivergentParameters("the integrand e^{+Tr(AY+BY^-1)} diverges for positive definite A, B");
    const bool complex_s = std::any_of(s.begin(), s.end(), [](const cplx& x) { return x.imag() != 0.0; });

    // Integrand as a function of log-coordinates; the y₁₂ direction at n = 2
    // is a Gaussian integral done in closed form.
    // Far out along the sinh-sinh abscissas exp() overflows; the integrand has
    // decayed to zero there.
    auto finite_or_zero = [](cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()) ? z : cplx(0.0); };
    auto raw_integrand = [&](double u1, double u2) -> cplx {
        if (n == 1) {
            const double y = std::exp(u1);
            return std::exp(s[0] * u1 - A(0, 0) * y - B(0, 0) / y);
        }
        const double t11 = std::exp(u1), t22 = std::exp(u2);
        const double d = t11 * t11 * t22 * t22;
        const double alpha = A(1, 1) + B(0, 0) / d;
        const double beta = 2.0 * A(0, 1) * t11 - 2.0 * B(0, 1) * t11 / d;
        const double gamma = A(0, 0) * t11 * t11 + A(1, 1) * t22 * t22 + (B(0, 0) * t22 * t22 + B(1, 1) * t11 * t11) / d;
        const double expo = beta * beta / (4.0 * alpha) - gamma;
        // p_s = t11^{2 s1} (t11 t22)^{2 s2}; dv = 4 t22^{-1} du1 du2 dt12.
        const cplx logp = 2.0 * s[0] * u1 + 2.0 * s[1] * (u1 + u2);
        return 4.0 * std::sqrt(kPi / alpha) * std::exp(logp + expo - u2);
    };
    auto integrand = [&](double u1, double u2) { return finite_or_zero(raw_integrand(u1, u2)); };

    QuadratureValue out;
    double err_re = 0.0, err_im = 0.0;
    if (n == 1) {
        const double re = integrate_line([&](double u) { return integrand(u, 0.0).real(); }, tol, err_re);
        const double im = complex_s ? integrate_line([&](double u) { return integrand(u, 0.0).imag(); }, tol, err_im) : 0.0;
        out.value = {re, im};
        out.error_estimate = std::hypot(err_re, err_im);
        return out;
    }
    auto part = [&](bool imag) {
        double outer_err = 0.0, inner_max = 0.0;
        const double v = integrate_line(
            [&](double u1) {
                double e = 0.0;
                const double r = integrate_line(
                    [&](double u2) {
                        const cplx z = integrand(u1, u2);
                        return imag ? z.imag() : z.real();
                    },
                    tol, e);
                inner_max = std::max(inner_max, e);
                return r;
            },
            tol, outer_err);
        return std::make_pair(v, outer_err + inner_max);
    };
    const auto [re, e1] = part(false);
    const auto [im, e2] = complex_s ? part(true) : std::make_pair(0.0, 0.0);
    out.value = {re, im};
    out.error_estimate = std::hypot(e1, e2);
    return out;
}

// ---------------------------------------------------------------------------

cplx fourier_coefficient(const std::function<cplx(const Matrix& Y)>& f, const std::vector<int>& N, double v,
                         const Matrix& W, int grid) {
    const int d = static_cast<int>(N.size());
    if (W.rows() != d || W.cols() != d) throw DimensionMismatch("W must be (n-1)x(n-1)");
    int norm = 0;
    for (int x : N) norm = std::max(norm, std::abs(x));
    if (grid < 2 * (norm + 1)) throw DomainError("grid too small for the requested frequency (aliasing)");
    PartialIwasawaCoords c;
    c.v = v;
    c.W = d > 0 ? W : Matrix(0, 0);
    c.x = Vector::Zero(d);
    std::vector<int> idx(d, 0);
    cplx sum = 0.0;
    long count = 0;
    while (true) {
        double phase = 0.0;
        for (int i = 0; i < d; ++i) {
            c.x(i) = static_cast<double>(idx[i]) / grid;
            phase += c.x(i) * N[i];
        }
        sum += f(partial_iwasawa_inverse(c).dense()) * std::exp(cplx(0.0, -2.0 * kPi * phase));
        ++count;
        int i = d - 1;
        while (i >= 0 && ++idx[i] == grid) idx[i--] = 0;
        if (i < 0) break;
    }
    return sum / static_cast<double>(count);
}

CuspVariant parse_cusp_variant(const std::string& name) {
    if (name == "cone") return CuspVariant::Cone;
    if (name == "sl") return CuspVariant::Sl;
    if (name == "pnm") return CuspVariant::Pnm;
    if (name == "unipotent") return CuspVariant::Unipotent;
    throw DomainError("unknown cusp variant: " + name);
}

MonteCarloValue cusp_integral(const ScalarField& f, const Matrix& Y, const Matrix& V, const CuspQuery& q) {
    const int n = static_cast<int>(Y.rows());
    const int m = static_cast<int>(V.rows());
    std::vector<int> partition = q.partition;
    bool translations = q.include_translations;
    if (q.variant != CuspVariant::Unipotent) {
        if (q.j < 1 || q.j > n - 1) throw IndexOutOfRange("cusp index j must satisfy 1 <= j <= n-1");
        partition = {q.j, n - q.j};
        translations = q.variant == CuspVariant::Pnm;
    }
    if (std::accumulate(partition.begin(), partition.end(), 0) != n || partition.empty())
        throw DomainError("partition must sum to n");
    if (q.shifts < 1 || q.points < q.shifts) throw DomainError("cusp integral needs points >= shifts >= 1");

    // Above-diagonal block positions of the unipotent radical.
    std::vector<std::pair<int, int>> cells;
    std::vector<int> block_of(n);
    for (int b = 0, r = 0; b < static_cast<int>(partition.size()); r += partition[b], ++b)
        for (int i = 0; i < partition[b]; ++i) block_of[r + i] = b;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (block_of[i] < block_of[j]) cells.push_back({i, j});
    const int dim = static_cast<int>(cells.size()) + (translations ? m * n : 0);

    const long per_shift = q.points / q.shifts;
    // Korobov generator (1, g, g², …) mod per_shift.
    const long gen = (static_cast<long>(per_shift * 0.6180339887498949) | 1L) % std::max(per_shift, 2L);
    std::vector<long> z(dim);
    long acc = 1;
    for (int k = 0; k < dim; ++k) {
        z[k] = acc % per_shift;
        acc = (acc * gen) % per_shift;
    }

    std::vector<cplx> means;
    for (int sh = 0; sh < q.shifts; ++sh) {
        Rng rng(q.seed, static_cast<std::uint64_t>(sh));
        std::vector<double> shift(dim);
        for (double& x : shift) x = rng.uniform();
        cplx sum = 0.0;
        for (long i = 0; i < per_shift; ++i) {
            Matrix u = Matrix::Identity(n, n);
            Matrix eta = Matrix::Zero(m, n);
            for (int k = 0; k < dim; ++k) {
                double x = static_cast<double>((i * z[k]) % per_shift) / per_shift + shift[k];
                x -= std::floor(x);
                if (k < static_cast<int>(cells.size())) u(cells[k].first, cells[k].second) = x;
                else {
                    const int e = k - static_cast<int>(cells.size());
                    eta(e / n, e % n) = x;
                }
            }
            const Matrix Yu = u.transpose() * Y * u;
            sum += f.value_at(Matrix(0.5 * (Yu + Yu.transpose())), Matrix((V + eta) * u));
        }
        means.push_back(sum / static_cast<double>(per_shift));
    }
    cplx mean = 0.0;
    for (const cplx& x : means) mean += x;
    mean /= static_cast<double>(means.size());
    double var = 0.0;
    for (const cplx& x : means) var += std::norm(x - mean);
    const double se = means.size() > 1 ? std::sqrt(var / (means.size() - 1) / means.size()) : 0.0;
    return {mean, se, per_shift * q.shifts};
}

double growth_ratio(const ScalarField& f, const ComplexVector& s, const Ray& ray, const std::vector<double>& ts) {
    ComplexVector neg(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) neg[i] = -s[i];
    double worst = 0.0;
    for (double t : ts) {
        const auto [Y, V] = ray(t);
        const double denom = std::abs(power_p(neg, Y));
        worst = std::max(worst, std::abs(f.value_at(Y, V)) / denom);
    }
    return worst;
}

// ---------------------------------------------------------------------------

GroupVariant parse_group_variant(const std::string& name) {
    if (name == "gamma_n" || name == "GL") return GroupVariant::GammaN;
    if (name == "sl_gamma_n" || name == "SL") return GroupVariant::SlGammaN;
    if (name == "gamma_nm") return GroupVariant::GammaNM;
    if (name == "sl_gamma_nm") return GroupVariant::SlGammaNM;
    throw DomainError("unknown group variant: " + name);
}

std::string to_string(GroupVariant g) {
    switch (g) {
        case GroupVariant::GammaN: return "gamma_n";
        case GroupVariant::SlGammaN: return "sl_gamma_n";
        case GroupVariant::GammaNM: return "gamma_nm";
        case GroupVariant::SlGammaNM: return "sl_gamma_nm";
    }
    return "";
}

std::pair<IntMatrix, IntMatrix> random_integral_element(GroupVariant g, int n, int m, Rng& rng, int steps) {
    IntMatrix A = IntMatrix::Identity(n, n);
    for (int k = 0; k < steps && n > 1; ++k) {
        const int i = static_cast<int>(rng.uniform_int(0, n - 1));
        int j = static_cast<int>(rng.uniform_int(0, n - 2));
        if (j >= i) ++j;
        A.row(i) += (rng.uniform_int(0, 1) ? 1 : -1) * IntMatrix(A.row(j));
    }
    if (g == GroupVariant::GammaN || g == GroupVariant::GammaNM) {
        const int i = static_cast<int>(rng.uniform_int(0, n - 1));
        if (rng.uniform_int(0, 1)) A.row(i) = -A.row(i);
    }
    IntMatrix a = IntMatrix::Zero(m, n);
    if (g == GroupVariant::GammaNM || g == GroupVariant::SlGammaNM)
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) a(i, j) = rng.uniform_int(-2, 2);
    return {A, a};
}

const ConditionVerdict* AutomorphicReport::find(const std::string& name) const {
    for (const auto& c : conditions)
        if (c.name == name) return &c;
    return nullptr;
}

nlohmann::json AutomorphicReport::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : conditions)
        arr.push_back({{"name", c.name}, {"pass", c.pass}, {"residual", c.residual}, {"detail", c.detail}});
    return {{"conditions", arr}};
}

namespace {

DiffOperator default_laplacian(const CoordinateSystem& cs) {
    if (cs.kind == ChartKind::SlIwasawa) return op_laplace_sl_iwasawa(cs.n, SlLaplaceVariant::LaplaceBeltrami);
    if (cs.m == 0) return op_laplace_cone(Scalar(1), cs.n);
    return op_laplace_pnm(Scalar(1), Scalar(1), cs.n, cs.m);
}

std::vector<double> random_point(const CoordinateSystem& cs, Rng& rng) {
    const Matrix Y = cs.kind == ChartKind::SlIwasawa ? Matrix(random_unit_spd(cs.n, rng, 0.5).dense())
                                                     : Matrix(random_spd(cs.n, rng.next_u64(), 0.5).dense());
    const Matrix V = random_gaussian(cs.m, cs.n, rng) * 0.5;
    return point_coords(cs, Y, V);
}

Ray default_ray(const CoordinateSystem& cs) {
    return [cs](double t) {
        Matrix Y = Matrix::Identity(cs.n, cs.n);
        if (cs.kind == ChartKind::SlIwasawa) {
            // v = t with x = 0 and W = I.
            Y(0, 0) = 1.0 / t;
            for (int i = 1; i < cs.n; ++i) Y(i, i) = std::pow(t, 1.0 / (cs.n - 1));
        } else {
            Y *= t;
        }
        return std::make_pair(Y, Matrix(Matrix::Zero(cs.m, cs.n)));
    };
}

}  // namespace

AutomorphicReport automorphic_check(const ScalarField& f, const AutomorphicCheckConfig& config) {
    const CoordinateSystem& cs = f.coords();
    const int n = cs.n, m = cs.m;
    AutomorphicReport report;

    std::vector<DiffOperator> ops = config.operators;
    if (ops.empty()) ops.push_back(default_laplacian(cs));
    double worst_commutator = 0.0;
    for (std::size_t i = 0; i < ops.size(); ++i) {
        if (!(ops[i].coords() == cs)) throw DomainError("operator chart differs from the field chart");
        const std::vector<DiffOperator> rest(ops.begin() + i + 1, ops.end());
        for (double r : commutes_with_all(ops[i], rest)) worst_commutator = std::max(worst_commutator, r);
    }
    if (worst_commutator > 1e-12) throw DomainError("operator set is not commutative");
    report.conditions.push_back({"operators_commute", true, worst_commutator, {{"operators", ops.size()}}});

    Rng rng(config.seed);
    std::vector<std::vector<double>> points = config.probe_points;
    while (static_cast<int>(points.size()) < config.eigen_points) points.push_back(random_point(cs, rng));

    // Invariance under random integral group elements.
    {
        double worst = 0.0;
        for (int k = 0; k < config.group_elements; ++k) {
            const auto [A, a] = random_integral_element(config.group, n, m, rng);
            const Matrix Ar = A.cast<double>(), ar = a.cast<double>();
            for (const auto& p : points) {
                const cplx f0 = f.value(p);
                const cplx f1 = f.value(act_on_chart(cs, Ar, ar, p));
                worst = std::max(worst, std::abs(f1 - f0) / std::max(std::abs(f0), 1e-300));
            }
        }
        report.conditions.push_back({"invariance", worst <= config.invariance_tol, worst,
                                     {{"group", to_string(config.group)}, {"elements", config.group_elements}}});
    }

    // Eigenfunction condition per operator.
    for (std::size_t i = 0; i < ops.size(); ++i) {
        const CharacterValue cv = eigenvalue_extract(ops[i], f, points, config.apply);
        const bool ok = cv.constancy_residual <= config.eigen_tol && cv.skipped_points.size() < points.size();
        report.conditions.push_back({"eigen[" + std::to_string(i) + "]", ok, cv.constancy_residual,
                                     {{"eigenvalue", {cv.value.real(), cv.value.imag()}}}});
    }

    // Cuspidality.
    std::vector<int> js = config.cusp_js;
    if (js.empty())
        for (int j = 1; j < n; ++j) js.push_back(j);
    const auto [Y0, V0] = coords_to_point(cs, points.front());
    const double scale = std::max(std::abs(f.value(points.front())), 1e-300);
    for (int j : js) {
        CuspQuery q;
        q.variant = cs.kind == ChartKind::SlIwasawa ? CuspVariant::Sl : (m > 0 ? CuspVariant::Pnm : CuspVariant::Cone);
        q.j = j;
        q.points = config.cusp_points;
        q.seed = config.seed;
        const MonteCarloValue c = cusp_integral(f, Y0, V0, q);
        const double r = std::abs(c.value) / scale;
        report.conditions.push_back({"cusp[" + std::to_string(j) + "]", r <= config.cusp_tol, r,
                                     {{"integral", {c.value.real(), c.value.imag()}}, {"standard_error", c.standard_error}}});
    }

    // Growth.
    if (!config.growth_s.empty()) {
        const Ray ray = config.growth_ray ? *config.growth_ray : default_ray(cs);
        const double g = growth_ratio(f, config.growth_s, ray, config.growth_ts);
        report.conditions.push_back({"growth", std::isfinite(g) && g <= config.growth_bound, g,
                                     {{"bound", config.growth_bound}}});
    }
    return report;
}

}  // namespace pnm
