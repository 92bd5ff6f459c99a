#include "pnm/jet.hpp"

#include "pnm/errors.hpp"

#include <cmath>
#include <functional>
#include <mutex>
#include <utility>

namespace pnm {

namespace {

void enumerate_degree(int dim, int degree, MultiIndex& cur, int var, std::vector<MultiIndex>& out) {
    if (var == dim - 1) {
        cur[var] = degree;
        out.push_back(cur);
        cur[var] = 0;
        return;
    }
    for (int k = degree; k >= 0; --k) {
        cur[var] = k;
        enumerate_degree(dim, degree - k, cur, var + 1, out);
    }
    cur[var] = 0;
}

}  // namespace

JetShape::JetShape(int dim, int order) : dim_(dim), order_(order) {
    if (dim < 0 || order < 0) throw DomainError("jet shape needs dim >= 0 and order >= 0");
    if (dim == 0) {
        monomials_.push_back({});
        degrees_.push_back(0);
    } else {
        MultiIndex cur(dim, 0);
        for (int deg = 0; deg <= order; ++deg) {
            std::vector<MultiIndex> level;
            enumerate_degree(dim, deg, cur, 0, level);
            for (auto& m : level) {
                monomials_.push_back(std::move(m));
                degrees_.push_back(deg);
            }
        }
    }
    for (std::size_t i = 0; i < monomials_.size(); ++i) lookup_.emplace(monomials_[i], i);
    variable_index_.resize(dim, 0);
    if (order >= 1) {
        for (int v = 0; v < dim; ++v) {
            MultiIndex e(dim, 0);
            e[v] = 1;
            variable_index_[v] = lookup_.at(e);
        }
    }
    MultiIndex sum(dim, 0);
    for (std::size_t i = 0; i < monomials_.size(); ++i) {
        for (std::size_t j = 0; j < monomials_.size(); ++j) {
            if (degrees_[i] + degrees_[j] > order_) continue;
            for (int v = 0; v < dim; ++v) sum[v] = monomials_[i][v] + monomials_[j][v];
            products_.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
                                 static_cast<std::uint32_t>(lookup_.at(sum))});
        }
    }
}

std::shared_ptr<const JetShape> JetShape::get(int dim, int order) {
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::shared_ptr<const JetShape>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto& slot = cache[{dim, order}];
    if (!slot) slot = std::make_shared<const JetShape>(dim, order);
    return slot;
}

long JetShape::index_of(const MultiIndex& alpha) const {
    auto it = lookup_.find(alpha);
    return it == lookup_.end() ? -1 : static_cast<long>(it->second);
}

Jet::Jet(std::shared_ptr<const JetShape> shape, cplx constant) : shape_(std::move(shape)) {
    c_.assign(shape_->size(), cplx{});
    c_[0] = constant;
}

Jet Jet::variable(std::shared_ptr<const JetShape> shape, int var, double value) {
    Jet j(shape, value);
    if (shape->order() >= 1) j.c_[shape->variable_index(var)] = 1.0;
    return j;
}

cplx Jet::coefficient(const MultiIndex& alpha) const {
    const long i = shape_->index_of(alpha);
    return i < 0 ? cplx{} : c_[i];
}

namespace {

void require_same(const Jet& a, const Jet& b) {
    if (a.shape() != b.shape()) throw DomainError("jets with different shapes");
}

}  // namespace

Jet& Jet::operator+=(const Jet& o) {
    require_same(*this, o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
}

Jet& Jet::operator-=(const Jet& o) {
    require_same(*this, o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
}

Jet& Jet::operator*=(const Jet& o) {
    require_same(*this, o);
    std::vector<cplx> out(c_.size(), cplx{});
    for (const auto& p : shape_->products()) {
        const cplx a = c_[p.lhs];
        if (a == cplx{}) continue;
        out[p.out] += a * o.c_[p.rhs];
    }
    c_ = std::move(out);
    return *this;
}

Jet& Jet::operator/=(const Jet& o) {
    const cplx v = o.value();
    const int k = shape_->order();
    std::vector<cplx> d(k + 1);
    // derivatives of 1/x at v: (-1)^j j! / v^{j+1}
    cplx fact = 1.0;
    for (int j = 0; j <= k; ++j) {
        d[j] = (j % 2 == 0 ? 1.0 : -1.0) * fact / std::pow(v, j + 1);
        fact *= static_cast<double>(j + 1);
    }
    return *this *= o.compose(d);
}

Jet& Jet::operator+=(cplx s) {
    c_[0] += s;
    return *this;
}
Jet& Jet::operator-=(cplx s) {
    c_[0] -= s;
    return *this;
}
Jet& Jet::operator*=(cplx s) {
    for (auto& x : c_) x *= s;
    return *this;
}
Jet& Jet::operator/=(cplx s) {
    for (auto& x : c_) x /= s;
    return *this;
}

Jet Jet::operator-() const {
    Jet r = *this;
    for (auto& x : r.c_) x = -x;
    return r;
}

Jet Jet::compose(std::span<const cplx> derivs) const {
    const int k = shape_->order();
    Jet h = *this;
    h.c_[0] = 0.0;
    Jet out(shape_, derivs.empty() ? cplx{} : derivs[0]);
    Jet power = h;
    double fact = 1.0;
    for (int j = 1; j <= k && j < static_cast<int>(derivs.size()); ++j) {
        fact *= j;
        if (derivs[j] != cplx{}) {
            const cplx w = derivs[j] / fact;
            for (std::size_t i = 0; i < out.c_.size(); ++i) out.c_[i] += w * power.c_[i];
        }
        if (j < k) power *= h;
    }
    return out;
}

Jet operator+(Jet a, const Jet& b) { return a += b; }
Jet operator-(Jet a, const Jet& b) { return a -= b; }
Jet operator*(const Jet& a, const Jet& b) {
    Jet r = a;
    return r *= b;
}
Jet operator/(const Jet& a, const Jet& b) {
    Jet r = a;
    return r /= b;
}
Jet operator+(Jet a, cplx s) { return a += s; }
Jet operator+(cplx s, Jet a) { return a += s; }
Jet operator-(Jet a, cplx s) { return a -= s; }
Jet operator-(cplx s, const Jet& a) { return (-a) += s; }
Jet operator*(Jet a, cplx s) { return a *= s; }
Jet operator*(cplx s, Jet a) { return a *= s; }
Jet operator/(Jet a, cplx s) { return a /= s; }
Jet operator/(cplx s, const Jet& a) { return Jet(a.shape(), s) / a; }

Jet exp(const Jet& a) {
    const cplx e = std::exp(a.value());
    std::vector<cplx> d(a.shape()->order() + 1, e);
    return a.compose(d);
}

Jet log(const Jet& a) {
    const cplx v = a.value();
    const int k = a.shape()->order();
    std::vector<cplx> d(k + 1);
    d[0] = std::log(v);
    double fact = 1.0;
    for (int j = 1; j <= k; ++j) {
        d[j] = (j % 2 == 1 ? 1.0 : -1.0) * fact / std::pow(v, j);
        fact *= j;
    }
    return a.compose(d);
}

Jet pow(const Jet& a, cplx s) {
    const cplx v = a.value();
    const int k = a.shape()->order();
    std::vector<cplx> d(k + 1);
    cplx coef = 1.0;
    for (int j = 0; j <= k; ++j) {
        d[j] = coef * std::pow(v, s - static_cast<double>(j));
        coef *= (s - static_cast<double>(j));
    }
    return a.compose(d);
}

Jet sqrt(const Jet& a) { return pow(a, 0.5); }

Jet sin(const Jet& a) {
    const cplx s = std::sin(a.value()), c = std::cos(a.value());
    std::vector<cplx> d(a.shape()->order() + 1);
    const cplx cycle[4] = {s, c, -s, -c};
    for (std::size_t j = 0; j < d.size(); ++j) d[j] = cycle[j % 4];
    return a.compose(d);
}

Jet cos(const Jet& a) {
    const cplx s = std::sin(a.value()), c = std::cos(a.value());
    std::vector<cplx> d(a.shape()->order() + 1);
    const cplx cycle[4] = {c, -s, -c, s};
    for (std::size_t j = 0; j < d.size(); ++j) d[j] = cycle[j % 4];
    return a.compose(d);
}

}  // namespace pnm
