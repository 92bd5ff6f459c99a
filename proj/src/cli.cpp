#include "pnm/cli.hpp"

#include "pnm/autforms.hpp"
#include "pnm/diffops.hpp"
#include "pnm/errors.hpp"
#include "pnm/geometry.hpp"
#include "pnm/groups.hpp"
#include "pnm/reduction.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace pnm::cli {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// JSON helpers.

void require_fields(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw RequestError(where + " must be a JSON object");
    for (const auto& [key, _] : j.items())
        if (!allowed.count(key)) throw RequestError("unknown field '" + key + "' in " + where);
}

const json& need(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key)) throw RequestError("missing field '" + key + "' in " + where);
    return j.at(key);
}

Matrix matrix_from_json(const json& j, const std::string& what) {
    if (!j.is_array()) throw RequestError(what + " must be an array of rows");
    const int rows = static_cast<int>(j.size());
    const int cols = rows > 0 ? static_cast<int>(j.at(0).size()) : 0;
    Matrix out(rows, cols);
    for (int i = 0; i < rows; ++i) {
        if (!j.at(i).is_array() || static_cast<int>(j.at(i).size()) != cols)
            throw RequestError(what + " rows must be arrays of equal length");
        for (int k = 0; k < cols; ++k) {
            if (!j.at(i).at(k).is_number()) throw RequestError(what + " entries must be numbers");
            out(i, k) = j.at(i).at(k).get<double>();
        }
    }
    return out;
}

json to_json(const Matrix& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
        rows.push_back(row);
    }
    return rows;
}

json to_json(const IntMatrix& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
        rows.push_back(row);
    }
    return rows;
}

json to_json(const Vector& v) {
    json out = json::array();
    for (int i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

json to_json(cplx z) {
    if (z.imag() == 0.0) return z.real();
    return json::array({z.real(), z.imag()});
}

cplx complex_from_json(const json& j, const std::string& what) {
    if (j.is_number()) return j.get<double>();
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    throw RequestError(what + " must be a number or [re, im]");
}

ComplexVector complex_vector_from_json(const json& j, const std::string& what) {
    if (j.is_number()) return {complex_from_json(j, what)};
    if (!j.is_array()) throw RequestError(what + " must be an array");
    ComplexVector out;
    for (const auto& x : j) out.push_back(complex_from_json(x, what));
    return out;
}

std::vector<double> vector_from_json(const json& j, const std::string& what) {
    if (!j.is_array()) throw RequestError(what + " must be an array of numbers");
    std::vector<double> out;
    for (const auto& x : j) {
        if (!x.is_number()) throw RequestError(what + " must be an array of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

json point_to_json(const Matrix& Y, const Matrix& V) {
    json out = {{"Y", to_json(Y)}};
    if (V.rows() > 0) out["V"] = to_json(V);
    return out;
}

std::pair<Matrix, Matrix> point_from_json(const json& j) {
    require_fields(j, {"Y", "V"}, "point");
    const Matrix Y = matrix_from_json(need(j, "Y", "point"), "Y");
    const Matrix V = j.contains("V") ? matrix_from_json(j.at("V"), "V") : Matrix(0, Y.cols());
    if (V.rows() > 0 && V.cols() != Y.cols()) throw DimensionMismatch("V must have n columns");
    return {Y, V};
}

json group_to_json(const Matrix& A, const Matrix& a) { return {{"A", to_json(A)}, {"a", to_json(a)}}; }

// ---------------------------------------------------------------------------
// Operator and field specifications.

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

std::vector<long long> int_args(const std::string& s) {
    std::vector<long long> out;
    for (const auto& p : split(s, ',')) {
        std::size_t used = 0;
        long long v = 0;
        try {
            v = std::stoll(p, &used);
        } catch (const std::exception&) {
            throw RequestError("bad operator argument '" + p + "'");
        }
        if (used != p.size()) throw RequestError("bad operator argument '" + p + "'");
        out.push_back(v);
    }
    return out;
}

int require_n(const CommandRequest& r) {
    if (!r.n) throw RequestError("--n is required");
    if (*r.n < 1) throw DomainError("n must be >= 1");
    return *r.n;
}

DiffOperator parse_operator(const std::string& spec, const CommandRequest& r) {
    const int n = require_n(r);
    const int m = r.m.value_or(0);
    const auto colon = spec.find(':');
    const std::string name = spec.substr(0, colon);
    const std::vector<long long> args = colon == std::string::npos ? std::vector<long long>{} : int_args(spec.substr(colon + 1));
    auto arity = [&](std::size_t k) {
        if (args.size() != k) throw RequestError("operator '" + name + "' takes " + std::to_string(k) + " arguments");
    };
    if (name == "delta") {
        arity(1);
        return op_delta(static_cast<int>(args[0]), CoordinateSystem::cone(n, m));
    }
    if (name == "D") {
        arity(1);
        return op_D(static_cast<int>(args[0]), n, m);
    }
    if (name == "Omega") {
        arity(3);
        return op_Omega(static_cast<int>(args[0]), static_cast<int>(args[1]), static_cast<int>(args[2]), n, m);
    }
    if (name == "L") {
        arity(1);
        return op_L(static_cast<int>(args[0]), n, m);
    }
    if (name == "laplace_cone") {
        arity(0);
        return op_laplace_cone(Scalar(1), n);
    }
    if (name == "laplace_pnm") {
        arity(0);
        return op_laplace_pnm(Scalar(1), Scalar(1), n, m);
    }
    if (name == "laplace_sl") {
        arity(0);
        return op_laplace_sl_iwasawa(n, parse_sl_variant(r.variant));
    }
    if (name == "M") {
        if (m < 1 || args.size() != static_cast<std::size_t>(m * m))
            throw RequestError("M takes m*m integer entries of 2*index (row-major)");
        IntMatrix twice(m, m);
        for (int i = 0; i < m; ++i)
            for (int k = 0; k < m; ++k) twice(i, k) = args[i * m + k];
        return op_M(IndexMatrix(twice), n, r.jet_order);
    }
    throw RequestError("unknown operator '" + name + "'");
}

CoordinateSystem chart_from(const json& f, const std::string& fallback, int n, int m) {
    const std::string chart = f.value("chart", fallback);
    if (chart == "cone") return CoordinateSystem::cone(n, m);
    if (chart == "sl") return CoordinateSystem::sl_iwasawa(n, m);
    throw RequestError("unknown chart '" + chart + "'");
}

ScalarField parse_field(const json& f, const CommandRequest& r) {
    const std::string name = need(f, "name", "field").get<std::string>();
    const int m = r.m.value_or(0);
    if (name == "p_s") {
        require_fields(f, {"name", "s", "chart"}, "field p_s");
        const ComplexVector s = complex_vector_from_json(need(f, "s", "field"), "s");
        const int n = r.n.value_or(static_cast<int>(s.size()));
        const CoordinateSystem cs = chart_from(f, "cone", n, m);
        if (static_cast<int>(s.size()) > n) throw DimensionMismatch("s longer than n");
        return ScalarField::from_generic(cs, [s](const auto& Y, const auto&) { return power_p_generic(s, Y); });
    }
    if (name == "phi_z") {
        require_fields(f, {"name", "z"}, "field phi_z");
        const ComplexVector z = complex_vector_from_json(need(f, "z", "field"), "z");
        const int n = static_cast<int>(z.size());
        return ScalarField::from_generic(CoordinateSystem::cone(n, m),
                                         [z](const auto& Y, const auto&) { return phi_generic(z, Y); });
    }
    if (name == "I_nu") {
        require_fields(f, {"name", "nu"}, "field I_nu");
        const ComplexVector nu = complex_vector_from_json(need(f, "nu", "field"), "nu");
        const int n = static_cast<int>(nu.size()) + 1;
        const IntMatrix b = b_matrix(n);
        return ScalarField::from_generic(CoordinateSystem::sl_iwasawa(n, m),
                                         [nu, b](const auto& Y, const auto&) { return i_nu_generic(nu, b, Y); });
    }
    if (name == "eisenstein") {
        require_fields(f, {"name", "s", "height"}, "field eisenstein");
        return eisenstein_field(complex_from_json(need(f, "s", "field"), "s"), f.value("height", 100));
    }
    if (name == "constant") {
        require_fields(f, {"name", "value", "chart", "n"}, "field constant");
        const cplx v = complex_from_json(f.value("value", json(1.0)), "value");
        const int n = f.contains("n") ? f.at("n").get<int>() : require_n(r);
        const CoordinateSystem cs = chart_from(f, "cone", n, m);
        return ScalarField::from_generic(cs, [v](const auto& Y, const auto&) { return Y.zero() + v; });
    }
    throw RequestError("unknown field '" + name + "'");
}

std::vector<double> chart_point(const json& p, const CoordinateSystem& cs) {
    if (p.is_array()) {
        std::vector<double> c = vector_from_json(p, "point");
        if (static_cast<int>(c.size()) != cs.dim()) throw DimensionMismatch("point has wrong chart dimension");
        return c;
    }
    const auto [Y, V] = point_from_json(p);
    return point_coords(cs, Y, V);
}

ApplyConfig apply_config(const CommandRequest& r) {
    ApplyConfig c;
    c.max_jet_order = r.jet_order;
    return c;
}

// ---------------------------------------------------------------------------
// Subcommands.

json cmd_act(const CommandRequest& r) {
    require_fields(r.input, {"group", "point"}, "act input");
    const json& g = need(r.input, "group", "act input");
    require_fields(g, {"A", "a"}, "group");
    const auto [Y, V] = point_from_json(need(r.input, "point", "act input"));
    const Matrix A = matrix_from_json(need(g, "A", "group"), "A");
    const Matrix a = g.contains("a") ? matrix_from_json(g.at("a"), "a") : Matrix(V.rows(), A.cols());
    const PnmPoint p = glnm_act(GlElement(A, a.rows() ? a : Matrix::Zero(V.rows(), A.cols())), PnmPoint(SpdPoint(Y), V));
    return {{"point", point_to_json(p.Y().dense(), p.V())}};
}

json cmd_reduce(const CommandRequest& r) {
    json in = r.input.contains("point") ? r.input.at("point") : r.input;
    const auto [Y, V] = point_from_json(in);
    const std::string space = r.space.empty() ? (V.rows() > 0 ? "pnm" : "pn") : r.space;
    const ReductionResult res = [&] {
        if (space == "pn") return minkowski_reduce(Y, r.bound);
        if (space == "sl") return grenier_reduce(Y, r.bound);
        if (space == "pnm") return reduce_pnm(Y, V, r.bound);
        throw RequestError("unknown space '" + space + "' (pn, sl, pnm)");
    }();
    json out = {{"reduced", point_to_json(res.Y, res.V)},
                {"transform", {{"A", to_json(res.transform.A())}, {"a", to_json(res.transform.a())}}},
                {"certified", res.certified},
                {"certificate_bound", res.certificate_bound},
                {"boundary_contact", res.boundary_contact}};
    if (!res.note.empty()) out["note"] = res.note;
    if (!res.certified) out["status_detail"] = "not certified";
    return out;
}

json cmd_iwasawa(const CommandRequest& r) {
    require_fields(r.input, {"Y", "kind"}, "iwasawa input");
    const Matrix Y = matrix_from_json(need(r.input, "Y", "iwasawa input"), "Y");
    const std::string kind = r.input.value("kind", "partial");
    if (kind == "partial") {
        const PartialIwasawaCoords c = partial_iwasawa(UnitDetSpdPoint(Y));
        return {{"v", c.v}, {"x", to_json(c.x)}, {"W", to_json(c.W)}};
    }
    if (kind == "full") {
        const FullIwasawaCoords c = full_iwasawa(UnitDetSpdPoint(Y));
        return {{"y", to_json(c.y)}, {"X", to_json(c.X)}, {"ydet", c.ydet}};
    }
    if (kind == "goldfeld") {
        const GoldfeldPoint z = goldfeld_from_spd(SpdPoint(Y));
        return {{"x", to_json(z.x)}, {"y", to_json(z.y)}};
    }
    throw RequestError("unknown iwasawa kind '" + kind + "'");
}

json cmd_volume(const CommandRequest& r) { return {{"value", siegel_volume(require_n(r))}}; }

json cmd_geodesic(const CommandRequest& r) {
    require_fields(r.input, {"Y", "Z", "t"}, "geodesic input");
    const SpdPoint Y(matrix_from_json(need(r.input, "Y", "geodesic input"), "Y"));
    json out;
    if (r.input.contains("Z")) {
        out["distance"] = geodesic_distance(Y, SpdPoint(matrix_from_json(r.input.at("Z"), "Z")));
    } else {
        out["distance"] = geodesic_distance(Y);
    }
    if (r.input.contains("t")) out["point"] = to_json(geodesic_point(Y, r.input.at("t").get<double>()).dense());
    return out;
}

json operator_json(const DiffOperator& d) {
    return {{"operator", to_json(d)}, {"pretty", pretty(d)}, {"order", d.order()}, {"terms", d.term_count()},
            {"exact", d.is_exact()}};
}

json cmd_operator(const CommandRequest& r) {
    if (r.lhs.empty()) throw RequestError("--lhs is required");
    const DiffOperator lhs = parse_operator(r.lhs, r);
    if (r.action == "expand") return operator_json(lhs);
    if (r.action == "commutator") {
        if (r.rhs.empty()) throw RequestError("--rhs is required");
        const DiffOperator rhs = parse_operator(r.rhs, r);
        const DiffOperator c = op_commutator(lhs, rhs);
        json out = operator_json(c);
        out["is_zero"] = c.is_zero();
        // Report c = k·rhs when that holds exactly.
        if (c.term_count() > 0 && rhs.term_count() > 0 && c.is_exact() && rhs.is_exact()) {
            const auto& [alpha, poly] = *rhs.terms().begin();
            const auto& [expo, coeff] = *poly.begin();
            Scalar mine;
            if (const auto it = c.terms().find(alpha); it != c.terms().end())
                if (const auto jt = it->second.find(expo); jt != it->second.end()) mine = jt->second;
            const Scalar k = mine * coeff.inverse();
            if (!k.is_zero() && op_sub(c, op_scale(k, rhs)).term_count() == 0) out["multiple_of_rhs"] = k.to_string();
        }
        return out;
    }
    if (r.action == "apply") {
        require_fields(r.input, {"field", "point"}, "operator apply input");
        const ScalarField f = parse_field(need(r.input, "field", "input"), r);
        if (!(f.coords() == lhs.coords())) throw DomainError("field chart differs from operator chart");
        const std::vector<double> p = chart_point(need(r.input, "point", "input"), f.coords());
        const cplx v = op_apply(lhs, f, p, apply_config(r));
        const cplx f0 = f.value(p);
        json out = {{"value", to_json(v)}, {"field_value", to_json(f0)}};
        if (std::abs(f0) > 0.0) out["ratio"] = to_json(v / f0);
        return out;
    }
    if (r.action == "invariance") {
        require_fields(r.input, {"field", "points", "elements"}, "operator invariance input");
        const ScalarField f = parse_field(need(r.input, "field", "input"), r);
        const CoordinateSystem& cs = f.coords();
        if (!(cs == lhs.coords())) throw DomainError("field chart differs from operator chart");
        Rng rng(r.seed);
        std::vector<std::vector<double>> pts;
        if (r.input.contains("points"))
            for (const auto& p : r.input.at("points")) pts.push_back(chart_point(p, cs));
        while (pts.size() < 3) {
            const Matrix Y = cs.kind == ChartKind::SlIwasawa ? Matrix(random_unit_spd(cs.n, rng, 0.5).dense())
                                                             : Matrix(random_spd(cs.n, rng.next_u64(), 0.5).dense());
            pts.push_back(point_coords(cs, Y, random_gaussian(cs.m, cs.n, rng) * 0.5));
        }
        const int elements = r.input.value("elements", 10);
        double worst = 0.0;
        for (int k = 0; k < elements; ++k) {
            Matrix A;
            Matrix a;
            if (cs.kind == ChartKind::SlIwasawa) {
                const auto g = random_affine<Flavor::SL>(cs.n, cs.m, rng);
                A = g.A();
                a = g.a();
            } else {
                const auto g = random_affine<Flavor::GL>(cs.n, cs.m, rng);
                A = g.A();
                a = g.a();
            }
            worst = std::max(worst, invariance_residual(lhs, A, a, f, pts, apply_config(r)));
        }
        const double tol = r.tol.value_or(1e-7);
        return {{"residual", worst}, {"elements", elements}, {"tolerance", tol}, {"pass", worst <= tol}};
    }
    throw RequestError("operator action must be expand, apply, commutator or invariance");
}

json cmd_eisenstein(const CommandRequest& r) {
    require_fields(r.input, {"s", "Y", "height"}, "eisenstein input");
    const ComplexVector s = complex_vector_from_json(need(r.input, "s", "eisenstein input"), "s");
    const Matrix Y = r.input.contains("Y") ? matrix_from_json(r.input.at("Y"), "Y")
                                           : Matrix(Matrix::Identity(static_cast<int>(s.size()) + 1, static_cast<int>(s.size()) + 1));
    const EisensteinResult e = eisenstein(s, Y, r.input.value("height", 100), r.workers);
    return {{"value", to_json(e.value)},
            {"tail_estimate", e.tail_estimate},
            {"terms", e.terms},
            {"height", e.height},
            {"eigenvalue", to_json(eisenstein_eigenvalue(s, static_cast<int>(Y.rows())))}};
}

json cmd_bessel(const CommandRequest& r) {
    require_fields(r.input, {"s", "A", "B", "sign"}, "bessel input");
    const ComplexVector s = complex_vector_from_json(need(r.input, "s", "bessel input"), "s");
    const std::string sign = r.input.value("sign", "classical");
    if (sign != "classical" && sign != "printed") throw RequestError("sign must be classical or printed");
    const QuadratureValue q = k_bessel(s, matrix_from_json(need(r.input, "A", "bessel input"), "A"),
                                       matrix_from_json(need(r.input, "B", "bessel input"), "B"),
                                       sign == "printed" ? BesselSign::Printed : BesselSign::Classical,
                                       r.tol.value_or(1e-10));
    return {{"value", to_json(q.value)}, {"error_estimate", q.error_estimate}};
}

json cmd_fourier(const CommandRequest& r) {
    require_fields(r.input, {"field", "N", "v", "W", "grid"}, "fourier input");
    const ScalarField f = parse_field(need(r.input, "field", "fourier input"), r);
    std::vector<int> N;
    for (const auto& x : need(r.input, "N", "fourier input")) N.push_back(x.get<int>());
    const int n = static_cast<int>(N.size()) + 1;
    const Matrix W = r.input.contains("W") ? matrix_from_json(r.input.at("W"), "W") : Matrix(Matrix::Identity(n - 1, n - 1));
    const Matrix V0(f.coords().m, n);
    const cplx a = fourier_coefficient([&](const Matrix& Y) { return f.value_at(Y, Matrix::Zero(V0.rows(), n)); }, N,
                                       need(r.input, "v", "fourier input").get<double>(), W, r.input.value("grid", 32));
    return {{"value", to_json(a)}};
}

json cmd_spherical(const CommandRequest& r) {
    require_fields(r.input, {"s", "Y", "samples"}, "spherical input");
    const MonteCarloValue h = spherical_h(complex_vector_from_json(need(r.input, "s", "spherical input"), "s"),
                                          matrix_from_json(need(r.input, "Y", "spherical input"), "Y"),
                                          r.input.value("samples", 10000L), r.seed, r.workers);
    return {{"value", to_json(h.value)}, {"standard_error", h.standard_error}, {"samples", h.samples}};
}

json cmd_check(const CommandRequest& r) {
    require_fields(r.input, {"field", "group", "growth_s", "operators", "group_elements", "eigen_points", "cusp_points"},
                   "check input");
    const ScalarField f = parse_field(need(r.input, "field", "check input"), r);
    AutomorphicCheckConfig cfg;
    cfg.seed = r.seed;
    cfg.apply = apply_config(r);
    if (r.input.contains("group")) cfg.group = parse_group_variant(r.input.at("group").get<std::string>());
    if (r.input.contains("growth_s")) cfg.growth_s = complex_vector_from_json(r.input.at("growth_s"), "growth_s");
    if (r.input.contains("operators")) {
        CommandRequest sub = r;
        sub.n = f.coords().n;
        sub.m = f.coords().m;
        for (const auto& spec : r.input.at("operators")) cfg.operators.push_back(parse_operator(spec.get<std::string>(), sub));
    }
    cfg.group_elements = r.input.value("group_elements", cfg.group_elements);
    cfg.eigen_points = r.input.value("eigen_points", cfg.eigen_points);
    cfg.cusp_points = r.input.value("cusp_points", cfg.cusp_points);
    if (r.tol) cfg.invariance_tol = cfg.eigen_tol = cfg.cusp_tol = *r.tol;
    return automorphic_check(f, cfg).to_json();
}

json cmd_embed(const CommandRequest& r) {
    require_fields(r.input, {"group", "point", "target_n"}, "embed input");
    const int target = need(r.input, "target_n", "embed input").get<int>();
    json out;
    if (r.input.contains("group")) {
        const json& g = r.input.at("group");
        require_fields(g, {"A", "a"}, "group");
        const Matrix A = matrix_from_json(need(g, "A", "group"), "A");
        const Matrix a = g.contains("a") ? matrix_from_json(g.at("a"), "a") : Matrix(0, A.cols());
        const GlElement e = embed_group(GlElement(A, a), target);
        out["group"] = group_to_json(e.A(), e.a());
    }
    if (r.input.contains("point")) {
        const auto [Y, V] = point_from_json(r.input.at("point"));
        const PnmPoint p = embed_point(PnmPoint(SpdPoint(Y), V), target);
        out["point"] = point_to_json(p.Y().dense(), p.V());
    }
    if (out.is_null()) throw RequestError("embed needs a group or a point");
    return out;
}

json dispatch(const CommandRequest& r) {
    const std::string& s = r.subcommand;
    if (s == "act") return cmd_act(r);
    if (s == "reduce") return cmd_reduce(r);
    if (s == "iwasawa") return cmd_iwasawa(r);
    if (s == "volume") return cmd_volume(r);
    if (s == "geodesic") return cmd_geodesic(r);
    if (s == "operator") return cmd_operator(r);
    if (s == "eisenstein") return cmd_eisenstein(r);
    if (s == "bessel") return cmd_bessel(r);
    if (s == "fourier") return cmd_fourier(r);
    if (s == "spherical") return cmd_spherical(r);
    if (s == "check") return cmd_check(r);
    if (s == "embed") return cmd_embed(r);
    throw RequestError("unknown subcommand '" + s + "'");
}

}  // namespace

json request_to_json(const CommandRequest& r) {
    json j = {{"subcommand", r.subcommand}, {"seed", r.seed},     {"jet_order", r.jet_order},
              {"workers", r.workers},       {"variant", r.variant}, {"bound", r.bound},
              {"input", r.input}};
    if (!r.action.empty()) j["action"] = r.action;
    if (r.tol) j["tol"] = *r.tol;
    if (r.n) j["n"] = *r.n;
    if (r.m) j["m"] = *r.m;
    if (!r.lhs.empty()) j["lhs"] = r.lhs;
    if (!r.rhs.empty()) j["rhs"] = r.rhs;
    if (!r.space.empty()) j["space"] = r.space;
    return j;
}

CommandReport run(const CommandRequest& request) {
    CommandReport report;
    report.body = {{"version", kVersion}, {"request", request_to_json(request)}};
    try {
        json result = dispatch(request);
        report.body["status"] = "ok";
        if (result.is_object())
            for (auto& [k, v] : result.items()) report.body[k] = v;
        else
            report.body["value"] = result;
        report.exit_code = 0;
    } catch (const RequestError& e) {
        report.body["status"] = "error";
        report.body["error"] = {{"kind", "request"}, {"message", e.what()}};
        report.exit_code = 1;
    } catch (const json::exception& e) {
        report.body["status"] = "error";
        report.body["error"] = {{"kind", "request"}, {"message", e.what()}};
        report.exit_code = 1;
    } catch (const Error& e) {
        report.body["status"] = "error";
        report.body["error"] = {{"kind", e.exit_code() == 3 ? "budget" : "domain"}, {"message", e.what()}};
        report.exit_code = e.exit_code();
    }
    return report;
}

}  // namespace pnm::cli
