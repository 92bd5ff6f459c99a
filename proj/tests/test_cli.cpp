#include "pnm/cli.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace pnm::cli;
using nlohmann::json;

namespace {

CommandRequest request(const std::string& sub, json input = json::object()) {
    CommandRequest r;
    r.subcommand = sub;
    r.input = std::move(input);
    return r;
}

}  // namespace

TEST_CASE("volume") {
    CommandRequest r = request("volume");
    r.n = 2;
    const CommandReport rep = run(r);
    CHECK(rep.exit_code == 0);
    CHECK(rep.body["status"] == "ok");
    CHECK(rep.body["value"].get<double>() == doctest::Approx(std::numbers::pi / 3).epsilon(1e-14));
    CHECK(rep.body["version"] == kVersion);
    CHECK(rep.body["request"]["n"] == 2);
    CHECK(rep.body["request"]["seed"] == 0);
}

TEST_CASE("operator commutator reports the multiple") {
    CommandRequest r = request("operator");
    r.action = "commutator";
    r.lhs = "D:1";
    r.rhs = "Omega:0,1,1";
    r.n = 2;
    r.m = 1;
    const CommandReport rep = run(r);
    CHECK(rep.exit_code == 0);
    CHECK(rep.body["multiple_of_rhs"] == "2");
    CHECK(rep.body["is_zero"] == false);

    r.lhs = "D:1";
    r.rhs = "D:2";
    const CommandReport zero = run(r);
    CHECK(zero.body["is_zero"] == true);
}

TEST_CASE("operator expand and apply") {
    CommandRequest r = request("operator");
    r.action = "expand";
    r.lhs = "delta:2";
    r.n = 2;
    const CommandReport e = run(r);
    CHECK(e.exit_code == 0);
    CHECK(e.body["order"] == 2);
    CHECK(e.body["exact"] == true);

    r.action = "apply";
    r.lhs = "delta:1";
    r.input = {{"field", {{"name", "p_s"}, {"s", {0.0, 1.5}}}}, {"point", {{"Y", {{2.0, 0.3}, {0.3, 1.0}}}}}};
    const CommandReport a = run(r);
    CHECK(a.exit_code == 0);
    CHECK(a.body["ratio"].get<double>() == doctest::Approx(3.0).epsilon(1e-10));
}

TEST_CASE("reduce") {
    const json id = {{"Y", {{1.0, 0.0}, {0.0, 1.0}}}};
    CommandRequest r = request("reduce", id);
    r.space = "pn";
    const CommandReport rep = run(r);
    CHECK(rep.exit_code == 0);
    CHECK(rep.body["reduced"]["Y"] == id["Y"]);
    CHECK(rep.body["transform"]["A"] == json({{1, 0}, {0, 1}}));
    CHECK(rep.body["certified"] == true);

    r.input = {{"Y", {{5.0, 7.0}, {7.0, 10.0}}}};
    const CommandReport red = run(r);
    const auto Y = red.body["reduced"]["Y"];
    CHECK(Y[0][0].get<double>() == doctest::Approx(1.0));
    CHECK(Y[0][1].get<double>() == doctest::Approx(0.0).scale(1.0));
    CHECK(Y[1][1].get<double>() == doctest::Approx(1.0));

    CommandRequest p = request("reduce", {{"Y", {{1.0, 0.0}, {0.0, 1.0}}}, {"V", {{0.7, -0.2}}}});
    const CommandReport pr = run(p);
    CHECK(pr.body["reduced"]["V"][0][0].get<double>() == doctest::Approx(-0.3));
}

TEST_CASE("act and iwasawa") {
    CommandRequest r = request("act", {{"group", {{"A", {{2.0, 0.0}, {0.0, 2.0}}}, {"a", {{1.0, 0.0}}}}},
                                       {"point", {{"Y", {{1.0, 0.0}, {0.0, 1.0}}}, {"V", {{0.0, 0.0}}}}}});
    const CommandReport a = run(r);
    CHECK(a.exit_code == 0);
    CHECK(a.body["point"]["Y"][0][0].get<double>() == doctest::Approx(4.0));
    CHECK(a.body["point"]["V"][0][0].get<double>() == doctest::Approx(2.0));

    const CommandReport iw = run(request("iwasawa", {{"Y", {{2.0, 2.0}, {2.0, 2.5}}}, {"kind", "partial"}}));
    CHECK(iw.exit_code == 0);
    CHECK(iw.body["v"].get<double>() == doctest::Approx(0.5));
    CHECK(iw.body["x"][0].get<double>() == doctest::Approx(1.0));
}

TEST_CASE("special functions") {
    const CommandReport b =
        run(request("bessel", {{"s", {0.5}}, {"A", {{1.0}}}, {"B", {{1.0}}}}));
    CHECK(b.exit_code == 0);
    CHECK(b.body["value"].get<double>() == doctest::Approx(std::sqrt(std::numbers::pi) * std::exp(-2.0)).epsilon(1e-9));

    const CommandReport e =
        run(request("eisenstein", {{"s", {3.0}}, {"Y", {{1.0, 0.0}, {0.0, 1.0}}}, {"height", 50}}));
    CHECK(e.exit_code == 0);
    CHECK(e.body["eigenvalue"].get<double>() == doctest::Approx(1.5));
}

TEST_CASE("exit codes") {
    const CommandReport div =
        run(request("eisenstein", {{"s", {0.5}}, {"Y", {{1.0, 0.0}, {0.0, 1.0}}}, {"height", 10}}));
    CHECK(div.exit_code == 2);
    CHECK(div.body["status"] == "error");
    CHECK(div.body["error"]["kind"] == "domain");

    const CommandReport budget = run(request(
        "eisenstein", {{"s", {3.0, 3.0}}, {"Y", {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}}, {"height", 500}}));
    CHECK(budget.exit_code == 3);
    CHECK(budget.body["error"]["kind"] == "budget");

    const CommandReport unknown =
        run(request("eisenstein", {{"s", {3.0}}, {"Y", {{1.0, 0.0}, {0.0, 1.0}}}, {"height", 10}, {"colour", 1}}));
    CHECK(unknown.exit_code == 1);

    CHECK(run(request("no-such-command")).exit_code == 1);
    CHECK(run(request("reduce", {{"Y", "not a matrix"}})).exit_code == 1);
    CHECK(run(request("reduce", {{"Y", {{1.0, 2.0}, {2.0, 1.0}}}})).exit_code == 2);
}

TEST_CASE("reports are deterministic") {
    CommandRequest r = request("spherical", {{"s", {0.5, -0.2}}, {"Y", {{2.0, 0.5}, {0.5, 1.0}}}, {"samples", 5000}});
    r.seed = 17;
    r.workers = 3;
    const std::string a = run(r).body.dump();
    const std::string b = run(r).body.dump();
    CHECK(a == b);
    r.seed = 18;
    CHECK(run(r).body.dump() != a);
}
