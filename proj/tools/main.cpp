#include "pnm/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

int main(int argc, char** argv) {
    using nlohmann::json;
    pnm::cli::CommandRequest req;
    std::string input;
    std::optional<double> tol;
    std::optional<int> n, m;

    CLI::App app{"Geometry and automorphic forms on Minkowski-Euclid space"};
    app.require_subcommand(1);
    app.add_option("--seed", req.seed, "Random seed")->default_val(0);
    app.add_option("--jet-order", req.jet_order, "Maximum jet order")->default_val(6);
    app.add_option("--tol", tol, "Tolerance override");
    app.add_option("--workers", req.workers, "Worker threads")->default_val(1)->check(CLI::PositiveNumber);
    app.add_option("--variant", req.variant, "First-order term of the SL Laplacian")->default_val("v_scaled");
    app.add_option("--bound", req.bound, "Enumeration bound")->default_val(3);
    app.add_option("--n", n, "Dimension n");
    app.add_option("--m", m, "Dimension m");
    app.add_option("--lhs", req.lhs, "Operator spec, e.g. D:1 or Omega:0,1,1");
    app.add_option("--rhs", req.rhs, "Operator spec");
    app.add_option("--space", req.space, "pn, sl or pnm");
    app.add_option("--input", input, "Input JSON file, '-' for stdin, or inline JSON");
    app.fallthrough();

    for (const char* name : {"act", "reduce", "iwasawa", "volume", "geodesic", "eisenstein", "bessel", "fourier",
                             "spherical", "check", "embed"})
        app.add_subcommand(name);
    CLI::App* op = app.add_subcommand("operator");
    op->require_subcommand(1);
    for (const char* action : {"expand", "apply", "commutator", "invariance"}) op->add_subcommand(action)->fallthrough();
    for (CLI::App* sub : app.get_subcommands()) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    req.subcommand = app.get_subcommands().front()->get_name();
    if (req.subcommand == "operator") req.action = op->get_subcommands().front()->get_name();
    req.tol = tol;
    req.n = n;
    req.m = m;

    try {
        if (!input.empty()) {
            std::string text;
            if (input == "-") {
                std::stringstream ss;
                ss << std::cin.rdbuf();
                text = ss.str();
            } else if (input.front() == '{') {
                text = input;
            } else {
                std::ifstream f(input);
                if (!f) throw std::runtime_error("cannot open input file " + input);
                std::stringstream ss;
                ss << f.rdbuf();
                text = ss.str();
            }
            req.input = json::parse(text);
        }
    } catch (const std::exception& e) {
        json err = {{"version", pnm::cli::kVersion},
                    {"status", "error"},
                    {"error", {{"kind", "request"}, {"message", e.what()}}}};
        std::cout << err.dump(2) << "\n";
        return 1;
    }

    const pnm::cli::CommandReport report = pnm::cli::run(req);
    std::cout << report.body.dump(2) << "\n";
    return report.exit_code;
}
