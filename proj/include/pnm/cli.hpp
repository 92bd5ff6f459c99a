#pragma once

// JSON-in/JSON-out command dispatch shared by the `pnm` executable and tests.

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>

namespace pnm::cli {

inline constexpr const char* kVersion = "1.0.0";

struct CommandRequest {
    std::string subcommand;
    std::string action;  // operator expand|apply|commutator|invariance
    nlohmann::json input = nlohmann::json::object();
    std::uint64_t seed = 0;
    int jet_order = 6;
    std::optional<double> tol;
    int workers = 1;
    std::string variant = "v_scaled";
    int bound = 3;
    std::optional<int> n;
    std::optional<int> m;
    std::string lhs;
    std::string rhs;
    std::string space;
};

struct CommandReport {
    nlohmann::json body;
    int exit_code = 0;
};

CommandReport run(const CommandRequest& request);

nlohmann::json request_to_json(const CommandRequest& request);

// Malformed requests (bad JSON shapes, unknown fields) exit with code 1.
class RequestError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace pnm::cli
