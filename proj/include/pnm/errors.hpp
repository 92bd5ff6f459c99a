#pragma once

#include <stdexcept>
#include <string>

namespace pnm {

// Base of every library error. The exit code is what the CLI reports.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what, int exit_code = 2)
        : std::runtime_error(what), exit_code_(exit_code) {}
    int exit_code() const noexcept { return exit_code_; }

private:
    int exit_code_;
};

// Violated preconditions on the mathematical domain (exit code 2).
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(what, 2) {}
};

class DimensionMismatch : public DomainError {
public:
    explicit DimensionMismatch(const std::string& what) : DomainError("dimension mismatch: " + what) {}
};

class NotPositiveDefinite : public DomainError {
public:
    explicit NotPositiveDefinite(const std::string& what) : DomainError("not positive definite: " + what) {}
};

class NotSymmetric : public DomainError {
public:
    explicit NotSymmetric(const std::string& what) : DomainError("not symmetric: " + what) {}
};

class Singular : public DomainError {
public:
    explicit Singular(const std::string& what) : DomainError("singular: " + what) {}
};

class DivergentParameters : public DomainError {
public:
    explicit DivergentParameters(const std::string& what) : DomainError("divergent parameters: " + what) {}
};

class ChartViolation : public DomainError {
public:
    explicit ChartViolation(const std::string& what) : DomainError("chart violation: " + what) {}
};

class IndexOutOfRange : public DomainError {
public:
    explicit IndexOutOfRange(const std::string& what) : DomainError("index out of range: " + what) {}
};

class JetOrderInsufficient : public DomainError {
public:
    explicit JetOrderInsufficient(const std::string& what) : DomainError("jet order insufficient: " + what) {}
};

// Iterative or enumerative procedures that ran out of budget (exit code 3).
class ConvergenceFailure : public Error {
public:
    explicit ConvergenceFailure(const std::string& what) : Error("convergence failure: " + what, 3) {}
};

class EnumerationBudgetExceeded : public Error {
public:
    explicit EnumerationBudgetExceeded(const std::string& what)
        : Error("enumeration budget exceeded: " + what, 3) {}
};

class QuadratureFailure : public Error {
public:
    explicit QuadratureFailure(const std::string& what) : Error("quadrature failure: " + what, 3) {}
};

}  // namespace pnm
