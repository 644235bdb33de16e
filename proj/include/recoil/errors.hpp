#pragma once

#include <stdexcept>
#include <string>

namespace recoil {

// Every library failure derives from Error so callers (CLI, sweep cells)
// can catch one type and still branch on the concrete kind.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual const char* kind() const noexcept { return "error"; }
};

class DomainError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "domain_error"; }
};

class InfeasiblePhaseMatching : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "infeasible_phase_matching"; }
};

class TruncationOverflow : public Error {
public:
    TruncationOverflow(const std::string& what, double boundary_population)
        : Error(what), boundary_population_(boundary_population) {}
    const char* kind() const noexcept override { return "truncation_overflow"; }
    double boundary_population() const noexcept { return boundary_population_; }

private:
    double boundary_population_;
};

class NumericError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "numeric_error"; }
};

class ShapeError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "shape_error"; }
};

class ConvergenceError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "non_convergence"; }
};

class ConfigError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "config_error"; }
};

}  // namespace recoil
