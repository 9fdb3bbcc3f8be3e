#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace discflow {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class InvalidParameter : public Error {
public:
    explicit InvalidParameter(const std::string& what) : Error(what) {}
};

/// Adaptive integration could not meet the tolerance (step-size underflow).
class IntegrationFailure : public Error {
public:
    IntegrationFailure(const std::string& what, double t, double h)
        : Error(what + " (t=" + std::to_string(t) + ", h=" + std::to_string(h) + ")"),
          t_fail(t), h_fail(h) {}
    double t_fail;
    double h_fail;
};

/// Lagrangian nodes collided or crossed; the spatial grid cannot resolve the flow.
class GridTooCoarse : public Error {
public:
    explicit GridTooCoarse(const std::string& what) : Error(what) {}
};

/// Picard iteration exceeded max_iter; carries the sup-difference history.
class NonContraction : public Error {
public:
    NonContraction(const std::string& what, std::vector<double> hist)
        : Error(what), history(std::move(hist)) {}
    std::vector<double> history;
};

/// A stated assumption of the requested operation does not hold.
class PreconditionViolation : public Error {
public:
    explicit PreconditionViolation(const std::string& what) : Error(what) {}
};

} // namespace discflow
