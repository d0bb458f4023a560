#pragma once

#include <stdexcept>
#include <string>

namespace hyplab {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input: dimension mismatch, bad field, inconsistent shape.
class StructuralError : public Error {
public:
    StructuralError(const std::string& field, const std::string& what)
        : Error("structural error in '" + field + "': " + what), field_(field) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

/// Unknown catalog name or missing resource.
class LookupError : public Error {
public:
    using Error::Error;
};

/// Argument outside the documented domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Degenerate geometric configuration (vanishing dividing factor).
class SingularityError : public Error {
public:
    using Error::Error;
};

/// Iteration failed to reach the requested tolerance.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double last_defect, int column = -1)
        : Error(what), last_defect_(last_defect), column_(column) {}
    double last_defect() const { return last_defect_; }
    int column() const { return column_; }

private:
    double last_defect_;
    int column_;
};

/// Input outside the supported problem class (non-nilpotent coupling,
/// non-constant monodromy sequence, ...).
class UnsupportedError : public Error {
public:
    using Error::Error;
};

/// Non-finite values or an ill-conditioned subproblem.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// A documented precondition of the operation does not hold.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Scenario file could not be parsed.
class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace hyplab
