#ifndef COBOUNDARY_ERRORS_HPP
#define COBOUNDARY_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace coboundary {

/// Base class for every failure this library reports deliberately.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class ParseError : public Error {
public:
    explicit ParseError(const std::string& what) : Error(what) {}
};

/// A point was mapped through a transformation that does not cover it.
class PointOutsideDomain : public Error {
public:
    explicit PointOutsideDomain(const std::string& what) : Error(what) {}
};

/// Composition or pullback attempted across mismatched domains/images.
class DomainMismatch : public Error {
public:
    explicit DomainMismatch(const std::string& what) : Error(what) {}
};

class NotBijective : public Error {
public:
    explicit NotBijective(const std::string& what) : Error(what) {}
};

/// An operation that requires exact integral balance received an
/// unbalanced input (nonzero mean where zero mean is a precondition).
class UnbalancedInput : public Error {
public:
    explicit UnbalancedInput(const std::string& what) : Error(what) {}
};

class DegenerateInput : public Error {
public:
    explicit DegenerateInput(const std::string& what) : Error(what) {}
};

class NotTwoStep : public Error {
public:
    explicit NotTwoStep(const std::string& what) : Error(what) {}
};

class InvalidBaseSolution : public Error {
public:
    explicit InvalidBaseSolution(const std::string& what) : Error(what) {}
};

class InvalidWitness : public Error {
public:
    explicit InvalidWitness(const std::string& what) : Error(what) {}
};

class InvalidExponents : public Error {
public:
    explicit InvalidExponents(const std::string& what) : Error(what) {}
};

class InfeasibleEpsilon : public Error {
public:
    explicit InfeasibleEpsilon(const std::string& what) : Error(what) {}
};

class TableTooShort : public Error {
public:
    explicit TableTooShort(const std::string& what) : Error(what) {}
};

class Eqn2Violated : public Error {
public:
    explicit Eqn2Violated(const std::string& what) : Error(what) {}
};

class ExponentNotRepresentable : public Error {
public:
    explicit ExponentNotRepresentable(const std::string& what) : Error(what) {}
};

/// Raised when a construction would exceed the configured branch budget
/// (env COBOUNDARY_MAX_BRANCHES, default 10^6).
class BranchLimitExceeded : public Error {
public:
    explicit BranchLimitExceeded(const std::string& what) : Error(what) {}
};

}  // namespace coboundary

#endif
