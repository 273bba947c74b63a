#pragma once

#include <stdexcept>
#include <string>

namespace nambu {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A polynomial was evaluated without a binding for one of its variables.
class MissingVariable : public Error {
public:
    explicit MissingVariable(const std::string& var)
        : Error("missing variable: " + var), var_(var) {}
    const std::string& variable() const noexcept { return var_; }

private:
    std::string var_;
};

/// A polynomial references a variable outside the current layout, or
/// argument lists have the wrong length.
class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class MalformedMultiplet : public Error {
public:
    using Error::Error;
};

/// A (q,p) monomial cannot be rewritten in terms of the multiplet generators.
class Unliftable : public Error {
public:
    using Error::Error;
};

/// The closure was asked for a moment it does not handle (momentum powers,
/// mixed q-p monomials inside a potential).
class UnsupportedMoment : public Error {
public:
    using Error::Error;
};

/// The multiplet lacks the slots needed to express a Hamiltonian.
class UnsupportedMultiplet : public Error {
public:
    using Error::Error;
};

class DegreeUnsupported : public Error {
public:
    using Error::Error;
};

/// A state or wavefunction component became NaN or infinite.
class NonFiniteState : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace nambu
