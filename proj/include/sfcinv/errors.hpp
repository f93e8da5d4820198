#pragma once

#include <stdexcept>
#include <string>

namespace sfcinv {

/// Argument outside the domain of a behavioural function or vector field.
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// An inverse or root that does not exist for the given target.
class NoSolutionError : public std::runtime_error {
public:
    explicit NoSolutionError(const std::string& what) : std::runtime_error(what) {}
};

/// Precondition of an analysis routine is not met (e.g. hyperbolic point for l1).
class PreconditionError : public std::logic_error {
public:
    explicit PreconditionError(const std::string& what) : std::logic_error(what) {}
};

/// Vector field returned NaN or inf at an accepted state.
class NonFiniteError : public std::runtime_error {
public:
    explicit NonFiniteError(const std::string& what) : std::runtime_error(what) {}
};

/// Reconstructed levels disagree with the intensive trajectory.
class InconsistencyError : public std::runtime_error {
public:
    InconsistencyError(const std::string& identity, double violation)
        : std::runtime_error("ledger inconsistency in '" + identity + "': relative violation " +
                             std::to_string(violation)),
          identity_(identity), violation_(violation) {}
    const std::string& identity() const { return identity_; }
    double violation() const { return violation_; }

private:
    std::string identity_;
    double violation_;
};

/// Malformed scenario text or value; key() names the offending entry.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& key, const std::string& what)
        : std::runtime_error(key.empty() ? what : key + ": " + what), key_(key) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

} // namespace sfcinv
