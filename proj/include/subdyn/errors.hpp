#pragma once

#include <stdexcept>
#include <string>

namespace subdyn {

/// Malformed or out-of-domain input (bad symbol, inadmissible word, bad shape).
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An operation was called on data that violates its documented precondition.
class PreconditionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// The finite data at hand is not enough to decide (window or horizon too small).
class Inconclusive : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A computed certificate failed its own bound checks.
class VerificationFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace subdyn
