#pragma once

#include <stdexcept>
#include <string>

namespace qbn {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed network text. Carries 1-based line/column when known (0 = n/a).
class ParseError : public Error {
public:
    ParseError(std::string message, int line = 0, int column = 0)
        : Error(std::move(message)), line(line), column(column) {}
    int line;
    int column;
};

/// Byte outside the token alphabet.
class UnexpectedCharacter : public ParseError {
public:
    using ParseError::ParseError;
};

/// Tokens that do not form a valid expression (or trail a complete one).
class SyntaxError : public ParseError {
public:
    using ParseError::ParseError;
};

/// The same gene declared on two lines.
class DuplicateGene : public ParseError {
public:
    using ParseError::ParseError;
};

/// A rule references a gene no line declares.
class UndefinedVariable : public ParseError {
public:
    using ParseError::ParseError;
};

/// No gene lines at all.
class EmptyNetwork : public ParseError {
public:
    using ParseError::ParseError;
};

/// A requested allocation (dense state, transition table, ...) exceeds the
/// configured budget.
class CapacityExceeded : public Error {
public:
    using Error::Error;
};

class IndexOutOfRange : public Error {
public:
    using Error::Error;
};

/// Update synthesis asked to write into one of its own input qubits.
class QubitCollision : public Error {
public:
    using Error::Error;
};

/// unfold_cycle was handed a state whose orbit never returns to it.
class NotOnAttractor : public Error {
public:
    using Error::Error;
};

/// A marked state set is not a union of full attractor cycles.
class NotClosedUnderTransition : public Error {
public:
    using Error::Error;
};

/// Suppressing every basis state would leave nothing to measure.
class AllStatesMarked : public Error {
public:
    using Error::Error;
};

/// Measurement verification failed more often than the retry budget allows.
class NonConvergence : public Error {
public:
    using Error::Error;
};

} // namespace qbn
