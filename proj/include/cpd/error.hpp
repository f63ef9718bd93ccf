#pragma once

#include <stdexcept>
#include <string>

namespace cpd {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Out-of-range or inconsistent construction parameters.
class InvalidSpecError : public Error {
public:
    using Error::Error;
};

// Malformed scenario/plan/history input. The message carries line and field context.
class ParseError : public Error {
public:
    using Error::Error;
};

// Plan or query does not match the scenario's node roster or time grid.
class DimensionError : public Error {
public:
    using Error::Error;
};

class InfeasiblePlanError : public Error {
public:
    using Error::Error;
};

// Remote evaluator unreachable, timed out or closed the session.
class EvaluationError : public Error {
public:
    using Error::Error;
};

// Remote evaluator answered with something that does not follow the wire protocol.
class ProtocolError : public EvaluationError {
public:
    using EvaluationError::EvaluationError;
};

}  // namespace cpd
