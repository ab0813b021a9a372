#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace oraclemine {

// Root of every error raised by the engine. Callers that only need to tell
// domain failures from programming errors catch this.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Dangling state/symbol reference, duplicate id, duplicate transition.
class StructureError : public Error {
public:
  using Error::Error;
};

class ParseError : public Error {
public:
  ParseError(std::size_t line, const std::string& message)
      : Error("line " + std::to_string(line) + ": " + message), line_(line) {}

  [[nodiscard]] std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

class IncompleteMachine : public Error {
public:
  using Error::Error;
};

class NotDeterministic : public Error {
public:
  using Error::Error;
};

class UnknownSymbol : public Error {
public:
  using Error::Error;
};

class InvalidExecution : public Error {
public:
  using Error::Error;
};

class ExecutionLimitExceeded : public Error {
public:
  using Error::Error;
};

class AlphabetMismatch : public Error {
public:
  using Error::Error;
};

class InvalidArgument : public Error {
public:
  using Error::Error;
};

// The expert picked a response that was not offered, or a response with an
// empty execution class was requested.
class ExpertProtocolError : public Error {
public:
  using Error::Error;
};

// A session operation that does not fit its current status.
class SessionStateError : public Error {
public:
  using Error::Error;
};

// A replayed transcript diverged from the recorded run.
class ReplayMismatch : public Error {
public:
  using Error::Error;
};

class UnsatisfiableFormula : public Error {
public:
  using Error::Error;
};

// The pair search hit its model cap before it could decide.
class InconclusiveSearch : public Error {
public:
  using Error::Error;
};

class BudgetExceeded : public Error {
public:
  using Error::Error;
};

class SoundnessFailure : public Error {
public:
  using Error::Error;
};

} // namespace oraclemine
