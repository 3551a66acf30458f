#pragma once

#include <stdexcept>
#include <string>

namespace blp {

// Error taxonomy shared by all modules. The CLI maps kinds onto exit codes:
// resource exhaustion is exit 2, everything else a user error (exit 1).
enum class ErrorKind {
  Syntax,
  Validation,
  NonGroundQuery,
  Type,
  ResourceExceeded,
  UndefinedVariable,
  Cycle,
  RuleArity,
  Domain,
  UnknownRule,
  InconsistentEvidence,
  SingularEvidence,
  UnsupportedModel,
  NameCollision,
};

const char* error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

class SyntaxError : public Error {
 public:
  SyntaxError(int line, int column, const std::string& message)
      : Error(ErrorKind::Syntax, "line " + std::to_string(line) + ", column " +
                                     std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& message)
      : Error(ErrorKind::Validation, message) {}
};

class NonGroundQueryError : public Error {
 public:
  explicit NonGroundQueryError(const std::string& message)
      : Error(ErrorKind::NonGroundQuery, message) {}
};

class TypeError : public Error {
 public:
  explicit TypeError(const std::string& message)
      : Error(ErrorKind::Type, message) {}
};

class ResourceExceeded : public Error {
 public:
  explicit ResourceExceeded(const std::string& message)
      : Error(ErrorKind::ResourceExceeded, message) {}
};

class UndefinedVariableError : public Error {
 public:
  explicit UndefinedVariableError(const std::string& message)
      : Error(ErrorKind::UndefinedVariable, message) {}
};

class CycleError : public Error {
 public:
  explicit CycleError(const std::string& message)
      : Error(ErrorKind::Cycle, message) {}
};

class RuleArityError : public Error {
 public:
  explicit RuleArityError(const std::string& message)
      : Error(ErrorKind::RuleArity, message) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& message)
      : Error(ErrorKind::Domain, message) {}
};

class UnknownRuleError : public Error {
 public:
  explicit UnknownRuleError(const std::string& message)
      : Error(ErrorKind::UnknownRule, message) {}
};

class InconsistentEvidenceError : public Error {
 public:
  explicit InconsistentEvidenceError(const std::string& message)
      : Error(ErrorKind::InconsistentEvidence, message) {}
};

class SingularEvidenceError : public Error {
 public:
  explicit SingularEvidenceError(const std::string& message)
      : Error(ErrorKind::SingularEvidence, message) {}
};

class UnsupportedModelError : public Error {
 public:
  explicit UnsupportedModelError(const std::string& message)
      : Error(ErrorKind::UnsupportedModel, message) {}
};

class NameCollisionError : public Error {
 public:
  explicit NameCollisionError(const std::string& message)
      : Error(ErrorKind::NameCollision, message) {}
};

}  // namespace blp
