#include "blp/errors.hpp"

namespace blp {

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Syntax: return "SyntaxError";
    case ErrorKind::Validation: return "ValidationError";
    case ErrorKind::NonGroundQuery: return "NonGroundQueryError";
    case ErrorKind::Type: return "TypeError";
    case ErrorKind::ResourceExceeded: return "ResourceExceeded";
    case ErrorKind::UndefinedVariable: return "UndefinedVariableError";
    case ErrorKind::Cycle: return "CycleError";
    case ErrorKind::RuleArity: return "RuleArityError";
    case ErrorKind::Domain: return "DomainError";
    case ErrorKind::UnknownRule: return "UnknownRuleError";
    case ErrorKind::InconsistentEvidence: return "InconsistentEvidenceError";
    case ErrorKind::SingularEvidence: return "SingularEvidenceError";
    case ErrorKind::UnsupportedModel: return "UnsupportedModelError";
    case ErrorKind::NameCollision: return "NameCollisionError";
  }
  return "Error";
}

}  // namespace blp
