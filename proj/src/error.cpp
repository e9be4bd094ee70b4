#include "openworld/error.hpp"

namespace ow {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DuplicateName: return "DuplicateName";
    case ErrorCode::NoGlobalPopulation: return "NoGlobalPopulation";
    case ErrorCode::TypeMismatch: return "TypeMismatch";
    case ErrorCode::UnknownAttribute: return "UnknownAttribute";
    case ErrorCode::UnknownRelation: return "UnknownRelation";
    case ErrorCode::UnknownPopulation: return "UnknownPopulation";
    case ErrorCode::InvalidPercent: return "InvalidPercent";
    case ErrorCode::TooManyAttributes: return "TooManyAttributes";
    case ErrorCode::NegativeCount: return "NegativeCount";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::FormatVersionMismatch: return "FormatVersionMismatch";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::StructuralZero: return "StructuralZero";
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::EmptyDistribution: return "EmptyDistribution";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::NoUsableSample: return "NoUsableSample";
    case ErrorCode::NoMetadata: return "NoMetadata";
    case ErrorCode::UnknownMechanismNoMetadata: return "UnknownMechanismNoMetadata";
    case ErrorCode::NoPopulationMarginals: return "NoPopulationMarginals";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

namespace {

std::string format_message(ErrorCode code, const std::string& message, SourceLocation where) {
  std::string out(to_string(code));
  if (where.line > 0) {
    out += " at line " + std::to_string(where.line);
    if (where.column > 0) out += ", column " + std::to_string(where.column);
  }
  out += ": ";
  out += message;
  return out;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message, SourceLocation where)
    : std::runtime_error(format_message(code, message, where)),
      code_(code),
      where_(where),
      detail_(message) {}

void fail(ErrorCode code, const std::string& message, SourceLocation where) {
  throw Error(code, message, where);
}

}  // namespace ow
