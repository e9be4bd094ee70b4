#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ow {

enum class ErrorCode {
  DuplicateName,
  NoGlobalPopulation,
  TypeMismatch,
  UnknownAttribute,
  UnknownRelation,
  UnknownPopulation,
  InvalidPercent,
  TooManyAttributes,
  NegativeCount,
  ParseError,
  IoError,
  FormatVersionMismatch,
  SyntaxError,
  StructuralZero,
  EmptySample,
  OutOfDomain,
  EmptyDistribution,
  NonFiniteLoss,
  ConfigError,
  NoUsableSample,
  NoMetadata,
  UnknownMechanismNoMetadata,
  NoPopulationMarginals,
  Internal,
};

std::string_view to_string(ErrorCode code);

struct SourceLocation {
  int line = 0;    // 1-based, 0 = unknown
  int column = 0;  // 1-based, 0 = unknown
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, SourceLocation where = {});

  ErrorCode code() const noexcept { return code_; }
  SourceLocation where() const noexcept { return where_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  SourceLocation where_;
  std::string detail_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message, SourceLocation where = {});

}  // namespace ow
