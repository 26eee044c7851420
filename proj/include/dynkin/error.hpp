#pragma once

#include <stdexcept>
#include <string>

namespace dynkin {

// Base of every error raised by the library. kind() is a stable tag used by
// the CLI diagnostics ("BadProbabilities: ...").
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define DYNKIN_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                       \
   public:                                                          \
    explicit Name(const std::string& what) : Error(#Name, what) {} \
  }

DYNKIN_DEFINE_ERROR(MalformedTree);
DYNKIN_DEFINE_ERROR(BadProbabilities);
DYNKIN_DEFINE_ERROR(UnknownNode);
DYNKIN_DEFINE_ERROR(RegionMismatch);
DYNKIN_DEFINE_ERROR(BadFamily);
DYNKIN_DEFINE_ERROR(BadLambda);
DYNKIN_DEFINE_ERROR(TerminalMismatch);
DYNKIN_DEFINE_ERROR(NotSolved);
DYNKIN_DEFINE_ERROR(TooManyStrategies);
DYNKIN_DEFINE_ERROR(NotSandwiched);
DYNKIN_DEFINE_ERROR(InvariantViolation);
DYNKIN_DEFINE_ERROR(ModelFormat);

#undef DYNKIN_DEFINE_ERROR

}  // namespace dynkin
