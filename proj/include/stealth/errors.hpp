#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace stealth {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define STEALTH_DEFINE_ERROR(Name)      \
  class Name : public Error {           \
   public:                              \
    using Error::Error;                 \
  }

STEALTH_DEFINE_ERROR(UnknownSkill);
STEALTH_DEFINE_ERROR(UnknownInterest);
STEALTH_DEFINE_ERROR(InvalidTaxonomy);
STEALTH_DEFINE_ERROR(EmptyInterestSet);
STEALTH_DEFINE_ERROR(NoReceiver);
STEALTH_DEFINE_ERROR(NonMonotonicTime);
STEALTH_DEFINE_ERROR(OutOfBounds);
STEALTH_DEFINE_ERROR(InvalidParams);
STEALTH_DEFINE_ERROR(TimeOutOfRange);
STEALTH_DEFINE_ERROR(ConfigError);
STEALTH_DEFINE_ERROR(EmptyLogs);
STEALTH_DEFINE_ERROR(NoEmergencies);
STEALTH_DEFINE_ERROR(NoSuccesses);
STEALTH_DEFINE_ERROR(UnknownScenario);
STEALTH_DEFINE_ERROR(InvalidOverride);
STEALTH_DEFINE_ERROR(ConflictingFixedProfile);

#undef STEALTH_DEFINE_ERROR

/// Malformed text input. Carries the 1-based line number (0 when unknown).
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace stealth
