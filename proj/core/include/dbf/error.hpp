#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dbf {

enum class ErrorKind {
  kInvalidArgument,
  kSeriesTooShort,
  kLengthMismatch,
  kDimensionMismatch,
  kNotPsd,
  kBadWindow,
  kSingularSystem,
  kNumericalFailure,
  kDegenerateSample,
  kParse,
  kIo,
};

std::string_view to_string(ErrorKind kind);

// Single exception type for the library; callers switch on kind() when
// they need to map failures onto exit codes or statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

inline void require(bool condition, ErrorKind kind, const char* message) {
  if (!condition) fail(kind, message);
}

}  // namespace dbf
