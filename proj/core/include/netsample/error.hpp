#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace netsample {

enum class ErrorCategory {
  kInvalidArgument,
  kMismatch,
  kFormat,
  kIo,
};

std::string_view category_name(ErrorCategory c) noexcept;

// Every library failure is reported through this type; the category lets the
// CLI map failures to exit codes without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

[[noreturn]] inline void throw_invalid(const std::string& what) {
  throw Error(ErrorCategory::kInvalidArgument, what);
}
[[noreturn]] inline void throw_mismatch(const std::string& what) {
  throw Error(ErrorCategory::kMismatch, what);
}
[[noreturn]] inline void throw_format(const std::string& what) {
  throw Error(ErrorCategory::kFormat, what);
}
[[noreturn]] inline void throw_io(const std::string& what) {
  throw Error(ErrorCategory::kIo, what);
}

}  // namespace netsample
