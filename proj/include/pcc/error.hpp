#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pcc {

enum class ErrorKind {
  kValidation,
  kDomain,
  kParse,
  kConvergence,
  kGenerationFailure,
  kInsufficientData,
  kUnsupported,
  kIo,
};

std::string_view to_string(ErrorKind kind);

// Process exit code used by the CLI for each error category (never 0).
int exit_code(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace pcc
