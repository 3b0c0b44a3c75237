#include "pcc/error.hpp"

namespace pcc {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kValidation: return "validation";
    case ErrorKind::kDomain: return "domain";
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kConvergence: return "convergence";
    case ErrorKind::kGenerationFailure: return "generation_failure";
    case ErrorKind::kInsufficientData: return "insufficient_data";
    case ErrorKind::kUnsupported: return "unsupported";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kValidation: return 2;
    case ErrorKind::kDomain: return 3;
    case ErrorKind::kParse: return 4;
    case ErrorKind::kConvergence: return 5;
    case ErrorKind::kGenerationFailure: return 6;
    case ErrorKind::kInsufficientData: return 7;
    case ErrorKind::kUnsupported: return 8;
    case ErrorKind::kIo: return 9;
  }
  return 1;
}

}  // namespace pcc
