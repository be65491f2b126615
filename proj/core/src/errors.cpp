#include "uqsched/errors.hpp"

namespace uqsched {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::EmptySample:
      return "empty_sample";
    case ErrorCode::EmptyFamily:
      return "empty_family";
    case ErrorCode::Domain:
      return "domain_error";
    case ErrorCode::Format:
      return "format_error";
    case ErrorCode::Io:
      return "io_error";
    case ErrorCode::Schema:
      return "schema_error";
    case ErrorCode::SingularKernel:
      return "singular_kernel";
    case ErrorCode::NotFound:
      return "not_found";
  }
  return "unknown";
}

}  // namespace uqsched
