#ifndef UQSCHED_ERRORS_HPP
#define UQSCHED_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace uqsched {

enum class ErrorCode {
  EmptySample,
  EmptyFamily,
  Domain,
  Format,
  Io,
  Schema,
  SingularKernel,
  NotFound,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Base of every exception thrown by the library. `code()` lets callers
/// branch without a catch clause per type (the CLI maps codes to exit status).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

#define UQSCHED_DEFINE_ERROR(Name, Code)                                 \
  class Name : public Error {                                            \
   public:                                                               \
    explicit Name(const std::string& message) : Error(Code, message) {}  \
  }

UQSCHED_DEFINE_ERROR(EmptySampleError, ErrorCode::EmptySample);
UQSCHED_DEFINE_ERROR(EmptyFamilyError, ErrorCode::EmptyFamily);
UQSCHED_DEFINE_ERROR(DomainError, ErrorCode::Domain);
UQSCHED_DEFINE_ERROR(FormatError, ErrorCode::Format);
UQSCHED_DEFINE_ERROR(IoError, ErrorCode::Io);
UQSCHED_DEFINE_ERROR(SchemaError, ErrorCode::Schema);
UQSCHED_DEFINE_ERROR(SingularKernelError, ErrorCode::SingularKernel);
UQSCHED_DEFINE_ERROR(NotFoundError, ErrorCode::NotFound);

#undef UQSCHED_DEFINE_ERROR

}  // namespace uqsched

#endif  // UQSCHED_ERRORS_HPP
