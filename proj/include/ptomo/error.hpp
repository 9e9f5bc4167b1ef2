#pragma once

#include <stdexcept>
#include <string>

namespace ptomo {

enum class ErrorKind {
  kInvalidInput,
  kDegenerateInput,
  kNumerical,
  kInternalConsistency,
  kIo,
};

const char* to_string(ErrorKind kind);

// Single exception type for the library; the kind maps one-to-one onto the
// status codes of the C API.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void throw_invalid(const std::string& what) {
  throw Error(ErrorKind::kInvalidInput, what);
}
[[noreturn]] inline void throw_degenerate(const std::string& what) {
  throw Error(ErrorKind::kDegenerateInput, what);
}
[[noreturn]] inline void throw_numerical(const std::string& what) {
  throw Error(ErrorKind::kNumerical, what);
}

}  // namespace ptomo
