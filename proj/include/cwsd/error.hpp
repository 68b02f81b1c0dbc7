#pragma once

#include <stdexcept>
#include <string>

namespace cwsd {

enum class ErrorKind {
  kInvalidInput,
  kInvalidState,
  kIo,
  kEncoding,
  kFormat,
  kGeneration,
  kUsage,
};

// Single exception type for the library; the kind drives CLI exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace cwsd
