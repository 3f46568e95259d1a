#pragma once

#include <stdexcept>
#include <string>

namespace ut {

/// Failure categories. The CLI maps these onto exit codes.
enum class ErrorKind {
  invalid_input,
  shape,
  range,
  parse,
  version,
  integrity,
  spec,
  numeric,
};

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

}  // namespace ut
