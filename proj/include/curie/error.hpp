#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace curie {

enum class ErrorKind {
  Config,
  Input,
  Coordinate,
  State,
  Propagation,
  Schema,
  Row,
  Ordering,
  Comparison,
  Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries a category so that callers
/// (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void raise(ErrorKind kind, const std::string& message);

}  // namespace curie
